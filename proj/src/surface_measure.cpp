#include "ksphere/surface_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ksphere/numeric.hpp"

namespace ksphere {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Law of t = |x_j| / rho when `rest` coordinates remain after x_j:
// density proportional to (1 - t^k)^(rest/k - 1) on [0,1]. With t = 1 - v^k the
// endpoint singularity becomes the polynomial factor v^(rest-1).
SliceRule slice_rule(int k, int rest, int n) {
  std::vector<double> v, gw;
  gauss_legendre_unit(n, v, gw);
  SliceRule rule{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  const double beta = static_cast<double>(rest) / k - 1.0;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double vk = std::pow(v[i], k);
    const double t = 1.0 - vk;
    // 1 - t^k without cancellation near t = 1
    const double one_minus = -std::expm1(k * std::log1p(-vk));
    const double w = gw[i] * std::exp(beta * std::log(one_minus)) * k * std::pow(v[i], k - 1);
    rule.t[i] = t;
    rule.shrink[i] = std::pow(one_minus, 1.0 / k);
    rule.weight[i] = w;
    total += w;
  }
  for (double& w : rule.weight) w /= total;
  return rule;
}

// E prod_{i >= j} cos(2 pi xi_i x_i) given remaining radius rho.
double nested_cos(const SurfaceQuadrature& quad, std::span<const double> xi, int j, double rho,
                  const std::vector<char>& tail_zero) {
  const int d = quad.spec().dimension;
  if (tail_zero[j]) return 1.0;
  if (j == d - 1) return std::cos(two_pi * xi[j] * rho);
  const auto& rule = quad.level(j);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.t.size(); ++i) {
    const double c = xi[j] == 0.0 ? 1.0 : std::cos(two_pi * xi[j] * rho * rule.t[i]);
    acc += rule.weight[i] * c * nested_cos(quad, xi, j + 1, rho * rule.shrink[i], tail_zero);
  }
  return acc;
}

double smooth_step(double u) {
  // 0 for u <= 0, 1 for u >= 1
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

struct BumpRule {
  std::vector<double> u, w;
  BumpRule() {
    std::vector<double> x, gw;
    gauss_legendre_unit(96, x, gw);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double ui = 0.125 + 0.125 * x[i];
      u.push_back(ui);
      w.push_back(0.125 * gw[i] * bump(ui));
    }
  }
};

double blurred_level(const SurfaceQuadrature& quad, std::span<const double> x, double tau, int j, double rho) {
  const int d = quad.spec().dimension;
  auto pair = [&](double y) {
    return 0.5 * (bump_transform((x[j] - y) / tau) + bump_transform((x[j] + y) / tau));
  };
  if (j == d - 1) return pair(rho);
  const auto& rule = quad.level(j);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.t.size(); ++i) {
    acc += rule.weight[i] * pair(rho * rule.t[i]) * blurred_level(quad, x, tau, j + 1, rho * rule.shrink[i]);
  }
  return acc;
}

}  // namespace

void SurfaceSpec::validate() const {
  if (degree < 2) throw DomainError("surface: degree k must be >= 2");
  if (dimension < 2) throw DomainError("surface: dimension d must be >= 2");
  if (!(radius > 0.0)) throw DomainError("surface: radius must be positive");
  if (resolution < 8) throw DomainError("surface: resolution must be >= 8");
}

double gelfand_leray_constant(int degree, int dimension) {
  if (degree < 2) throw DomainError("gelfand_leray_constant: degree k must be >= 2");
  if (dimension < 1) throw DomainError("gelfand_leray_constant: dimension >= 1");
  return std::exp(dimension * std::lgamma(1.0 + 1.0 / degree) - std::lgamma(static_cast<double>(dimension) / degree));
}

double gelfand_leray_volume(int degree, int dimension) {
  return std::ldexp(gelfand_leray_constant(degree, dimension), dimension);
}

SurfaceQuadrature::SurfaceQuadrature(const SurfaceSpec& spec) : spec_(spec) {
  spec_.validate();
  for (int j = 0; j + 1 < spec_.dimension; ++j) {
    levels_.push_back(slice_rule(spec_.degree, spec_.dimension - 1 - j, spec_.resolution));
  }
}

std::vector<SurfaceNode> surface_quadrature(const SurfaceSpec& spec, std::size_t max_nodes) {
  const SurfaceQuadrature quad(spec);
  const int d = spec.dimension;
  const double count = std::pow(static_cast<double>(spec.resolution), d - 1) * std::ldexp(1.0, d);
  if (count > static_cast<double>(max_nodes)) throw WorkBoundExceeded("surface_quadrature: too many nodes");
  std::vector<SurfaceNode> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<double> mag(d);
  const double sign_w = std::ldexp(1.0, -d);
  auto emit = [&](double w) {
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      SurfaceNode node{std::vector<double>(d), w * sign_w};
      for (int i = 0; i < d; ++i) node.x[i] = ((mask >> i) & 1u) ? -mag[i] : mag[i];
      out.push_back(std::move(node));
    }
  };
  auto rec = [&](auto&& self, int j, double rho, double w) -> void {
    if (j == d - 1) {
      mag[j] = rho;
      emit(w);
      return;
    }
    const auto& rule = quad.level(j);
    for (std::size_t i = 0; i < rule.t.size(); ++i) {
      mag[j] = rho * rule.t[i];
      self(self, j + 1, rho * rule.shrink[i], w * rule.weight[i]);
    }
  };
  rec(rec, 0, spec.radius, 1.0);
  return out;
}

Complex sigma_fourier(const SurfaceQuadrature& quad, std::span<const double> xi, Evaluation mode) {
  const auto& spec = quad.spec();
  const int d = spec.dimension;
  if (xi.size() != static_cast<std::size_t>(d)) throw DomainError("sigma_fourier: xi has wrong length");
  std::vector<double> scaled(d);
  for (int i = 0; i < d; ++i) scaled[i] = xi[i] * spec.radius;
  if (mode == Evaluation::automatic && spec.degree == 2) {
    double norm = 0.0;
    for (double v : scaled) norm += v * v;
    std::fill(scaled.begin(), scaled.end(), 0.0);
    scaled[0] = std::sqrt(norm);
  }
  std::vector<char> tail_zero(d + 1, 1);
  for (int j = d - 1; j >= 0; --j) tail_zero[j] = tail_zero[j + 1] && scaled[j] == 0.0;
  return {nested_cos(quad, scaled, 0, 1.0, tail_zero), 0.0};
}

bool sigma_trusted(const SurfaceQuadrature& quad, std::span<const double> xi) {
  double norm = 0.0;
  for (double v : xi) norm += v * v;
  return std::sqrt(norm) * quad.spec().radius <= quad.trusted_frequency();
}

BnwFit bnw_decay_fit(const SurfaceQuadrature& quad, std::span<const double> direction, double R_min, double R_max,
                     double step, Evaluation mode) {
  const auto& spec = quad.spec();
  const int d = spec.dimension;
  if (direction.size() != static_cast<std::size_t>(d)) throw DomainError("bnw_decay_fit: direction has wrong length");
  double norm = 0.0;
  for (double v : direction) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw DomainError("bnw_decay_fit: zero direction");
  if (!(R_min > 0.0 && R_max > R_min && step > 0.0)) throw DomainError("bnw_decay_fit: bad R range");
  std::vector<double> unit(direction.begin(), direction.end());
  for (double& v : unit) v /= norm;

  const double r_top = std::min(R_max, quad.trusted_frequency() / spec.radius);
  if (r_top <= R_min) throw DomainError("bnw_decay_fit: R range lies outside the trusted range");
  const auto count = static_cast<std::size_t>(std::floor((r_top - R_min) / step)) + 1;
  BnwFit fit{0, 0, (1.0 - d) / static_cast<double>(spec.degree), 0, std::vector<DecaySample>(count)};
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    const double R = R_min + step * static_cast<double>(i);
    std::vector<double> xi(d);
    for (int c = 0; c < d; ++c) xi[c] = R * unit[c];
    fit.trace[i] = {R, sigma_fourier(quad, xi, mode).real(), true};
  }
  std::vector<double> lx, ly;
  bool any_nonzero = false;
  for (std::size_t i = 0; i < count; ++i) {
    const double a = std::abs(fit.trace[i].value);
    if (a > 0.0) any_nonzero = true;
    if (i == 0 || i + 1 == count) continue;
    if (a > 0.0 && a >= std::abs(fit.trace[i - 1].value) && a > std::abs(fit.trace[i + 1].value)) {
      lx.push_back(std::log(fit.trace[i].R));
      ly.push_back(std::log(a));
    }
  }
  if (!any_nonzero) throw DomainError("bnw_decay_fit: all samples are zero");
  if (lx.size() < 2) throw DomainError("bnw_decay_fit: fewer than two local maxima in range");
  const auto lf = least_squares(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.maxima = lx.size();
  return fit;
}

double bump(double u) {
  const double a = std::abs(u);
  if (a <= 0.125) return 1.0;
  if (a >= 0.25) return 0.0;
  return smooth_step((0.25 - a) / 0.125);
}

double bump_product(std::span<const double> z) {
  double p = 1.0;
  for (double v : z) {
    p *= bump(v);
    if (p == 0.0) break;
  }
  return p;
}

double bump_transform(double zeta) {
  static const BumpRule rule;
  // plateau part in closed form, transition layer by Gauss-Legendre
  const double plateau = zeta == 0.0 ? 0.25 : std::sin(two_pi * zeta / 8.0) / (std::numbers::pi * zeta);
  double layer = 0.0;
  for (std::size_t i = 0; i < rule.u.size(); ++i) layer += rule.w[i] * std::cos(two_pi * rule.u[i] * zeta);
  return plateau + 2.0 * layer;
}

double blurred_sphere_kernel(const SurfaceQuadrature& quad, double t, std::span<const double> x) {
  const int d = quad.spec().dimension;
  if (!(t > 0.0)) throw DomainError("blurred_sphere_kernel: t must be positive");
  if (x.size() != static_cast<std::size_t>(d)) throw DomainError("blurred_sphere_kernel: x has wrong length");
  return std::pow(t, -d) * blurred_level(quad, x, t, 0, quad.spec().radius);
}

}  // namespace ksphere
