#include "ksphere/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "ksphere/exp_sums.hpp"
#include "ksphere/gauss_sums.hpp"
#include "ksphere/kernels.hpp"
#include "ksphere/numeric.hpp"
#include "ksphere/surface_measure.hpp"

namespace ksphere {

namespace {

std::int64_t mod_pos(std::int64_t v, std::int64_t m) {
  const std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

void check_sample(const SphereSpec& spec, const FrequencySample& sample) {
  if (sample.dimension != spec.dimension) throw DomainError("frequency sample dimension does not match the sphere");
  if (sample.modulus < 1) throw DomainError("frequency sample modulus must be >= 1");
}

MultiplierGrid empty_grid(const SphereSpec& spec, const FrequencySample& sample) {
  return {spec.degree, spec.dimension, spec.power_value, sample, std::vector<Complex>(sample.size())};
}

// Equispaced t-nodes with exact integer phases for alpha_r(t, theta_i).
struct TGrid {
  std::int64_t M;
  std::int64_t r;
  std::vector<std::int64_t> pk;  // n^k mod M
};

TGrid t_grid(const SphereSpec& spec) {
  const std::int64_t r = spec.max_coordinate();
  const std::int64_t M = 2 * (spec.dimension + 1) * std::max<std::int64_t>(spec.power_value, 1) + 1;
  TGrid g{M, r, std::vector<std::int64_t>(static_cast<std::size_t>(r) + 1)};
  for (std::int64_t n = 0; n <= r; ++n) g.pk[n] = powmod(n, spec.degree, M);
  return g;
}

// alpha_r(j/M, theta) for each coordinate, given e(n theta_i) tables.
void alphas_at(const TGrid& g, std::int64_t j, const std::vector<std::vector<Complex>>& lin, std::vector<Complex>& out) {
  const std::int64_t r = g.r;
  std::vector<Complex> base(static_cast<std::size_t>(r) + 1);
  for (std::int64_t n = 0; n <= r; ++n) {
    const auto res = static_cast<std::int64_t>(static_cast<__int128>(g.pk[n]) * j % g.M);
    base[n] = unit_phase(static_cast<double>(res) / static_cast<double>(g.M));
  }
  for (std::size_t i = 0; i < lin.size(); ++i) {
    Complex a = base[0];
    for (std::int64_t n = 1; n <= r; ++n) a += base[n] * (lin[i][r + n] + lin[i][r - n]);
    out[i] = a;
  }
}

std::vector<std::vector<Complex>> linear_tables(std::span<const double> theta, std::int64_t r) {
  std::vector<std::vector<Complex>> lin(theta.size(), std::vector<Complex>(static_cast<std::size_t>(2 * r + 1)));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::int64_t n = -r; n <= r; ++n) {
      const long double ph = static_cast<long double>(n) * theta[i];
      lin[i][r + n] = unit_phase(static_cast<double>(ph - std::floor(ph)));
    }
  }
  return lin;
}

bool in_major_arc(std::int64_t j, std::int64_t M, const ArcDissection& arcs, double width) {
  for (std::int64_t q = 1; q <= arcs.Q_major; ++q) {
    // nearest a/q to j/M
    const auto a = static_cast<std::int64_t>(std::llround(static_cast<double>(j) * q / static_cast<double>(M)));
    if (gcd64(mod_pos(a, q), q) != 1) continue;
    const double dist = std::abs(static_cast<double>(j * q - a * M)) / static_cast<double>(q * M);
    if (dist <= width / static_cast<double>(q)) return true;
  }
  return false;
}

}  // namespace

std::vector<double> FrequencySample::theta(std::size_t i) const {
  std::vector<double> t(static_cast<std::size_t>(dimension));
  for (int c = 0; c < dimension; ++c) t[c] = static_cast<double>((*this)[i][c]) / static_cast<double>(modulus);
  return t;
}

FrequencySample make_frequency_sample(int dimension, std::int64_t modulus, SampleScheme scheme,
                                      std::size_t random_count, std::uint64_t seed) {
  if (dimension < 1 || modulus < 1) throw DomainError("frequency sample: dimension, modulus >= 1");
  const double full_size = std::pow(static_cast<double>(modulus), dimension);
  if (scheme == SampleScheme::automatic) scheme = full_size <= 65536.0 ? SampleScheme::full : SampleScheme::declared;
  FrequencySample s{dimension, modulus, {}, "", seed};
  if (scheme == SampleScheme::full) {
    if (full_size > 5e7) throw WorkBoundExceeded("frequency sample: full grid too large");
    s.scheme = "full";
    const auto total = static_cast<std::size_t>(full_size);
    s.points.resize(total * dimension);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      for (int c = dimension - 1; c >= 0; --c) {
        s.points[idx * dimension + c] = static_cast<std::int64_t>(rest % modulus);
        rest /= modulus;
      }
    }
    return s;
  }
  s.scheme = "declared(axes+diagonals+random" + std::to_string(random_count) + ",seed=" + std::to_string(seed) + ")";
  std::vector<std::vector<std::int64_t>> pts;
  for (int axis = 0; axis < dimension; ++axis) {
    for (std::int64_t m = 0; m < modulus; ++m) {
      std::vector<std::int64_t> p(dimension, 0);
      p[axis] = m;
      pts.push_back(p);
    }
  }
  for (std::uint32_t mask = 0; mask < (1u << (dimension - 1)); ++mask) {
    for (std::int64_t m = 0; m < modulus; ++m) {
      std::vector<std::int64_t> p(dimension);
      p[0] = m;
      for (int c = 1; c < dimension; ++c) p[c] = ((mask >> (c - 1)) & 1u) ? mod_pos(-m, modulus) : m;
      pts.push_back(p);
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_count; ++i) {
    std::vector<std::int64_t> p(dimension), neg(dimension);
    for (int c = 0; c < dimension; ++c) {
      p[c] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(modulus));
      neg[c] = mod_pos(-p[c], modulus);
    }
    pts.push_back(p);
    pts.push_back(neg);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  for (const auto& p : pts) s.points.insert(s.points.end(), p.begin(), p.end());
  return s;
}

double MultiplierGrid::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double multiplier_normalization(const SphereSpec& spec) {
  spec.validate();
  if (spec.power_value < 1) throw DomainError("multiplier normalization needs lambda >= 1");
  return gelfand_leray_volume(spec.degree, spec.dimension) *
         std::pow(static_cast<double>(spec.power_value), static_cast<double>(spec.dimension - spec.degree) / spec.degree);
}

std::int64_t default_Q(const SphereSpec& spec) {
  return std::max<std::int64_t>(1, iroot(spec.power_value, 2 * spec.degree));
}

MultiplierGrid exact_multiplier(const SphereSpec& spec, const FrequencySample& sample) {
  check_sample(spec, sample);
  const auto pts = enumerate_points(spec);
  WorkBound::from_env().check(static_cast<double>(pts.size()) * static_cast<double>(sample.size()) * spec.dimension,
                              "exact_multiplier");
  auto grid = empty_grid(spec, sample);
  kernels::lattice_fourier_omp(pts, sample.points, sample.modulus, grid.values);
  const double norm = multiplier_normalization(spec);
  for (auto& v : grid.values) v /= norm;
  return grid;
}

MultiplierGrid main_term_multiplier(const SphereSpec& spec, const FrequencySample& sample, std::int64_t Q,
                                    int resolution) {
  check_sample(spec, sample);
  if (Q < 1) throw DomainError("main_term_multiplier: Q >= 1");
  const int d = spec.dimension;
  const int k = spec.degree;
  const double r = spec.radius();
  // |theta - m/q| < 1/(4q) in each coordinate, so |r (theta - m/q)| < r sqrt(d) / 4
  const int need = static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(d)) * r));
  if (resolution == 0) resolution = std::max(64, need);
  if (resolution < need) throw DomainError("main_term_multiplier: surface quadrature not trusted at this radius");
  const SurfaceQuadrature quad(SurfaceSpec{k, d, r, resolution});

  std::vector<std::pair<std::int64_t, std::int64_t>> fractions;
  for (std::int64_t q = 1; q <= Q; ++q) {
    for (std::int64_t a = 0; a < q; ++a) {
      if (gcd64(a, q) == 1) fractions.emplace_back(a, q);
    }
  }
  WorkBound::from_env().check(static_cast<double>(sample.size()) * fractions.size() * d * Q, "main_term_multiplier");

  auto grid = empty_grid(spec, sample);
  const std::int64_t M = sample.modulus;
  const auto n = static_cast<std::int64_t>(sample.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t idx = 0; idx < n; ++idx) {
    const auto m0 = sample[static_cast<std::size_t>(idx)];
    std::vector<std::int64_t> mv(d);
    std::vector<double> offs(d), xi(d);
    CompensatedSum acc;
    std::int64_t last_q = 0;
    bool active = false;
    double weight = 0.0;
    Complex sig;
    for (const auto& [a, q] : fractions) {
      if (q != last_q) {
        last_q = q;
        // m_i = round(q theta_i); offset q theta_i - m_i = (q m0_i - m_i M) / M
        active = true;
        for (int c = 0; c < d; ++c) {
          const std::int64_t num = q * m0[c];
          const std::int64_t mi = (2 * num + M) / (2 * M);
          mv[c] = mi;
          offs[c] = static_cast<double>(num - mi * M) / static_cast<double>(M);
          if (std::abs(offs[c]) >= 0.25) active = false;
        }
        if (active) {
          weight = bump_product(offs);
          active = weight != 0.0;
        }
        if (active) {
          for (int c = 0; c < d; ++c) xi[c] = offs[c] / static_cast<double>(q);
          sig = sigma_fourier(quad, xi);
        }
      }
      if (!active) continue;
      const auto ph = static_cast<std::int64_t>(
          mod_pos(-static_cast<std::int64_t>(static_cast<__int128>(a) * (spec.power_value % q) % q), q));
      const Complex G = gauss_sum_dd(q == 1 ? 1 : a, q, k, mv);
      acc.add(unit_phase(static_cast<double>(ph) / static_cast<double>(q)) * G * weight * sig);
    }
    grid.values[static_cast<std::size_t>(idx)] = acc.value();
  }
  return grid;
}

ErrorReport error_multiplier(const SphereSpec& spec, const FrequencySample& sample, std::int64_t Q) {
  ErrorReport rep;
  rep.exact = exact_multiplier(spec, sample);
  rep.main = main_term_multiplier(spec, sample, Q);
  rep.error = rep.exact;
  for (std::size_t i = 0; i < rep.error.values.size(); ++i) {
    rep.error.values[i] = rep.exact.values[i] - rep.main.values[i];
    const double a = std::abs(rep.error.values[i]);
    if (a > rep.sup) {
      rep.sup = a;
      rep.argsup = i;
    }
  }
  return rep;
}

double conjugate_symmetry_defect(const MultiplierGrid& grid) {
  const auto& s = grid.sample;
  std::map<std::vector<std::int64_t>, std::size_t> index;
  for (std::size_t i = 0; i < s.size(); ++i) index.emplace(std::vector<std::int64_t>(s[i].begin(), s[i].end()), i);
  double worst = 0.0;
  std::vector<std::int64_t> neg(static_cast<std::size_t>(s.dimension));
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int c = 0; c < s.dimension; ++c) neg[c] = mod_pos(-s[i][c], s.modulus);
    const auto it = index.find(neg);
    if (it == index.end()) continue;
    worst = std::max(worst, std::abs(grid.values[it->second] - std::conj(grid.values[i])));
  }
  return worst;
}

double kappa_theory(int degree, int dimension, double gamma) {
  return std::min(dimension * gamma - degree, static_cast<double>(dimension) / degree - (degree + 2.0));
}

DecayReport decay_fit(int degree, int dimension, std::span<const std::int64_t> power_values,
                      const FrequencySample& sample, std::int64_t Q, std::span<const double> gammas) {
  if (power_values.size() < 4) throw DomainError("decay_fit: need at least 4 radii");
  DecayReport rep;
  std::vector<double> lx, ly;
  for (std::int64_t lam : power_values) {
    const SphereSpec spec{degree, dimension, lam};
    const std::int64_t q = Q > 0 ? Q : default_Q(spec);
    const auto err = error_multiplier(spec, sample, q);
    rep.rows.push_back({lam, spec.radius(), q, err.sup});
    lx.push_back(std::log(spec.radius()));
    ly.push_back(std::log(err.sup));
  }
  const auto fit = least_squares(lx, ly);
  rep.slope = fit.slope;
  rep.kappa_emp = -fit.slope;
  rep.gammas.assign(gammas.begin(), gammas.end());
  for (double g : gammas) rep.kappa_theory.push_back(kappa_theory(degree, dimension, g));
  return rep;
}

ArcDissection DissectionRule::at(const SphereSpec& spec) const {
  return {Q_major ? *Q_major : default_Q(spec), nu};
}

void check_dissection(const ArcDissection& arcs, double r, int degree) {
  if (arcs.Q_major < 1) throw DomainError("arc dissection: Q_major must be >= 1");
  if (!(arcs.nu > 0.0)) throw DomainError("arc dissection: nu must be positive");
  const double w = std::pow(r, arcs.nu - degree);
  if (arcs.Q_major == 1) return;  // a single arc around 0
  // consecutive Farey fractions a/q < c/e of order Q_major satisfy c q - a e = 1
  std::int64_t a = 0, b = 1, c = 1, e = arcs.Q_major;
  while (true) {
    if (w * static_cast<double>(b + e) >= 1.0) {
      throw DomainError("arc dissection: major arcs around " + std::to_string(a) + "/" + std::to_string(b) + " and " +
                        std::to_string(c) + "/" + std::to_string(e) + " overlap");
    }
    if (c == 1 && e == 1) break;
    const std::int64_t kk = (arcs.Q_major + b) / e;
    const std::int64_t na = c, nb = e;
    c = kk * c - a;
    e = kk * e - b;
    a = na;
    b = nb;
  }
}

ArcSplit arc_split(const SphereSpec& spec, const ArcDissection& arcs, std::span<const double> theta) {
  spec.validate();
  if (theta.size() != static_cast<std::size_t>(spec.dimension)) throw DomainError("arc_split: theta has wrong length");
  if (spec.power_value < 1) throw DomainError("arc_split: lambda >= 1");
  const double r = spec.radius();
  check_dissection(arcs, r, spec.degree);
  const auto g = t_grid(spec);
  WorkBound::from_env().check(static_cast<double>(g.M) * spec.dimension * (2 * g.r + 1), "arc_split");
  const auto lin = linear_tables(theta, g.r);
  const double width = std::pow(r, arcs.nu - spec.degree);
  CompensatedSum major, minor;
  std::vector<Complex> al(static_cast<std::size_t>(spec.dimension));
  ArcSplit out;
  out.nodes = g.M;
  const std::int64_t lam = spec.power_value % g.M;
  for (std::int64_t j = 0; j < g.M; ++j) {
    alphas_at(g, j, lin, al);
    const auto res = static_cast<std::int64_t>(mod_pos(-static_cast<std::int64_t>(static_cast<__int128>(lam) * j % g.M), g.M));
    Complex v = unit_phase(static_cast<double>(res) / static_cast<double>(g.M));
    for (const auto& a : al) v *= a;
    if (in_major_arc(j, g.M, arcs, width)) {
      major.add(v);
      ++out.major_nodes;
    } else {
      minor.add(v);
    }
  }
  out.major = major.value() / static_cast<double>(g.M);
  out.minor = minor.value() / static_cast<double>(g.M);
  return out;
}

MinorTrace minor_arc_l2_trace(int degree, int dimension, std::span<const std::int64_t> power_values,
                              const DissectionRule& rule, int s, std::span<const std::vector<double>> thetas,
                              std::span<const double> gammas) {
  if (power_values.empty() || thetas.empty()) throw DomainError("minor_arc_l2_trace: empty radius or theta list");
  if (s < 1) throw DomainError("minor_arc_l2_trace: s >= 1");
  MinorTrace tr;
  tr.s = s;
  tr.gammas.assign(gammas.begin(), gammas.end());
  for (double gm : gammas) tr.theory.push_back(-(dimension - 2.0 * s) * gm);
  const bool holder = dimension > 2 * s;
  std::vector<double> lx, ly;
  for (std::int64_t lam : power_values) {
    const SphereSpec spec{degree, dimension, lam};
    spec.validate();
    const auto arcs = rule.at(spec);
    const double r = spec.radius();
    check_dissection(arcs, r, degree);
    const auto g = t_grid(spec);
    const double width = std::pow(r, arcs.nu - degree);
    std::vector<char> major(static_cast<std::size_t>(g.M));
    for (std::int64_t j = 0; j < g.M; ++j) major[j] = in_major_arc(j, g.M, arcs, width) ? 1 : 0;
    const double mv = holder ? mean_value_exact(degree, g.r, s).exact_count.get_d() : 0.0;
    const double norm = multiplier_normalization(spec);
    MinorTraceRow row{lam, r, arcs.Q_major, 0.0, 0.0, holder};
    std::vector<Complex> al(static_cast<std::size_t>(dimension));
    const std::int64_t lr = lam % g.M;
    for (const auto& th : thetas) {
      if (th.size() != static_cast<std::size_t>(dimension)) throw DomainError("minor_arc_l2_trace: theta length");
      const auto lin = linear_tables(th, g.r);
      CompensatedSum minor;
      double tail_max = 0.0;
      for (std::int64_t j = 0; j < g.M; ++j) {
        if (major[j]) continue;
        alphas_at(g, j, lin, al);
        const auto res = mod_pos(-static_cast<std::int64_t>(static_cast<__int128>(lr) * j % g.M), g.M);
        Complex v = unit_phase(static_cast<double>(res) / static_cast<double>(g.M));
        for (const auto& a : al) v *= a;
        minor.add(v);
        if (holder) {
          double tail = 1.0;
          for (int i = 2 * s; i < dimension; ++i) tail *= std::abs(al[i]);
          tail_max = std::max(tail_max, tail);
        }
      }
      const double lhs = std::abs(minor.value()) / static_cast<double>(g.M);
      row.sup_minor = std::max(row.sup_minor, lhs / norm);
      if (holder && tail_max * mv > 0.0) row.holder_ratio = std::max(row.holder_ratio, lhs / (tail_max * mv));
    }
    tr.rows.push_back(row);
    if (row.sup_minor > 0.0) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(row.sup_minor));
    }
  }
  if (lx.size() >= 2) tr.slope = least_squares(lx, ly).slope;
  return tr;
}

}  // namespace ksphere
