#include "ksphere/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <fftw3.h>

#include "ksphere/kernels.hpp"
#include "ksphere/numeric.hpp"

namespace ksphere {

namespace {

std::size_t torus_size(int dimension, std::int64_t side) {
  if (dimension < 1 || side < 1) throw DomainError("grid: dimension and side must be positive");
  double total = 1.0;
  std::size_t n = 1;
  for (int i = 0; i < dimension; ++i) {
    total *= static_cast<double>(side);
    n *= static_cast<std::size_t>(side);
  }
  if (total > 4e9) throw WorkBoundExceeded("grid: side^d too large");
  return n;
}

// Largest centered sup-norm over the support of f.
std::int64_t support_radius(const GridFunction& f) {
  std::int64_t best = -1;
  std::vector<std::int64_t> xc(f.dimension);
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (f.values[x] == 0.0) continue;
    std::size_t rest = x;
    std::int64_t m = 0;
    for (int i = f.dimension - 1; i >= 0; --i) {
      std::int64_t c = static_cast<std::int64_t>(rest % f.side);
      rest /= f.side;
      if (c > f.side / 2) c -= f.side;
      m = std::max(m, c < 0 ? -c : c);
    }
    best = std::max(best, m);
  }
  return best;
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

GridFunction dft_average(const GridFunction& f, const PointSet& sphere, double scale) {
  const int d = f.dimension;
  const std::int64_t M = f.side;
  std::vector<int> dims(d, static_cast<int>(M));
  std::size_t half = 1;
  for (int i = 0; i + 1 < d; ++i) half *= static_cast<std::size_t>(M);
  half *= static_cast<std::size_t>(M / 2 + 1);

  std::vector<double> real_in(f.size()), kernel(f.size(), 0.0);
  for (std::size_t p = 0; p < sphere.size(); ++p) {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) {
      std::int64_t c = sphere[p][i] % M;
      if (c < 0) c += M;
      idx = idx * static_cast<std::size_t>(M) + static_cast<std::size_t>(c);
    }
    kernel[idx] += scale;
  }
  auto* fa = fftw_alloc_complex(half);
  auto* ka = fftw_alloc_complex(half);
  fftw_plan pf, pk, back;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    pf = fftw_plan_dft_r2c(d, dims.data(), real_in.data(), fa, FFTW_ESTIMATE);
    pk = fftw_plan_dft_r2c(d, dims.data(), kernel.data(), ka, FFTW_ESTIMATE);
    back = fftw_plan_dft_c2r(d, dims.data(), fa, real_in.data(), FFTW_ESTIMATE);
  }
  std::copy(f.values.begin(), f.values.end(), real_in.begin());
  fftw_execute(pf);
  fftw_execute(pk);
  for (std::size_t i = 0; i < half; ++i) {
    const double re = fa[i][0] * ka[i][0] - fa[i][1] * ka[i][1];
    const double im = fa[i][0] * ka[i][1] + fa[i][1] * ka[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute(back);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(pf);
    fftw_destroy_plan(pk);
    fftw_destroy_plan(back);
  }
  fftw_free(fa);
  fftw_free(ka);
  GridFunction out{d, M, std::move(real_in)};
  const double inv = 1.0 / static_cast<double>(out.size());
  for (double& v : out.values) v *= inv;
  return out;
}

void check_sequence(const RadiusSequence& seq, const char* what) {
  if (seq.members.empty()) throw DomainError(std::string(what) + ": empty radius sequence");
}

// sup over alpha of alpha^p #{v > alpha}, on the grid and in the limit.
WeakTypeRow weak_type_row(std::vector<double> values, std::size_t set_size, double p,
                          std::span<const double> altitudes) {
  std::sort(values.begin(), values.end());
  WeakTypeRow row{set_size, 0.0, 0.0, 0.0};
  const auto n = values.size();
  for (double a : altitudes) {
    const auto above = static_cast<double>(values.end() - std::upper_bound(values.begin(), values.end(), a));
    const double c = std::pow(a, p) * above / static_cast<double>(set_size);
    if (c > row.constant) {
      row.constant = c;
      row.best_altitude = a;
    }
  }
  // alpha just below an attained value v counts every value >= v
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && values[i] == values[i - 1]) continue;
    const double v = std::min(values[i], 1.0);
    const double c = std::pow(v, p) * static_cast<double>(n - i) / static_cast<double>(set_size);
    row.limit_constant = std::max(row.limit_constant, c);
  }
  return row;
}

}  // namespace

GridFunction GridFunction::zeros(int dimension, std::int64_t side) {
  return {dimension, side, std::vector<double>(torus_size(dimension, side), 0.0)};
}

std::size_t GridFunction::index(std::span<const std::int64_t> x) const {
  if (x.size() != static_cast<std::size_t>(dimension)) throw DomainError("grid: point has wrong length");
  std::size_t idx = 0;
  for (auto c : x) {
    c %= side;
    if (c < 0) c += side;
    idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(c);
  }
  return idx;
}

double GridFunction::norm1() const {
  KahanSum s;
  for (double v : values) s.add(std::abs(v));
  return s.value();
}

double GridFunction::norm2() const {
  KahanSum s;
  for (double v : values) s.add(v * v);
  return std::sqrt(s.value());
}

double GridFunction::norm_p(double p) const {
  if (!(p >= 1.0)) throw DomainError("grid: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  KahanSum s;
  for (double v : values) s.add(std::pow(std::abs(v), p));
  return std::pow(s.value(), 1.0 / p);
}

bool GridFunction::is_indicator() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

GridFunction delta_function(int dimension, std::int64_t side) {
  auto f = GridFunction::zeros(dimension, side);
  f.values[0] = 1.0;
  return f;
}

GridFunction box_indicator(int dimension, std::int64_t side, std::int64_t width) {
  if (width < 0 || width > side) throw DomainError("box_indicator: width must lie in [0, side]");
  auto f = GridFunction::zeros(dimension, side);
  for (std::size_t x = 0; x < f.size(); ++x) {
    std::size_t rest = x;
    bool inside = true;
    for (int i = 0; i < dimension; ++i) {
      if (static_cast<std::int64_t>(rest % side) >= width) inside = false;
      rest /= side;
    }
    if (inside) f.values[x] = 1.0;
  }
  return f;
}

GridFunction random_function(int dimension, std::int64_t side, std::uint64_t seed) {
  auto f = GridFunction::zeros(dimension, side);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : f.values) v = u(rng);
  return f;
}

GridFunction random_indicator(int dimension, std::int64_t side, double density, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw DomainError("random_indicator: density must lie in [0,1]");
  auto f = GridFunction::zeros(dimension, side);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(density);
  for (double& v : f.values) v = b(rng) ? 1.0 : 0.0;
  return f;
}

GridFunction spherical_average(const GridFunction& f, const SphereSpec& spec, const AverageOptions& opts) {
  spec.validate();
  if (spec.dimension != f.dimension) throw DomainError("spherical_average: dimension mismatch");
  if (f.values.size() != torus_size(f.dimension, f.side)) throw DomainError("spherical_average: bad value array");
  if (opts.emulate_lattice) {
    const auto supp = support_radius(f);
    if (supp >= 0 && !(f.side > 2 * (supp + spec.max_coordinate()))) {
      throw DomainError("spherical_average: side " + std::to_string(f.side) + " <= 2(support radius " +
                        std::to_string(supp) + " + r " + std::to_string(spec.max_coordinate()) +
                        "), wraparound would alias");
    }
  }
  const auto sphere = enumerate_points(spec);
  if (sphere.empty()) throw DomainError("spherical_average: the sphere has no lattice points");
  const double scale = 1.0 / static_cast<double>(sphere.size());
  const double work = static_cast<double>(f.size()) * static_cast<double>(sphere.size());
  if (opts.method == AverageMethod::dft) return dft_average(f, sphere, scale);
  WorkBound::from_env().check(work, "spherical_average");
  GridFunction out{f.dimension, f.side, std::vector<double>(f.size())};
  kernels::cyclic_average_omp(f.values, f.dimension, f.side, sphere, scale, out.values);
  return out;
}

GridFunction maximal_function(const GridFunction& f, const RadiusSequence& seq, const AverageOptions& opts) {
  check_sequence(seq, "maximal_function");
  if (seq.dimension != f.dimension) throw DomainError("maximal_function: dimension mismatch");
  GridFunction out{f.dimension, f.side, std::vector<double>(f.size(), 0.0)};
  for (auto lambda : seq.members) {
    const auto avg = spherical_average(f, {seq.degree, seq.dimension, lambda}, opts);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = std::max(out.values[i], std::abs(avg.values[i]));
  }
  return out;
}

LatticeSet random_lattice_set(int dimension, std::size_t size, double density, std::uint64_t seed) {
  if (dimension < 1) throw DomainError("random_lattice_set: dimension must be positive");
  if (!(density > 0.0 && density <= 1.0)) throw DomainError("random_lattice_set: density must lie in (0,1]");
  auto L = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(size) / density, 1.0 / dimension)));
  while (std::pow(static_cast<double>(L), dimension) < static_cast<double>(size)) ++L;
  if (L > (1 << 20)) throw DomainError("random_lattice_set: box too large");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> u(0, L - 1);
  std::unordered_set<std::uint64_t> seen;
  LatticeSet F{dimension, {}};
  std::vector<std::int32_t> p(dimension);
  while (F.size() < size) {
    std::uint64_t key = 0;
    for (int i = 0; i < dimension; ++i) {
      p[i] = static_cast<std::int32_t>(u(rng));
      key = key * static_cast<std::uint64_t>(L) + static_cast<std::uint64_t>(p[i]);
    }
    if (seen.insert(key).second) F.coords.insert(F.coords.end(), p.begin(), p.end());
  }
  return F;
}

std::vector<double> lattice_maximal_values(const LatticeSet& F, const RadiusSequence& seq) {
  check_sequence(seq, "lattice_maximal_values");
  const int d = F.dimension;
  if (seq.dimension != d) throw DomainError("lattice_maximal_values: dimension mismatch");
  if (F.size() == 0) return {};

  std::int64_t rmax = 0;
  for (auto lambda : seq.members) rmax = std::max(rmax, SphereSpec{seq.degree, d, lambda}.max_coordinate());
  std::vector<std::int64_t> lo(d, std::numeric_limits<std::int64_t>::max()), ext(d);
  std::vector<std::int64_t> hi(d, std::numeric_limits<std::int64_t>::min());
  for (std::size_t i = 0; i < F.size(); ++i) {
    for (int c = 0; c < d; ++c) {
      lo[c] = std::min<std::int64_t>(lo[c], F.coords[i * d + c]);
      hi[c] = std::max<std::int64_t>(hi[c], F.coords[i * d + c]);
    }
  }
  double volume = 1.0;
  for (int c = 0; c < d; ++c) {
    lo[c] -= rmax;
    ext[c] = hi[c] + rmax - lo[c] + 1;
    volume *= static_cast<double>(ext[c]);
  }
  if (volume > 9e18) throw WorkBoundExceeded("lattice_maximal_values: bounding box too large to index");

  std::vector<PointSet> spheres;
  double work = 0.0;
  for (auto lambda : seq.members) {
    spheres.push_back(enumerate_points({seq.degree, d, lambda}));
    work += static_cast<double>(spheres.back().size()) * static_cast<double>(F.size());
  }
  WorkBound::from_env().check(work, "lattice_maximal_values");

  std::unordered_map<std::uint64_t, double> best;
  std::unordered_map<std::uint64_t, std::uint32_t> hits;
  for (const auto& sphere : spheres) {
    if (sphere.empty()) continue;
    hits.clear();
    hits.reserve(sphere.size() * F.size());
    for (std::size_t z = 0; z < F.size(); ++z) {
      for (std::size_t y = 0; y < sphere.size(); ++y) {
        std::uint64_t key = 0;
        for (int c = 0; c < d; ++c) {
          const std::int64_t x = static_cast<std::int64_t>(F.coords[z * d + c]) + sphere[y][c] - lo[c];
          key = key * static_cast<std::uint64_t>(ext[c]) + static_cast<std::uint64_t>(x);
        }
        ++hits[key];
      }
    }
    const double inv = 1.0 / static_cast<double>(sphere.size());
    for (const auto& [key, count] : hits) {
      double& b = best[key];
      b = std::max(b, count * inv);
    }
  }
  std::vector<double> out;
  out.reserve(best.size());
  for (const auto& kv : best) out.push_back(kv.second);
  std::sort(out.begin(), out.end());
  return out;
}

DeltaReport delta_endpoint_test(int degree, int dimension, std::span<const double> p_list,
                                std::span<const std::int64_t> lambda_list) {
  if (p_list.empty() || lambda_list.empty()) throw DomainError("delta_endpoint_test: empty p or lambda list");
  std::vector<std::int64_t> lams(lambda_list.begin(), lambda_list.end());
  if (!std::is_sorted(lams.begin(), lams.end()) || lams.front() < 1) {
    throw DomainError("delta_endpoint_test: lambda list must be positive and increasing");
  }
  for (double p : p_list) {
    if (!(p >= 1.0)) throw DomainError("delta_endpoint_test: p must be >= 1");
  }
  const auto counts = count_sweep(degree, dimension, lams.back(), CountMethod::series);
  DeltaReport rep{degree, dimension, {}, 0.0};
  double min_count = std::numeric_limits<double>::infinity();
  for (std::int64_t m = 1; m <= lams.back(); ++m) {
    if (counts[m] > 0) min_count = std::min(min_count, counts[m].get_d());
  }
  rep.sup_value = std::isinf(min_count) ? 0.0 : 1.0 / min_count;
  for (double p : p_list) {
    DeltaSeries s{p, {}, 0.0, 0.0};
    KahanSum acc;
    std::size_t next = 0;
    for (std::int64_t m = 1; m <= lams.back() && next < lams.size(); ++m) {
      if (counts[m] > 0) acc.add(std::pow(counts[m].get_d(), 1.0 - p));
      while (next < lams.size() && lams[next] == m) s.rows.push_back({lams[next++], acc.value()});
    }
    std::vector<double> lx, ly;
    for (const auto& row : s.rows) {
      if (row.norm_pp > 0.0) {
        lx.push_back(std::log(static_cast<double>(row.lambda_max)));
        ly.push_back(std::log(row.norm_pp));
      }
    }
    s.slope = lx.size() >= 2 ? least_squares(lx, ly).slope : 0.0;
    if (s.rows.size() >= 2) {
      const double a = s.rows[s.rows.size() - 2].norm_pp, b = s.rows.back().norm_pp;
      s.cauchy_defect = b > 0.0 ? (b - a) / b : 0.0;
    }
    rep.series.push_back(std::move(s));
  }
  return rep;
}

std::vector<std::int64_t> default_density_grid(std::int64_t lambda_max, std::int64_t start, int points) {
  if (start < 1 || lambda_max <= start || points < 2) throw DomainError("density grid: need 1 <= start < lambda_max");
  std::vector<std::int64_t> grid;
  const double ratio = std::log(static_cast<double>(lambda_max) / start) / (points - 1);
  for (int i = 0; i < points; ++i) {
    auto v = static_cast<std::int64_t>(std::llround(start * std::exp(ratio * i)));
    v = std::min(v, lambda_max);
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  grid.back() = lambda_max;
  return grid;
}

DensityFit density_parameter_fit(const RadiusSequence& seq, std::span<const std::int64_t> lambda_grid) {
  DensityFit fit{0.0, 0.0, {}, {}};
  std::vector<double> lx, ly;
  for (auto L : lambda_grid) {
    const auto count = static_cast<std::size_t>(
        std::upper_bound(seq.members.begin(), seq.members.end(), L) - seq.members.begin());
    if (count == 0 || L < 1) continue;
    fit.grid.push_back(L);
    fit.counts.push_back(count);
    lx.push_back(std::log(static_cast<double>(L)) / seq.degree);
    ly.push_back(std::log(static_cast<double>(count)));
  }
  if (lx.size() < 4) throw DomainError("density_parameter_fit: fewer than 4 grid points with nonzero counts");
  const auto lf = least_squares(lx, ly);
  fit.delta = lf.slope;
  fit.intercept = lf.intercept;
  return fit;
}

UnionBoundReport narrow_union_bound_check(const GridFunction& f, const RadiusSequence& seq, std::int64_t lambda0,
                                          const AverageOptions& opts) {
  RadiusSequence narrow = seq;
  narrow.members.clear();
  for (auto m : seq.members) {
    if (m <= lambda0) narrow.members.push_back(m);
  }
  check_sequence(narrow, "narrow_union_bound_check");
  const auto sup = maximal_function(f, narrow, opts);
  UnionBoundReport rep;
  rep.sup_norm1 = sup.norm1();
  rep.members = narrow.members.size();
  rep.bound = static_cast<double>(rep.members) * f.norm1();
  rep.ratio = rep.bound > 0.0 ? rep.sup_norm1 / rep.bound : 0.0;
  rep.indicator = f.is_indicator();
  return rep;
}

std::vector<double> default_altitudes() {
  std::vector<double> a;
  for (int j = 0; j <= 80; ++j) a.push_back(std::exp2(-j / 4.0));
  return a;
}

WeakTypeReport restricted_weak_type_probe(const RadiusSequence& seq, double p, std::span<const LatticeSet> sets,
                                          std::span<const double> altitudes) {
  if (!(p >= 1.0)) throw DomainError("restricted_weak_type_probe: p must be >= 1");
  for (double a : altitudes) {
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("restricted_weak_type_probe: altitudes must lie in (0,1]");
  }
  WeakTypeReport rep{p, {}, 0.0, 1.0};
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& F : sets) {
    if (F.size() == 0) continue;
    auto row = weak_type_row(lattice_maximal_values(F, seq), F.size(), p, altitudes);
    rep.worst = std::max(rep.worst, row.constant);
    lo = std::min(lo, row.constant);
    rep.rows.push_back(row);
  }
  if (!rep.rows.empty() && lo > 0.0) rep.spread = rep.worst / lo;
  return rep;
}

}  // namespace ksphere
