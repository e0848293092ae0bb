#include "ksphere/exp_sums.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "ksphere/numeric.hpp"

namespace ksphere {

namespace {

using u128 = unsigned __int128;

// n^k modulo 2^128; exactly what DyadicPhase needs.
u128 wrapping_pow(std::uint64_t n, int k) {
  u128 acc = 1;
  for (int i = 0; i < k; ++i) acc *= n;
  return acc;
}

inline Complex phase_of(long double frac) {
  frac -= std::floor(frac);
  return unit_phase(static_cast<double>(frac));
}

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  auto r = static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
  return r < 0 ? r + m : r;
}

void check_range_args(int degree, std::int64_t r, int s) {
  if (degree < 1) throw DomainError("degree must be >= 1");
  if (r < 1) throw DomainError("radius r must be >= 1");
  if (s < 1) throw DomainError("moment s must be >= 1");
}

double unit_random(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Complex weyl_sum(const WeylSumParams& p, bool symmetric) {
  if (p.length < 1) throw DomainError("weyl_sum: length >= 1");
  if (p.degree < 1) throw DomainError("weyl_sum: degree >= 1");
  if (!(p.t >= 0 && p.t < 1 && p.xi >= 0 && p.xi < 1)) throw DomainError("weyl_sum: t, xi must lie in [0,1)");
  const DyadicPhase tp(p.t);
  const DyadicPhase xp(p.xi);
  CompensatedSum acc;
  if (!symmetric) {
    for (std::int64_t n = 1; n <= p.length; ++n) {
      const auto un = static_cast<std::uint64_t>(n);
      acc.add(phase_of(tp.times(wrapping_pow(un, p.degree)) + xp.times(un)));
    }
    return acc.value();
  }
  acc.add(Complex(1.0, 0.0));
  for (std::int64_t n = 1; n <= p.length; ++n) {
    const auto un = static_cast<std::uint64_t>(n);
    const long double base = tp.times(wrapping_pow(un, p.degree));
    const long double lin = xp.times(un);
    acc.add(phase_of(base + lin));
    acc.add(phase_of(base - lin));
  }
  return acc.value();
}

Complex weyl_sum_rational(std::int64_t length, int degree, std::int64_t a, std::int64_t q, std::int64_t xi_num,
                          std::int64_t xi_den, bool symmetric) {
  if (length < 1 || q < 1 || xi_den < 1 || degree < 1) throw DomainError("weyl_sum_rational: bad arguments");
  const std::int64_t L = q * xi_den;
  const std::int64_t an = ((a % q) + q) % q;
  const std::int64_t xn = ((xi_num % xi_den) + xi_den) % xi_den;
  auto term = [&](std::int64_t n, bool negate_linear) {
    const std::int64_t pk = powmod(n, degree, q);
    std::int64_t res = mulmod(mulmod(an, pk, q), xi_den, L);
    std::int64_t lin = mulmod(mulmod(xn, n % xi_den, xi_den), q, L);
    if (negate_linear) lin = (L - lin) % L;
    res = (res + lin) % L;
    return unit_phase(static_cast<double>(res) / static_cast<double>(L));
  };
  CompensatedSum acc;
  if (!symmetric) {
    for (std::int64_t n = 1; n <= length; ++n) acc.add(term(n, false));
    return acc.value();
  }
  acc.add(Complex(1.0, 0.0));
  for (std::int64_t n = 1; n <= length; ++n) {
    acc.add(term(n, false));
    acc.add(term(n, true));
  }
  return acc.value();
}

double wooley_gamma(int degree) {
  if (degree < 3) throw DomainError("wooley_gamma: degree >= 3");
  return 1.0 / (2.0 * (degree - 1) * (degree - 2));
}

SupProbeReport sup_hypothesis_probe(const SupProbeOptions& o) {
  if (o.length < 1 || o.degree < 1) throw DomainError("sup_hypothesis_probe: length, degree >= 1");
  if (o.q_max < 1 || o.q_max > o.length) throw DomainError("sup_hypothesis_probe: need 1 <= q_max <= N");
  if (o.xi_grid < 1) throw DomainError("sup_hypothesis_probe: xi grid size >= 1");
  if (o.gammas.empty()) throw DomainError("sup_hypothesis_probe: empty gamma list");

  std::vector<std::pair<std::int64_t, std::int64_t>> fr = o.fractions;
  if (fr.empty()) {
    fr.emplace_back(0, 1);
    for (std::int64_t q = 2; q <= o.q_max; ++q) {
      for (std::int64_t a = 1; a < q; ++a) {
        if (gcd64(a, q) == 1) fr.emplace_back(a, q);
      }
    }
  }
  for (const auto& [a, q] : fr) {
    if (q < 1 || gcd64(a, q) != 1) throw DomainError("sup_hypothesis_probe: fraction not reduced");
  }
  WorkBound::from_env().check(static_cast<double>(fr.size()) * o.xi_grid * o.length, "sup_hypothesis_probe");

  const double N = static_cast<double>(o.length);
  const double logc = 1.0 + std::log(N);
  SupProbeReport rep;
  rep.gammas = o.gammas;
  rep.worst_ratio.assign(o.gammas.size(), 0.0);
  rep.worst_log_ratio.assign(o.gammas.size(), 0.0);
  rep.rows.resize(fr.size() * static_cast<std::size_t>(o.xi_grid));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(rep.rows.size()); ++idx) {
    const auto [a, q] = fr[static_cast<std::size_t>(idx / o.xi_grid)];
    const std::int64_t j = idx % o.xi_grid;
    SupProbeRow row{a, q, j, o.xi_grid, 0.0, {}, {}};
    row.abs_sum = std::abs(weyl_sum_rational(o.length, o.degree, a, q, j, o.xi_grid, false));
    const double qd = static_cast<double>(q);
    const double base = 1.0 / qd + 1.0 / N + qd * std::pow(N, -static_cast<double>(o.degree));
    for (double g : o.gammas) {
      const double ratio = row.abs_sum / (N * std::pow(base, g));
      row.ratio.push_back(ratio);
      row.log_ratio.push_back(ratio / logc);
    }
    rep.rows[static_cast<std::size_t>(idx)] = std::move(row);
  }
  for (const auto& row : rep.rows) {
    for (std::size_t g = 0; g < o.gammas.size(); ++g) {
      rep.worst_ratio[g] = std::max(rep.worst_ratio[g], row.ratio[g]);
      rep.worst_log_ratio[g] = std::max(rep.worst_log_ratio[g], row.log_ratio[g]);
    }
  }
  return rep;
}

Complex sphere_exponential_sum(const SphereSpec& spec, std::span<const double> theta, SphereSumMethod method) {
  spec.validate();
  const int d = spec.dimension;
  if (theta.size() != static_cast<std::size_t>(d)) throw DomainError("sphere_exponential_sum: theta has wrong length");

  if (method == SphereSumMethod::direct) {
    const auto pts = enumerate_points(spec);
    CompensatedSum acc;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const auto n = pts[p];
      long double ph = 0;
      for (int i = 0; i < d; ++i) {
        const long double term = static_cast<long double>(n[i]) * theta[i];
        ph += term - std::floor(term);
      }
      acc.add(phase_of(ph));
    }
    return acc.value();
  }

  const int k = spec.degree;
  const std::int64_t r = std::max<std::int64_t>(1, spec.max_coordinate());
  const double Mf = 2.0 * d * std::pow(2.0 * r + 1.0, k) + 1.0;
  if (Mf > 4e9) throw WorkBoundExceeded("sphere_exponential_sum: quadrature grid too large");
  const auto M = static_cast<std::int64_t>(Mf);
  WorkBound::from_env().check(Mf * d * (2.0 * r + 1.0), "sphere_exponential_sum(dft_integral)");

  std::vector<std::int64_t> pk(static_cast<std::size_t>(r) + 1);
  for (std::int64_t n = 0; n <= r; ++n) pk[n] = ipow_checked(n, k) % M;
  // e(n theta_i) for n = -r..r
  std::vector<Complex> lin(static_cast<std::size_t>(d * (2 * r + 1)));
  for (int i = 0; i < d; ++i) {
    for (std::int64_t n = -r; n <= r; ++n) {
      const long double term = static_cast<long double>(n) * theta[i];
      lin[i * (2 * r + 1) + (n + r)] = phase_of(term - std::floor(term));
    }
  }
  const std::int64_t lam = spec.power_value % M;
  CompensatedSum total;
  for (std::int64_t j = 0; j < M; ++j) {
    std::vector<Complex> base(static_cast<std::size_t>(r) + 1);
    for (std::int64_t n = 0; n <= r; ++n) base[n] = unit_phase(static_cast<double>(mulmod(pk[n], j, M)) / M);
    Complex prod = unit_phase(static_cast<double>((M - mulmod(lam, j, M)) % M) / M);
    for (int i = 0; i < d; ++i) {
      Complex alpha(0.0, 0.0);
      for (std::int64_t n = -r; n <= r; ++n) alpha += base[n < 0 ? -n : n] * lin[i * (2 * r + 1) + (n + r)];
      prod *= alpha;
    }
    total.add(prod);
  }
  return total.value() / static_cast<double>(M);
}

std::vector<BigInt> power_sum_counts(int degree, std::int64_t r, int s, SumRange range, const WorkBound& bound) {
  check_range_args(degree, r, s);
  const std::int64_t rk = ipow_checked(r, degree);
  const std::int64_t cutoff = rk * s;
  bound.check(static_cast<double>(s) * static_cast<double>(cutoff + 1) * static_cast<double>(r + 1),
              "power_sum_counts");
  std::vector<std::int64_t> support;
  std::vector<std::uint64_t> weight;
  if (range == SumRange::symmetric) {
    support.push_back(0);
    weight.push_back(1);
  }
  for (std::int64_t n = 1; n <= r; ++n) {
    support.push_back(ipow_checked(n, degree));
    weight.push_back(range == SumRange::symmetric ? 2 : 1);
  }
  const double span = range == SumRange::symmetric ? 2.0 * r + 1.0 : static_cast<double>(r);
  const auto len = static_cast<std::size_t>(cutoff) + 1;
  std::vector<BigInt> out(len);

  if (s * std::log2(span) < 126.0) {
    std::vector<u128> cur(len, 0), next(len, 0);
    cur[0] = 1;
    std::int64_t hi = 0;  // highest index that can be nonzero
    for (int step = 0; step < s; ++step) {
      std::fill(next.begin(), next.end(), 0);
      for (std::int64_t m = 0; m <= hi; ++m) {
        if (cur[m] == 0) continue;
        for (std::size_t j = 0; j < support.size(); ++j) next[m + support[j]] += cur[m] * weight[j];
      }
      hi += rk;
      cur.swap(next);
    }
    for (std::size_t m = 0; m < len; ++m) {
      BigInt v(static_cast<unsigned long>(static_cast<std::uint64_t>(cur[m] >> 64)));
      v <<= 64;
      out[m] = v + BigInt(static_cast<unsigned long>(static_cast<std::uint64_t>(cur[m])));
    }
    return out;
  }
  std::vector<BigInt> cur(len, BigInt(0)), next(len);
  cur[0] = 1;
  std::int64_t hi = 0;
  for (int step = 0; step < s; ++step) {
    std::fill(next.begin(), next.end(), BigInt(0));
    for (std::int64_t m = 0; m <= hi; ++m) {
      if (sgn(cur[m]) == 0) continue;
      for (std::size_t j = 0; j < support.size(); ++j) {
        mpz_addmul_ui(next[m + support[j]].get_mpz_t(), cur[m].get_mpz_t(), weight[j]);
      }
    }
    hi += rk;
    cur.swap(next);
  }
  return cur;
}

MeanValueReport mean_value_exact(int degree, std::int64_t r, int s, SumRange range, const WorkBound& bound) {
  const auto c = power_sum_counts(degree, r, s, range, bound);
  BigInt total = 0;
  for (const auto& v : c) mpz_addmul(total.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
  const double ratio = total.get_d() / std::pow(static_cast<double>(r), 2.0 * s - degree);
  return {s, degree, r, range, total, ratio};
}

double mean_value_quadrature(int degree, std::int64_t r, int s, std::int64_t nodes, SumRange range) {
  check_range_args(degree, r, s);
  if (nodes < 1) throw DomainError("mean_value_quadrature: nodes >= 1");
  std::vector<std::int64_t> pk(static_cast<std::size_t>(r) + 1);
  for (std::int64_t n = 1; n <= r; ++n) pk[n] = powmod(n, degree, nodes);
  const double w = range == SumRange::symmetric ? 2.0 : 1.0;
  KahanSum acc;
  for (std::int64_t j = 0; j < nodes; ++j) {
    CompensatedSum alpha;
    if (range == SumRange::symmetric) alpha.add(Complex(1.0, 0.0));
    for (std::int64_t n = 1; n <= r; ++n) {
      alpha.add(w * unit_phase(static_cast<double>(mulmod(pk[n], j, nodes)) / static_cast<double>(nodes)));
    }
    acc.add(std::pow(std::norm(alpha.value()), s));
  }
  return acc.value() / static_cast<double>(nodes);
}

namespace {

struct PhaseGrid {
  std::int64_t M;
  std::vector<Complex> roots;
  std::vector<std::int64_t> pk;
};

PhaseGrid phase_grid(int degree, std::int64_t r, int s) {
  const double need = 64.0 * s * std::pow(static_cast<double>(r), degree);
  std::int64_t M = 1024;
  while (static_cast<double>(M) < need) M *= 2;
  PhaseGrid g{M, std::vector<Complex>(static_cast<std::size_t>(M)), std::vector<std::int64_t>(r + 1)};
  for (std::int64_t j = 0; j < M; ++j) g.roots[j] = unit_phase(static_cast<double>(j) / M);
  for (std::int64_t n = 0; n <= r; ++n) g.pk[n] = powmod(n, degree, M);
  return g;
}

// Trapezoid values of int prod_i |alpha_r(t, xi_i)| at M and at M/2 nodes.
std::pair<double, double> product_integral(const PhaseGrid& g, std::int64_t r, std::span<const double> xi) {
  const std::size_t m = xi.size();
  std::vector<double> cosines(m * static_cast<std::size_t>(r + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::int64_t n = 1; n <= r; ++n) {
      const long double ph = static_cast<long double>(n) * xi[i];
      cosines[i * (r + 1) + n] = 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(ph - std::floor(ph)));
    }
  }
  KahanSum all, even;
  std::vector<Complex> base(static_cast<std::size_t>(r) + 1);
  for (std::int64_t j = 0; j < g.M; ++j) {
    for (std::int64_t n = 1; n <= r; ++n) base[n] = g.roots[mulmod(g.pk[n], j, g.M)];
    double prod = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      Complex alpha(1.0, 0.0);
      for (std::int64_t n = 1; n <= r; ++n) alpha += base[n] * cosines[i * (r + 1) + n];
      prod *= std::abs(alpha);
    }
    all.add(prod);
    if (j % 2 == 0) even.add(prod);
  }
  return {all.value() / static_cast<double>(g.M), even.value() / static_cast<double>(g.M / 2)};
}

}  // namespace

LinearPhaseReport remove_linear_phases_at(int degree, std::int64_t r, std::span<const double> xi) {
  if (xi.empty() || xi.size() % 2 != 0) throw DomainError("remove_linear_phases: need 2s frequencies");
  const int s = static_cast<int>(xi.size() / 2);
  check_range_args(degree, r, s);
  const auto g = phase_grid(degree, r, s);
  const double mv = mean_value_exact(degree, r, s).exact_count.get_d();
  const auto [fine, coarse] = product_integral(g, r, xi);
  LinearPhaseReport rep;
  rep.nodes = g.M;
  rep.worst_ratio = fine / mv;
  rep.worst_error_estimate = std::abs(fine - coarse) / mv;
  rep.ratios.push_back(rep.worst_ratio);
  return rep;
}

LinearPhaseReport remove_linear_phases_check(int degree, std::int64_t r, int s, int trials, std::uint64_t seed,
                                             const WorkBound& bound) {
  check_range_args(degree, r, s);
  if (trials < 1) throw DomainError("remove_linear_phases_check: trials >= 1");
  const auto g = phase_grid(degree, r, s);
  bound.check(static_cast<double>(trials) * g.M * 2 * s * r, "remove_linear_phases_check");
  const double mv = mean_value_exact(degree, r, s, SumRange::symmetric, bound).exact_count.get_d();

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> xis(static_cast<std::size_t>(trials), std::vector<double>(2 * s));
  for (auto& v : xis) {
    for (auto& x : v) x = unit_random(rng);
  }
  LinearPhaseReport rep;
  rep.nodes = g.M;
  rep.ratios.assign(static_cast<std::size_t>(trials), 0.0);
  std::vector<double> errs(static_cast<std::size_t>(trials), 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    const auto [fine, coarse] = product_integral(g, r, xis[t]);
    rep.ratios[t] = fine / mv;
    errs[t] = std::abs(fine - coarse) / mv;
  }
  for (int t = 0; t < trials; ++t) {
    if (rep.ratios[t] > rep.worst_ratio) {
      rep.worst_ratio = rep.ratios[t];
      rep.worst_error_estimate = errs[t];
    }
  }
  return rep;
}

BigInt vinogradov_J(int s, int degree, std::int64_t N, const WorkBound& bound) {
  if (s < 1 || degree < 1 || N < 1) throw DomainError("vinogradov_J: s, k, N >= 1");
  bound.check(std::pow(static_cast<double>(N), s + 1) * degree, "vinogradov_J");
  if (static_cast<double>(s) * std::pow(static_cast<double>(N), degree) > 9e18) {
    throw DomainError("vinogradov_J: power sums overflow 64 bits");
  }
  std::vector<std::vector<std::uint64_t>> rows(static_cast<std::size_t>(N) + 1,
                                               std::vector<std::uint64_t>(degree));
  for (std::int64_t n = 1; n <= N; ++n) {
    for (int l = 0; l < degree; ++l) rows[n][l] = static_cast<std::uint64_t>(ipow_checked(n, l + 1));
  }
  std::map<std::vector<std::uint64_t>, BigInt> cur;
  cur.emplace(std::vector<std::uint64_t>(degree, 0), BigInt(1));
  for (int step = 0; step < s; ++step) {
    std::map<std::vector<std::uint64_t>, BigInt> next;
    for (const auto& [key, count] : cur) {
      std::vector<std::uint64_t> k2(key);
      for (std::int64_t n = 1; n <= N; ++n) {
        for (int l = 0; l < degree; ++l) k2[l] = key[l] + rows[n][l];
        next[k2] += count;
      }
    }
    cur.swap(next);
  }
  BigInt total = 0;
  for (const auto& [key, count] : cur) mpz_addmul(total.get_mpz_t(), count.get_mpz_t(), count.get_mpz_t());
  return total;
}

double vinogradov_bound(int s, int degree, std::int64_t N) {
  const double n = static_cast<double>(N);
  return std::pow(n, s) + std::pow(n, 2.0 * s - degree * (degree + 1) / 2.0);
}

BridgeReport vaughan_bridge_check(int degree, std::int64_t r, int s, const WorkBound& bound) {
  BridgeReport rep;
  rep.mean_value = mean_value_exact(degree, r, s, SumRange::positive, bound).exact_count;
  rep.symmetric_mean_value = mean_value_exact(degree, r, s, SumRange::symmetric, bound).exact_count;
  rep.j_value = vinogradov_J(s, degree, r, bound);
  const double scale = std::pow(static_cast<double>(r), degree * (degree - 1) / 2.0) * rep.j_value.get_d();
  rep.ratio = rep.mean_value.get_d() / scale;
  rep.symmetric_ratio = rep.symmetric_mean_value.get_d() / scale;
  return rep;
}

}  // namespace ksphere
