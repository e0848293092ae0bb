#include "ksphere/gauss_sums.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "ksphere/kernels.hpp"
#include "ksphere/numeric.hpp"

namespace ksphere {

namespace {

void check_unit(std::int64_t a, std::int64_t q) {
  if (q < 1) throw DomainError("gauss sum: q >= 1");
  if (gcd64(a, q) != 1) throw DomainError("gauss sum: gcd(a,q) must be 1");
}

Complex gauss_1d_unchecked(std::int64_t a, std::int64_t q, int degree, std::int64_t m) {
  const std::int64_t ar = ((a % q) + q) % q;
  const std::int64_t mr = ((m % q) + q) % q;
  CompensatedSum acc;
  for (std::int64_t b = 0; b < q; ++b) {
    const auto res = static_cast<std::int64_t>(
        (static_cast<__int128>(ar) * powmod(b, degree, q) + static_cast<__int128>(b) * mr) % q);
    acc.add(unit_phase(static_cast<double>(res) / static_cast<double>(q)));
  }
  return acc.value() / static_cast<double>(q);
}

}  // namespace

Complex gauss_sum_1d(std::int64_t a, std::int64_t q, int degree, std::int64_t m) {
  check_unit(a, q);
  if (degree < 1) throw DomainError("gauss sum: degree >= 1");
  return gauss_1d_unchecked(a, q, degree, m);
}

Complex gauss_sum_dd(std::int64_t a, std::int64_t q, int degree, std::span<const std::int64_t> m) {
  check_unit(a, q);
  if (m.empty()) throw DomainError("gauss_sum_dd: empty frequency vector");
  Complex prod(1.0, 0.0);
  for (std::int64_t mi : m) prod *= gauss_1d_unchecked(a, q, degree, mi);
  return prod;
}

std::vector<double> gauss_profile(int degree, std::int64_t q_max) { return kernels::gauss_profile_omp(degree, q_max); }

SteckinReport steckin_fit(int degree, int dimension, std::int64_t q_max) {
  if (degree < 1 || dimension < 1) throw DomainError("steckin_fit: degree, dimension >= 1");
  if (q_max < 16) throw DomainError("steckin_fit: insufficient range (need q_max >= 16)");
  const auto prof = gauss_profile(degree, q_max);
  return steckin_fit(prof, degree, dimension);
}

SteckinReport steckin_fit(std::span<const double> prof, int degree, int dimension) {
  if (degree < 1 || dimension < 1) throw DomainError("steckin_fit: degree, dimension >= 1");
  if (prof.size() < 17) throw DomainError("steckin_fit: insufficient range (need q_max >= 16)");
  const auto q_max = static_cast<std::int64_t>(prof.size()) - 1;
  const double e = static_cast<double>(dimension) / degree;
  SteckinReport rep{0, 0, 0, 1, std::vector<double>(prof.size(), 0.0)};
  std::vector<double> lx, ly;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const double v = std::pow(prof[q], dimension);
    rep.max_abs[q] = v;
    const double c = v * std::pow(static_cast<double>(q), e);
    if (c > rep.constant) {
      rep.constant = c;
      rep.worst_q = q;
    }
    lx.push_back(std::log(static_cast<double>(q)));
    ly.push_back(std::log(v));
  }
  const auto fit = least_squares(lx, ly);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  return rep;
}

double multiplicativity_check(std::int64_t q1, std::int64_t q2, int degree, int dimension, int trials,
                              std::uint64_t seed, std::span<const std::int64_t> fixed_m) {
  if (q1 < 1 || q2 < 1 || gcd64(q1, q2) != 1) throw DomainError("multiplicativity_check: moduli must be coprime");
  if (dimension < 1 || trials < 1) throw DomainError("multiplicativity_check: dimension, trials >= 1");
  if (!fixed_m.empty() && fixed_m.size() != static_cast<std::size_t>(dimension)) {
    throw DomainError("multiplicativity_check: m has wrong length");
  }
  const std::int64_t q = q1 * q2;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::vector<std::int64_t> m(static_cast<std::size_t>(dimension));
  for (int t = 0; t < trials; ++t) {
    std::int64_t a = 1;
    if (q > 1) {
      do {
        a = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q));
      } while (gcd64(a, q) != 1);
    }
    for (int i = 0; i < dimension; ++i) {
      m[i] = fixed_m.empty() ? static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q)) : fixed_m[i];
    }
    const std::int64_t a1 = static_cast<std::int64_t>(static_cast<__int128>(a) * powmod(q2, degree - 1, q1) % q1);
    const std::int64_t a2 = static_cast<std::int64_t>(static_cast<__int128>(a) * powmod(q1, degree - 1, q2) % q2);
    const Complex lhs = gauss_sum_dd(a, q, degree, m);
    const Complex rhs = gauss_sum_dd(q1 == 1 ? 1 : a1, q1, degree, m) * gauss_sum_dd(q2 == 1 ? 1 : a2, q2, degree, m);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

SingularSeriesReport singular_series_partial(int degree, int dimension, std::int64_t lambda, std::int64_t Q,
                                             double steckin_constant) {
  if (degree < 1 || dimension < 1) throw DomainError("singular_series_partial: degree, dimension >= 1");
  if (Q < 1) throw DomainError("singular_series_partial: Q >= 1");
  if (lambda < 0) throw DomainError("singular_series_partial: lambda >= 0");
  WorkBound::from_env().check(static_cast<double>(Q) * Q * Q / 3.0, "singular_series_partial");
  SingularSeriesReport rep;
  rep.steckin_constant = steckin_constant;
  rep.partial.assign(static_cast<std::size_t>(Q) + 1, Complex(0.0, 0.0));
  std::vector<std::int64_t> cnt;
  std::vector<Complex> terms(static_cast<std::size_t>(Q) + 1, Complex(0.0, 0.0));
#pragma omp parallel for schedule(dynamic, 1) private(cnt)
  for (std::int64_t q = 1; q <= Q; ++q) {
    // residue histogram of b^k mod q turns each G(a,q;0) into a sum over residues
    cnt.assign(static_cast<std::size_t>(q), 0);
    for (std::int64_t b = 0; b < q; ++b) ++cnt[powmod(b, degree, q)];
    CompensatedSum sq;
    const std::int64_t lam = lambda % q;
    for (std::int64_t a = 0; a < q; ++a) {
      if (gcd64(a, q) != 1) continue;
      CompensatedSum g;
      for (std::int64_t r = 0; r < q; ++r) {
        if (cnt[r] == 0) continue;
        const auto res = static_cast<std::int64_t>(static_cast<__int128>(a) * r % q);
        g.add(static_cast<double>(cnt[r]) * unit_phase(static_cast<double>(res) / static_cast<double>(q)));
      }
      const Complex G = g.value() / static_cast<double>(q);
      const auto ph = static_cast<std::int64_t>((q - static_cast<__int128>(a) * lam % q) % q);
      sq.add(unit_phase(static_cast<double>(ph) / static_cast<double>(q)) * std::pow(G, dimension));
    }
    terms[q] = sq.value();
  }
  CompensatedSum run;
  for (std::int64_t q = 1; q <= Q; ++q) {
    run.add(terms[q]);
    rep.partial[q] = run.value();
  }
  rep.value = rep.partial[Q];
  const double e = static_cast<double>(dimension) / degree;
  rep.tail_bound = e > 2.0 ? steckin_constant * std::pow(static_cast<double>(Q), 2.0 - e) / (e - 2.0)
                           : std::numeric_limits<double>::infinity();
  return rep;
}

SingularSeriesReport singular_series_partial(int degree, int dimension, std::int64_t lambda, std::int64_t Q) {
  const auto fit = steckin_fit(degree, dimension, std::max<std::int64_t>(Q, 64));
  return singular_series_partial(degree, dimension, lambda, Q, fit.constant);
}

}  // namespace ksphere
