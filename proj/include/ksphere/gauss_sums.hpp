#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ksphere/common.hpp"

namespace ksphere {

/// G(a,q;m) = q^-1 sum_{b mod q} e((a b^k + b m)/q). Requires gcd(a,q) = 1.
Complex gauss_sum_1d(std::int64_t a, std::int64_t q, int degree, std::int64_t m);

/// Product of gauss_sum_1d over the coordinates of m.
Complex gauss_sum_dd(std::int64_t a, std::int64_t q, int degree, std::span<const std::int64_t> m);

/// out[q] = max over a in U(q), m in Z/q of |G(a,q;m)| (one dimension), q = 1..q_max.
std::vector<double> gauss_profile(int degree, std::int64_t q_max);

struct SteckinReport {
  double slope;              // least squares of log max|G| against log q
  double intercept;
  double constant;           // max_q max|G| q^(d/k)
  std::int64_t worst_q;      // where the constant is attained
  std::vector<double> max_abs;  // max|G| in d dimensions, index q (entry 0 unused)
};

/// Fit over q = 1..q_max; q_max < 16 is rejected as an insufficient range.
SteckinReport steckin_fit(int degree, int dimension, std::int64_t q_max);
/// Same fit from a precomputed one-dimensional profile (gauss_profile output).
SteckinReport steckin_fit(std::span<const double> profile, int degree, int dimension);

/// Max |G(a,q1 q2;m) - G(a q2^(k-1),q1;m) G(a q1^(k-1),q2;m)| over random units a and
/// random m in (Z/q1q2)^d, or over the given m when fixed_m is nonempty.
double multiplicativity_check(std::int64_t q1, std::int64_t q2, int degree, int dimension, int trials,
                              std::uint64_t seed, std::span<const std::int64_t> fixed_m = {});

struct SingularSeriesReport {
  Complex value;
  double tail_bound;        // C sum_{q>Q} q^(1-d/k), infinite when d/k <= 2
  double steckin_constant;  // C used for the tail
  std::vector<Complex> partial;  // running sums, index q
};

/// sum_{q<=Q} sum_{a in U(q)} e(-a lambda/q) G(a,q;0)^d.
SingularSeriesReport singular_series_partial(int degree, int dimension, std::int64_t lambda, std::int64_t Q,
                                             double steckin_constant);
/// Same, with the Stečkin constant fitted over q <= max(Q, 64).
SingularSeriesReport singular_series_partial(int degree, int dimension, std::int64_t lambda, std::int64_t Q);

}  // namespace ksphere
