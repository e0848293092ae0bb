#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ksphere/common.hpp"
#include "ksphere/lattice_sphere.hpp"

namespace ksphere {

struct WeylSumParams {
  std::int64_t length = 1;  // N, or the radius r when symmetric
  double t = 0.0;
  double xi = 0.0;
  int degree = 2;
};

/// symmetric=false: sum_{n=1}^N e(t n^k + xi n).
/// symmetric=true:  sum_{|n|<=r} e(|n|^k t + n xi).
/// t n^k is reduced mod 1 exactly (t is read as the dyadic rational it is).
Complex weyl_sum(const WeylSumParams& params, bool symmetric);

/// Same sums at the exact rational point t = a/q, xi = xi_num/xi_den.
Complex weyl_sum_rational(std::int64_t length, int degree, std::int64_t a, std::int64_t q, std::int64_t xi_num,
                          std::int64_t xi_den, bool symmetric);

struct SupProbeOptions {
  std::int64_t length = 1000;
  int degree = 2;
  std::int64_t q_max = 16;
  std::int64_t xi_grid = 1;  // xi = j / xi_grid, 0 <= j < xi_grid
  std::vector<double> gammas;
  /// Explicit (a,q) list; empty means every reduced a/q with q <= q_max plus 0/1.
  std::vector<std::pair<std::int64_t, std::int64_t>> fractions;
};

struct SupProbeRow {
  std::int64_t a, q, xi_num, xi_den;
  double abs_sum;
  std::vector<double> ratio;      // |S| / [N (1/q + 1/N + q/N^k)^gamma]
  std::vector<double> log_ratio;  // ratio / (1 + ln N)
};

struct SupProbeReport {
  std::vector<SupProbeRow> rows;
  std::vector<double> gammas;
  std::vector<double> worst_ratio;
  std::vector<double> worst_log_ratio;
};

/// Wooley's exponent 1 / (2(k-1)(k-2)) for k >= 3.
double wooley_gamma(int degree);

SupProbeReport sup_hypothesis_probe(const SupProbeOptions& opts);

enum class SphereSumMethod { direct, dft_integral };

/// a_r(theta) = sum over the sphere of e(n . theta).
Complex sphere_exponential_sum(const SphereSpec& spec, std::span<const double> theta, SphereSumMethod method);

/// Which integers the one-dimensional sum runs over.
enum class SumRange { symmetric, positive };  // |n| <= r, or 1 <= n <= r

struct MeanValueReport {
  int s, degree;
  std::int64_t r;
  SumRange range;
  BigInt exact_count;
  double bound_ratio;  // exact_count / r^(2s-k)
};

/// Counts of (n_1..n_s) in the range with sum |n_i|^k = m, for m <= s r^k.
std::vector<BigInt> power_sum_counts(int degree, std::int64_t r, int s, SumRange range,
                                     const WorkBound& bound = WorkBound::from_env());

/// int_0^1 |alpha_r(t,0)|^(2s) dt as an exact solution count.
MeanValueReport mean_value_exact(int degree, std::int64_t r, int s, SumRange range = SumRange::symmetric,
                                 const WorkBound& bound = WorkBound::from_env());

/// Trapezoid rule with `nodes` equispaced points for the same integral.
double mean_value_quadrature(int degree, std::int64_t r, int s, std::int64_t nodes,
                             SumRange range = SumRange::symmetric);

struct LinearPhaseReport {
  double worst_ratio = 0.0;
  double worst_error_estimate = 0.0;  // |I_M - I_{M/2}| at the worst trial, relative to the mean value
  std::int64_t nodes = 0;
  std::vector<double> ratios;
};

/// For random xi_1..xi_2s, the ratio int prod |alpha_r(t,xi_i)| dt / int |alpha_r(t,0)|^(2s) dt.
LinearPhaseReport remove_linear_phases_check(int degree, std::int64_t r, int s, int trials, std::uint64_t seed,
                                             const WorkBound& bound = WorkBound::from_env());
/// The same ratio for one caller-supplied xi vector of length 2s.
LinearPhaseReport remove_linear_phases_at(int degree, std::int64_t r, std::span<const double> xi);

/// #{n, m in [1,N]^s : sum n_i^l = sum m_i^l for l = 1..k}.
BigInt vinogradov_J(int s, int degree, std::int64_t N, const WorkBound& bound = WorkBound::from_env());

/// N^s + N^(2s - k(k+1)/2).
double vinogradov_bound(int s, int degree, std::int64_t N);

struct BridgeReport {
  BigInt mean_value;           // one-sided range [1,r]
  BigInt j_value;              // J_{s,k}(r)
  double ratio;                // mean_value / (r^(k(k-1)/2) J)
  BigInt symmetric_mean_value; // range |n| <= r, for reference
  double symmetric_ratio;
};

BridgeReport vaughan_bridge_check(int degree, std::int64_t r, int s, const WorkBound& bound = WorkBound::from_env());

}  // namespace ksphere
