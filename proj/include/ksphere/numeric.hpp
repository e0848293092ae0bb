#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ksphere/common.hpp"

namespace ksphere {

/// e(x) = exp(2 pi i x). The argument should already be reduced to [0,1) or
/// close to it; large arguments lose phase accuracy.
inline Complex unit_phase(double x) {
  const double a = 2.0 * std::numbers::pi * x;
  return {std::cos(a), std::sin(a)};
}

/// Neumaier-compensated complex accumulator.
class CompensatedSum {
 public:
  void add(Complex z) {
    add_part(re_, re_c_, z.real());
    add_part(im_, im_c_, z.imag());
  }
  Complex value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_part(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

/// Real Neumaier accumulator.
class KahanSum {
 public:
  void add(double x) {
    const double t = s_ + x;
    if (std::abs(s_) >= std::abs(x)) {
      c_ += (s_ - t) + x;
    } else {
      c_ += (x - t) + s_;
    }
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

/// A double in [0,1) viewed as the exact dyadic rational mantissa / 2^shift.
/// Products with large integers are reduced modulo 1 exactly, so phases like
/// t * n^k stay accurate for n^k far beyond 2^53.
class DyadicPhase {
 public:
  explicit DyadicPhase(double t);

  /// frac(t * m) for a nonnegative integer m, accurate to long double.
  long double times(unsigned __int128 m) const;

 private:
  double value_;
  std::uint64_t mantissa_ = 0;
  int shift_ = 0;
};

std::int64_t gcd64(std::int64_t a, std::int64_t b);

/// Exact floor(m^(1/k)) for m >= 0.
std::int64_t iroot(std::int64_t m, int k);

/// m^k, throwing DomainError on overflow of int64.
std::int64_t ipow_checked(std::int64_t m, int k);

/// b^e mod q with 128-bit intermediates; q >= 1.
std::int64_t powmod(std::int64_t b, int e, std::int64_t q);

/// First `count` primes.
std::vector<std::int64_t> first_primes(std::size_t count);

struct LinearFit {
  double slope;
  double intercept;
  std::size_t points;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace ksphere
