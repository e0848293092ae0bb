#pragma once

// Naive reference computations used as independent oracles. Nothing here
// calls into the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline std::int64_t ipow(std::int64_t b, int k) {
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r *= b;
  return r;
}

inline std::int64_t abs_pow(std::int64_t n, int k) { return ipow(n < 0 ? -n : n, k); }

/// Calls f(point) for every point of [-R, R]^d.
template <class F>
void for_cube(int d, std::int64_t R, F&& f) {
  std::vector<std::int64_t> x(d, -R);
  while (true) {
    f(x);
    int i = d - 1;
    while (i >= 0 && x[i] == R) x[i--] = -R;
    if (i < 0) return;
    ++x[i];
  }
}

inline std::int64_t max_coord(std::int64_t lambda, int k) {
  std::int64_t R = 0;
  while (ipow(R + 1, k) <= lambda) ++R;
  return R;
}

/// All lattice points with sum |x_i|^k == lambda, lexicographic.
inline std::vector<std::vector<std::int64_t>> sphere_points(int k, int d, std::int64_t lambda) {
  std::vector<std::vector<std::int64_t>> out;
  for_cube(d, max_coord(lambda, k), [&](const std::vector<std::int64_t>& x) {
    std::int64_t s = 0;
    for (auto v : x) s += abs_pow(v, k);
    if (s == lambda) out.push_back(x);
  });
  return out;
}

inline std::int64_t sphere_count(int k, int d, std::int64_t lambda) {
  std::int64_t c = 0;
  for_cube(d, max_coord(lambda, k), [&](const std::vector<std::int64_t>& x) {
    std::int64_t s = 0;
    for (auto v : x) s += abs_pow(v, k);
    if (s == lambda) ++c;
  });
  return c;
}

inline cplx e(double x) {
  const double a = 2.0 * std::numbers::pi * x;
  return {std::cos(a), std::sin(a)};
}

/// e(p/q) with p reduced modulo q in integers first.
inline cplx e_frac(std::int64_t p, std::int64_t q) {
  p %= q;
  if (p < 0) p += q;
  return e(static_cast<double>(p) / static_cast<double>(q));
}

/// q^-1 sum_{b mod q} e((a b^k + b m)/q), term by term.
inline cplx gauss(std::int64_t a, std::int64_t q, int k, std::int64_t m) {
  cplx s = 0;
  for (std::int64_t b = 0; b < q; ++b) {
    std::int64_t bk = 1;
    for (int i = 0; i < k; ++i) bk = (bk * b) % q;
    s += e_frac(a * bk + b * m, q);
  }
  return s / static_cast<double>(q);
}

inline std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    const auto t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace oracle
