#include "ksphere/numeric.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace ksphere {

WorkBound WorkBound::from_env() {
  double limit = 4e9;
  if (const char* env = std::getenv("KSPHERE_WORK_BOUND")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0) limit = v;
  }
  return WorkBound{limit};
}

void WorkBound::check(double work, const std::string& what) const {
  if (work > limit) {
    throw WorkBoundExceeded(what + ": estimated work " + std::to_string(work) +
                            " exceeds bound " + std::to_string(limit));
  }
}

std::string to_string(const BigInt& v) { return v.get_str(); }

DyadicPhase::DyadicPhase(double t) : value_(t) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("DyadicPhase: t must lie in [0,1)");
  if (t == 0.0) return;
  int e = 0;
  const double f = std::frexp(t, &e);  // t = f * 2^e, f in [0.5, 1)
  mantissa_ = static_cast<std::uint64_t>(std::ldexp(f, 53));
  shift_ = 53 - e;
  while ((mantissa_ & 1u) == 0 && shift_ > 0) {
    mantissa_ >>= 1;
    --shift_;
  }
}

static long double u128_to_ld(unsigned __int128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  return std::ldexp(static_cast<long double>(hi), 64) + static_cast<long double>(lo);
}

long double DyadicPhase::times(unsigned __int128 m) const {
  if (mantissa_ == 0) return 0.0L;
  if (shift_ <= 127) {
    unsigned __int128 prod = m * static_cast<unsigned __int128>(mantissa_);
    prod &= (static_cast<unsigned __int128>(1) << shift_) - 1;
    return std::ldexp(u128_to_ld(prod), -shift_);
  }
  // Tiny t: exact reduction through GMP.
  mpz_class big(static_cast<unsigned long>(static_cast<std::uint64_t>(m >> 64)));
  big <<= 64;
  big += mpz_class(static_cast<unsigned long>(static_cast<std::uint64_t>(m)));
  big *= mpz_class(static_cast<unsigned long>(mantissa_));
  mpz_class rem;
  mpz_tdiv_r_2exp(rem.get_mpz_t(), big.get_mpz_t(), static_cast<mp_bitcnt_t>(shift_));
  long exp2 = 0;
  const double d = mpz_get_d_2exp(&exp2, rem.get_mpz_t());
  return std::ldexp(static_cast<long double>(d), static_cast<int>(exp2) - shift_);
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t iroot(std::int64_t m, int k) {
  if (m < 0 || k < 1) throw DomainError("iroot: need m >= 0, k >= 1");
  if (m < 2 || k == 1) return m;
  auto r = static_cast<std::int64_t>(std::pow(static_cast<double>(m), 1.0 / k));
  auto pow_le = [&](std::int64_t x) {
    // true when x^k <= m, computed without overflow
    __int128 acc = 1;
    for (int i = 0; i < k; ++i) {
      acc *= x;
      if (acc > m) return false;
    }
    return true;
  };
  while (r > 0 && !pow_le(r)) --r;
  while (pow_le(r + 1)) ++r;
  return r;
}

std::int64_t ipow_checked(std::int64_t m, int k) {
  __int128 acc = 1;
  for (int i = 0; i < k; ++i) {
    acc *= m;
    if (acc > std::numeric_limits<std::int64_t>::max() ||
        acc < std::numeric_limits<std::int64_t>::min()) {
      throw DomainError("integer power overflows 64 bits");
    }
  }
  return static_cast<std::int64_t>(acc);
}

std::int64_t powmod(std::int64_t b, int e, std::int64_t q) {
  if (q == 1) return 0;
  __int128 base = ((b % q) + q) % q;
  __int128 acc = 1;
  while (e > 0) {
    if (e & 1) acc = acc * base % q;
    base = base * base % q;
    e >>= 1;
  }
  return static_cast<std::int64_t>(acc);
}

std::vector<std::int64_t> first_primes(std::size_t count) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = 2; out.size() < count; ++n) {
    bool prime = true;
    for (std::int64_t p : out) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(n);
  }
  return out;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("least_squares: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw DomainError("least_squares: x values are all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, x.size()};
}

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw DomainError("gauss_legendre_unit: n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess
    long double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    long double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = 0;
      for (int j = 1; j <= n; ++j) {
        const long double p2 = p1;
        p1 = p0;
        p0 = ((2.0L * j - 1) * z * p1 - (j - 1.0L) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const long double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    {
      long double p0 = 1, p1 = 0;
      for (int j = 1; j <= n; ++j) {
        const long double p2 = p1;
        p1 = p0;
        p0 = ((2.0L * j - 1) * z * p1 - (j - 1.0L) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
    }
    const long double w = 2.0L / ((1 - z * z) * dp * dp);
    // map [-1,1] -> [0,1]
    nodes[i] = static_cast<double>((1 - z) / 2);
    nodes[n - 1 - i] = static_cast<double>((1 + z) / 2);
    weights[i] = weights[n - 1 - i] = static_cast<double>(w / 2);
  }
}

}  // namespace ksphere
