#include <doctest.h>

#include <cmath>
#include <random>

#include "ksphere/gauss_sums.hpp"
#include "ksphere/kernels.hpp"
#include "oracles.hpp"

using namespace ksphere;

TEST_CASE("one dimensional gauss sums") {
  CHECK(std::abs(gauss_sum_1d(1, 1, 2, 0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(gauss_sum_1d(1, 2, 2, 0)) < 1e-15);
  // b^3 = b mod 3, so the sum is the full character sum over Z/3
  CHECK(std::abs(gauss_sum_1d(1, 3, 3, 0)) < 1e-15);
  for (std::int64_t q : {5, 9, 12, 16, 35}) {
    for (std::int64_t a = 1; a < q; ++a) {
      if (oracle::gcd(a, q) != 1) continue;
      for (int k : {2, 3, 4}) {
        for (std::int64_t m : {0, 1, 4, -3, 17}) {
          CHECK(std::abs(gauss_sum_1d(a, q, k, m) - oracle::gauss(a, q, k, m)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("multi dimensional gauss sums are products") {
  const std::int64_t m[2] = {1, 2};
  const auto want = oracle::gauss(1, 5, 2, 1) * oracle::gauss(1, 5, 2, 2);
  CHECK(std::abs(gauss_sum_dd(1, 5, 2, m) - want) < 1e-12);
  const std::int64_t zeros[4] = {0, 0, 0, 0};
  CHECK(std::abs(gauss_sum_dd(2, 7, 3, zeros) - std::pow(oracle::gauss(2, 7, 3, 0), 4)) < 1e-12);
  CHECK(std::abs(gauss_sum_dd(1, 1, 3, zeros) - Complex(1, 0)) < 1e-15);
}

TEST_CASE("gauss sum symmetries") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t q = 2 + static_cast<std::int64_t>(rng() % 60);
    std::int64_t a = 1 + static_cast<std::int64_t>(rng() % (q - 1));
    while (oracle::gcd(a, q) != 1) a = 1 + static_cast<std::int64_t>(rng() % (q - 1));
    const int k = 2 + static_cast<int>(rng() % 3);
    const std::int64_t m = static_cast<std::int64_t>(rng() % 200) - 100;
    const auto g = gauss_sum_1d(a, q, k, m);
    CHECK(std::abs(g) <= 1.0 + 1e-12);
    CHECK(std::abs(g - gauss_sum_1d(a, q, k, ((m % q) + q) % q)) < 1e-12);
    CHECK(std::abs(gauss_sum_1d(q - a, q, k, -m) - std::conj(g)) < 1e-12);
  }
}

TEST_CASE("quadratic gauss sums at odd primes") {
  for (std::int64_t p : {3, 5, 7, 11, 13, 101, 499}) {
    for (std::int64_t a : {1, 2}) {
      CHECK(std::abs(gauss_sum_1d(a, p, 2, 0)) == doctest::Approx(1.0 / std::sqrt(static_cast<double>(p))).epsilon(1e-10));
    }
  }
}

TEST_CASE("gauss profile matches an exhaustive scan") {
  const auto prof = gauss_profile(3, 40);
  for (std::int64_t q = 1; q <= 40; ++q) {
    double best = 0.0;
    for (std::int64_t a = 1; a <= q; ++a) {
      if (oracle::gcd(a, q) != 1) continue;
      for (std::int64_t m = 0; m < q; ++m) best = std::max(best, std::abs(oracle::gauss(a, q, 3, m)));
    }
    CAPTURE(q);
    CHECK(prof[q] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("gauss profile kernels agree") {
  for (int k : {2, 3, 5}) CHECK(kernels::gauss_profile_serial(k, 120) == kernels::gauss_profile_omp(k, 120));
}

TEST_CASE("steckin fits") {
  const auto p2 = gauss_profile(2, 500), p3 = gauss_profile(3, 500);
  for (int d = 1; d <= 5; ++d) {
    CHECK(steckin_fit(p2, 2, d).slope <= -d / 2.0 + 0.1);
    CHECK(steckin_fit(p3, 3, d).slope <= -d / 3.0 + 0.1);
  }
  const auto rep = steckin_fit(2, 1, 100);
  CHECK(rep.slope == doctest::Approx(-0.5).epsilon(0.05));
  CHECK(rep.max_abs.size() == 101);
  CHECK(rep.constant >= 1.0);
  CHECK_THROWS_AS(steckin_fit(2, 1, 1), DomainError);
}

TEST_CASE("chinese remainder multiplicativity") {
  const std::int64_t zero[1] = {0};
  CHECK(multiplicativity_check(7, 1, 2, 1, 5, 1) < 1e-15);
  CHECK(multiplicativity_check(3, 4, 2, 1, 1, 1, zero) <= 1e-12);
  CHECK(multiplicativity_check(5, 7, 3, 2, 20, 4) <= 1e-10);
  CHECK_THROWS_AS(multiplicativity_check(4, 6, 2, 1, 3, 1), DomainError);

  // independent oracle: G(a, q1 q2; m) = G(a q2^(k-1), q1; m) G(a q1^(k-1), q2; m)
  for (auto [q1, q2] : {std::pair<std::int64_t, std::int64_t>{3, 8}, {5, 9}, {4, 25}}) {
    const std::int64_t q = q1 * q2;
    for (std::int64_t a = 1; a < q; a += 7) {
      if (oracle::gcd(a, q) != 1) continue;
      for (std::int64_t m : {0, 1, 5}) {
        const auto lhs = oracle::gauss(a, q, 3, m);
        const auto rhs = oracle::gauss(a * q2 * q2 % q1, q1, 3, m) * oracle::gauss(a * q1 * q1 % q2, q2, 3, m);
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("singular series") {
  CHECK(std::abs(singular_series_partial(2, 5, 7, 1, 1.0).value - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(singular_series_partial(2, 5, 1, 2, 1.0).value - Complex(1, 0)) < 1e-12);

  // direct evaluation of sum_{q<=Q} sum_{a in U(q)} e(-a lambda/q) G(a,q;0)^d
  const std::int64_t lambda = 13;
  Complex want = 0;
  for (std::int64_t q = 1; q <= 12; ++q) {
    for (std::int64_t a = 1; a <= q; ++a) {
      if (oracle::gcd(a, q) != 1) continue;
      want += oracle::e_frac(-a * lambda, q) * std::pow(oracle::gauss(a, q, 2, 0), 5);
    }
  }
  const auto rep = singular_series_partial(2, 5, lambda, 12, 1.0);
  CHECK(std::abs(rep.value - want) < 1e-12);
  CHECK(rep.partial.size() == 13);

  // Cauchy differences shrink with Q
  const auto big = singular_series_partial(2, 5, 100, 256);
  const double early = std::abs(big.partial[32] - big.partial[16]);
  const double late = std::abs(big.partial[256] - big.partial[128]);
  CHECK(late < early);
  CHECK(std::isfinite(big.tail_bound));
  CHECK(std::isinf(singular_series_partial(2, 4, 100, 16, 1.0).tail_bound));
}
