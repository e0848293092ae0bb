#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ksphere/exp_sums.hpp"
#include "oracles.hpp"

using namespace ksphere;

namespace {

// sum e(t |n|^k + xi n) over the given range, term by term in long double
Complex weyl_direct(std::int64_t lo, std::int64_t hi, int k, long double t, long double xi) {
  long double re = 0, im = 0;
  for (std::int64_t n = lo; n <= hi; ++n) {
    long double nk = 1;
    for (int i = 0; i < k; ++i) nk *= std::abs(static_cast<long double>(n));
    long double ph = t * nk + xi * n;
    ph -= std::floor(ph);
    const long double a = 2.0L * std::numbers::pi_v<long double> * ph;
    re += std::cos(a);
    im += std::sin(a);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

// #{tuples in range^(2s) : sum_{i<=s} |n_i|^k = sum_{i>s} |n_i|^k}
std::int64_t tuple_count(int k, std::int64_t r, int s, bool symmetric) {
  std::map<std::int64_t, std::int64_t> c;
  const std::int64_t lo = symmetric ? -r : 1;
  std::vector<std::int64_t> x(s, lo);
  while (true) {
    std::int64_t sum = 0;
    for (auto v : x) sum += oracle::abs_pow(v, k);
    ++c[sum];
    int i = s - 1;
    while (i >= 0 && x[i] == r) x[i--] = lo;
    if (i < 0) break;
    ++x[i];
  }
  std::int64_t total = 0;
  for (const auto& [m, v] : c) total += v * v;
  return total;
}

std::int64_t vinogradov_direct(int s, int k, std::int64_t N) {
  std::map<std::vector<std::int64_t>, std::int64_t> c;
  std::vector<std::int64_t> x(s, 1);
  while (true) {
    std::vector<std::int64_t> key(k, 0);
    for (auto v : x) {
      std::int64_t p = 1;
      for (int j = 0; j < k; ++j) key[j] += (p *= v);
    }
    ++c[key];
    int i = s - 1;
    while (i >= 0 && x[i] == N) x[i--] = 1;
    if (i < 0) break;
    ++x[i];
  }
  std::int64_t total = 0;
  for (const auto& [key, v] : c) total += v * v;
  return total;
}

}  // namespace

TEST_CASE("weyl sum examples") {
  const auto z = weyl_sum({100, 0.0, 0.0, 3}, false);
  CHECK(z.real() == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(std::abs(z.imag()) < 1e-12);
  // sum_{|n|<=5} (-1)^n = -1
  const auto alt = weyl_sum({5, 0.0, 0.5, 2}, true);
  CHECK(alt.real() == doctest::Approx(-1.0));
  CHECK(std::abs(alt.imag()) < 1e-12);
  CHECK(std::abs(weyl_sum_rational(7, 2, 1, 7, 0, 1, false)) == doctest::Approx(std::sqrt(7.0)));
}

TEST_CASE("weyl sums match long double summation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + trial % 3;
    const double t = u(rng), xi = u(rng);
    const std::int64_t N = 50 + 37 * trial;
    const auto a = weyl_sum({N, t, xi, k}, false);
    const auto b = weyl_direct(1, N, k, t, xi);
    CHECK(std::abs(a - b) < 1e-8 * N);
    const auto c = weyl_sum({N / 3, t, xi, k}, true);
    const auto d = weyl_direct(-N / 3, N / 3, k, t, xi);
    CHECK(std::abs(c - d) < 1e-8 * N);
  }
}

TEST_CASE("rational weyl sums") {
  for (std::int64_t q : {3, 5, 8, 12}) {
    for (std::int64_t a = 1; a < q; ++a) {
      const auto z = weyl_sum_rational(40, 3, a, q, 1, 4, false);
      Complex want = 0;
      for (std::int64_t n = 1; n <= 40; ++n) {
        want += oracle::e_frac((a * n * n * n) % q, q) * oracle::e_frac(n, 4);
      }
      CHECK(std::abs(z - want) < 1e-10);
    }
  }
}

TEST_CASE("weyl sum bounds and conjugate symmetry") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double t = std::ldexp(std::floor(std::ldexp(u(rng), 30)), -30);
    const double xi = std::ldexp(std::floor(std::ldexp(u(rng), 30)), -30);
    const auto z = weyl_sum({300, t, xi, 3}, false);
    CHECK(std::abs(z) <= 300.0 + 1e-9);
    const double tm = t == 0.0 ? 0.0 : 1.0 - t, xm = xi == 0.0 ? 0.0 : 1.0 - xi;
    CHECK(std::abs(z - std::conj(weyl_sum({300, tm, xm, 3}, false))) < 1e-9);
  }
}

TEST_CASE("exact phase reduction at large N") {
  // t = 1/2^20 exactly: phases n^2 / 2^20 are recovered exactly modulo 1
  const std::int64_t N = 1'000'000;
  const double t = std::ldexp(1.0, -20);
  const auto z = weyl_sum({N, t, 0.0, 2}, false);
  const auto w = weyl_sum_rational(N, 2, 1, 1 << 20, 0, 1, false);
  CHECK(std::abs(z - w) < 1e-6 * std::sqrt(static_cast<double>(N)));
}

TEST_CASE("sup hypothesis probe") {
  SupProbeOptions o;
  o.length = 10000;
  o.degree = 2;
  o.fractions = {{1, 101}, {0, 1}};
  o.gammas = {0.5};
  const auto rep = sup_hypothesis_probe(o);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) {
    if (row.q == 1) {
      CHECK(row.abs_sum == doctest::Approx(10000.0));
      CHECK(row.ratio[0] == doctest::Approx(1.0).epsilon(1e-3));
    } else {
      CHECK(row.ratio[0] <= 2.0);
      const auto direct = weyl_direct(1, 10000, 2, 1.0L / 101, 0);
      CHECK(row.abs_sum == doctest::Approx(std::abs(direct)).epsilon(1e-9));
    }
  }
  SupProbeOptions o3;
  o3.length = 512;
  o3.degree = 3;
  o3.q_max = 64;
  o3.gammas = {0.25};
  const auto rep3 = sup_hypothesis_probe(o3);
  CHECK(std::isfinite(rep3.worst_ratio[0]));
  CHECK(rep3.worst_log_ratio[0] <= rep3.worst_ratio[0]);
  CHECK(wooley_gamma(3) == doctest::Approx(0.25));
  o3.gammas.clear();
  CHECK_THROWS_AS(sup_hypothesis_probe(o3), DomainError);
}

TEST_CASE("sphere exponential sums") {
  const double zero[3] = {0, 0, 0};
  CHECK(sphere_exponential_sum({2, 3, 9}, zero, SphereSumMethod::direct).real() == doctest::Approx(30.0));
  const double half[3] = {0.5, 0, 0};
  const auto z = sphere_exponential_sum({2, 3, 1}, half, SphereSumMethod::direct);
  CHECK(z.real() == doctest::Approx(2.0));
  CHECK(std::abs(z.imag()) < 1e-12);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k : {2, 3}) {
    for (int d : {2, 3, 4}) {
      for (std::int64_t lam : {4, 17, 36}) {
        const auto pts = oracle::sphere_points(k, d, lam);
        std::vector<double> th(d);
        for (double& v : th) v = u(rng);
        Complex want = 0;
        for (const auto& p : pts) {
          double dot = 0;
          for (int i = 0; i < d; ++i) dot += p[i] * th[i];
          want += oracle::e(dot);
        }
        const SphereSpec spec{k, d, lam};
        CHECK(std::abs(sphere_exponential_sum(spec, th, SphereSumMethod::direct) - want) < 1e-9);
        CHECK(std::abs(sphere_exponential_sum(spec, th, SphereSumMethod::dft_integral) - want) < 1e-8);
      }
    }
  }
}

TEST_CASE("mean values equal tuple counts") {
  for (int k : {2, 3}) {
    for (std::int64_t r = 1; r <= 6; ++r) {
      for (int s = 1; s <= 3; ++s) {
        CAPTURE(k);
        CAPTURE(r);
        CAPTURE(s);
        CHECK(mean_value_exact(k, r, s).exact_count == tuple_count(k, r, s, true));
        CHECK(mean_value_exact(k, r, s, SumRange::positive).exact_count == tuple_count(k, r, s, false));
      }
    }
  }
  CHECK(mean_value_exact(2, 2, 2).exact_count == 129);
}

TEST_CASE("mean value with s=1 counts the symmetric diagonal") {
  // |n|^k = |m|^k iff m = +-n: 1 + 2*2r pairs
  for (std::int64_t r = 1; r <= 20; ++r) CHECK(mean_value_exact(3, r, 1).exact_count == 4 * r + 1);
}

TEST_CASE("mean value quadrature") {
  for (std::int64_t r : {3, 5, 10}) {
    for (int s : {1, 2, 3}) {
      const double exact = mean_value_exact(2, r, s).exact_count.get_d();
      CHECK(mean_value_quadrature(2, r, s, 100000) == doctest::Approx(exact).epsilon(5e-3));
    }
  }
  // the integrand is a trigonometric polynomial of degree 2 s r^k; more nodes than that is exact
  CHECK(mean_value_quadrature(3, 4, 2, 2 * 2 * 64 + 1) == doctest::Approx(mean_value_exact(3, 4, 2).exact_count.get_d()));
  const auto rep = mean_value_exact(3, 8, 9);
  CHECK(rep.bound_ratio > 0.0);
}

TEST_CASE("remove linear phases") {
  const double zeros[4] = {0, 0, 0, 0};
  CHECK(remove_linear_phases_at(3, 4, zeros).worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
  const double halves[2] = {0.5, 0.5};
  CHECK(remove_linear_phases_at(2, 3, halves).worst_ratio <= 1.0 + 1e-6);
  const auto rep = remove_linear_phases_check(3, 4, 2, 50, 11);
  CHECK(rep.worst_ratio <= 1.0 + 1e-6);
  CHECK(rep.ratios.size() == 50);
}

TEST_CASE("vinogradov mean values") {
  for (std::int64_t N : {1, 7, 100, 10000}) {
    for (int k = 1; k <= 4; ++k) CHECK(vinogradov_J(1, k, N) == N);
  }
  CHECK_THROWS_AS(vinogradov_J(1, 5, 10000), DomainError);
  CHECK(vinogradov_J(2, 2, 3) == vinogradov_direct(2, 2, 3));
  CHECK(vinogradov_J(2, 2, 3) == 15);
  for (std::int64_t N : {4, 8, 11}) {
    CHECK(vinogradov_J(3, 2, N) == vinogradov_direct(3, 2, N));
    CHECK(vinogradov_J(2, 3, N) == vinogradov_direct(2, 3, N));
  }
  CHECK(vinogradov_bound(3, 2, 8) == doctest::Approx(512.0 + 512.0));
}

TEST_CASE("bridge between the mean value and J") {
  const auto b = vaughan_bridge_check(2, 5, 1);
  CHECK(b.mean_value == 5);
  CHECK(b.j_value == 5);
  CHECK(b.ratio == doctest::Approx(0.2));
  CHECK(b.symmetric_mean_value == 21);
  for (auto [k, s, r] : {std::tuple{2, 2, 3}, std::tuple{3, 2, 3}, std::tuple{2, 3, 7}}) {
    const auto rep = vaughan_bridge_check(k, r, s);
    CHECK(rep.mean_value == tuple_count(k, r, s, false));
    CHECK(rep.j_value == vinogradov_direct(s, k, r));
    CHECK(rep.ratio <= 4.0);
  }
}

TEST_CASE("exp sums reject bad input") {
  CHECK_THROWS_AS(mean_value_exact(2, 5, 0), DomainError);
  CHECK_THROWS_AS(vinogradov_J(0, 2, 5), DomainError);
  CHECK_THROWS_AS(mean_value_exact(3, 1000, 6, SumRange::symmetric, WorkBound{1e3}), WorkBoundExceeded);
}
