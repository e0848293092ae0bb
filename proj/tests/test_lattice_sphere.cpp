#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ksphere/kernels.hpp"
#include "ksphere/lattice_sphere.hpp"
#include "ksphere/numeric.hpp"
#include "oracles.hpp"

using namespace ksphere;

namespace {

std::vector<std::vector<std::int64_t>> as_vectors(const PointSet& p) {
  std::vector<std::vector<std::int64_t>> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.emplace_back(p[i].begin(), p[i].end());
  return out;
}

}  // namespace

TEST_CASE("count_points small cases") {
  for (auto m : {CountMethod::brute, CountMethod::series, CountMethod::mitm}) {
    CHECK(count_points({2, 5, 0}, m) == 1);
    CHECK(count_points({3, 4, 1}, m) == 8);
    CHECK(count_points({2, 4, 4}, m) == 24);
    CHECK(count_points({2, 3, 7}, m) == 0);
  }
  CHECK(oracle::sphere_count(2, 4, 4) == 24);
}

TEST_CASE("count methods agree with the cube scan") {
  for (int k : {2, 3}) {
    for (int d = 1; d <= 4; ++d) {
      for (std::int64_t lam = 0; lam <= 60; ++lam) {
        const auto want = oracle::sphere_count(k, d, lam);
        CAPTURE(k);
        CAPTURE(d);
        CAPTURE(lam);
        CHECK(count_points({k, d, lam}, CountMethod::brute) == want);
        CHECK(count_points({k, d, lam}, CountMethod::series) == want);
        CHECK(count_points({k, d, lam}, CountMethod::mitm) == want);
      }
    }
  }
}

TEST_CASE("count_sweep matches single counts") {
  for (auto m : {CountMethod::brute, CountMethod::series, CountMethod::mitm}) {
    const auto sweep = count_sweep(3, 5, 300, m);
    REQUIRE(sweep.size() == 301);
    for (std::int64_t lam : {0, 1, 2, 9, 16, 65, 129, 250, 300}) {
      CHECK(sweep[lam] == count_points({3, 5, lam}, CountMethod::series));
    }
  }
}

TEST_CASE("enumerate_points examples") {
  CHECK(as_vectors(enumerate_points({2, 2, 1})) ==
        std::vector<std::vector<std::int64_t>>{{-1, 0}, {0, -1}, {0, 1}, {1, 0}});
  const auto p = enumerate_points({3, 3, 2});
  CHECK(p.size() == 12);
  CHECK(as_vectors(p) == oracle::sphere_points(3, 3, 2));
  CHECK(enumerate_points({2, 3, 7}).empty());
}

TEST_CASE("enumeration is lexicographic and matches the cube scan") {
  for (int k : {2, 3, 4}) {
    for (std::int64_t lam : {1, 5, 17, 34, 50}) {
      CHECK(as_vectors(enumerate_points({k, 3, lam})) == oracle::sphere_points(k, 3, lam));
    }
  }
}

TEST_CASE("sphere point sets are closed under signs and permutations") {
  const auto pts = as_vectors(enumerate_points({2, 4, 30}));
  const std::set<std::vector<std::int64_t>> all(pts.begin(), pts.end());
  std::map<std::vector<std::int64_t>, std::int64_t> orbit_sizes;
  for (auto p : pts) {
    auto q = p;
    q[0] = -q[0];
    CHECK(all.count(q) == 1);
    std::swap(q[1], q[3]);
    CHECK(all.count(q) == 1);
    std::vector<std::int64_t> key;
    for (auto v : p) key.push_back(v < 0 ? -v : v);
    std::sort(key.begin(), key.end());
    ++orbit_sizes[key];
  }
  // each orbit has (number of distinct arrangements) * 2^(nonzero) elements
  for (const auto& [rep, size] : orbit_sizes) {
    std::int64_t perms = 24;
    std::map<std::int64_t, int> mult;
    for (auto v : rep) ++mult[v];
    for (const auto& [v, m] : mult) {
      for (int i = 2; i <= m; ++i) perms /= i;
    }
    std::int64_t signs = 1;
    for (auto v : rep) signs *= v ? 2 : 1;
    CHECK(size == perms * signs);
  }
}

TEST_CASE("one dimensional series") {
  const auto s = one_dim_series(2, 4);
  REQUIRE(s.coeffs.size() == 5);
  CHECK(s[0] == 1);
  CHECK(s[1] == 2);
  CHECK(s[2] == 0);
  CHECK(s[3] == 0);
  CHECK(s[4] == 2);
  const auto c = one_dim_series(3, 8);
  for (std::int64_t m = 0; m <= 8; ++m) {
    const int want = m == 0 ? 1 : (m == 1 || m == 8) ? 2 : 0;
    CHECK(c[m] == want);
  }
  CHECK(one_dim_series(2, 0).coeffs.size() == 1);
}

TEST_CASE("series convolution") {
  const auto s = one_dim_series(2, 4);
  auto acc = s;
  for (int i = 0; i < 3; ++i) acc = convolve_series(acc, s);
  CHECK(acc[4] == 24);
  CHECK(power_series(one_dim_series(2, 1), 5)[1] == 10);

  CoefficientSeries delta{4, std::vector<BigInt>(5, 0)};
  delta.coeffs[0] = 1;
  const auto id = convolve_series(s, delta);
  CHECK(id.coeffs == s.coeffs);

  const auto a = one_dim_series(2, 40), b = one_dim_series(3, 40), c = power_series(one_dim_series(2, 40), 2);
  CHECK(convolve_series(a, b).coeffs == convolve_series(b, a).coeffs);
  CHECK(convolve_series(convolve_series(a, b), c).coeffs == convolve_series(a, convolve_series(b, c)).coeffs);
}

TEST_CASE("representable mask agrees with the cube scan") {
  for (int k : {2, 3}) {
    for (int d = 1; d <= 4; ++d) {
      const auto mask = representable_mask(k, d, 120);
      for (std::int64_t m = 0; m <= 120; ++m) CHECK(mask[m] == (oracle::sphere_count(k, d, m) > 0));
    }
  }
}

TEST_CASE("acceptable radii") {
  CHECK(acceptable_radii(2, 3, 8).members == std::vector<std::int64_t>{1, 2, 3, 4, 5, 6, 8});
  CHECK(acceptable_radii(2, 5, 10).members == std::vector<std::int64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(acceptable_radii(3, 4, 1).members == std::vector<std::int64_t>{1});
  CHECK(is_acceptable({2, 3, 6}));
  CHECK_FALSE(is_acceptable({2, 3, 7}));
  CHECK_FALSE(is_acceptable({2, 3, 28}));
}

TEST_CASE("build_sequence") {
  CHECK(build_sequence(Lacunary{2.0}, 2, 5, 64).members == std::vector<std::int64_t>{1, 2, 4, 8, 16, 32, 64});
  CHECK(build_sequence(CustomSequence{{5, 13}}, 2, 2, 100).members == std::vector<std::int64_t>{5, 13});
  const auto sup = build_sequence(Superlacunary{1.5}, 2, 5, 1'000'000);
  REQUIRE(!sup.members.empty());
  CHECK(sup.members[0] == 7);
  // h(2) = floor(2^(2^1.5)) = 7, product of the first 7 primes
  CHECK(sup.members == std::vector<std::int64_t>{7, 1 + 2 * 3 * 5 * 7 * 11 * 13 * 17});
  CHECK_THROWS_AS(build_sequence(CustomSequence{{7}}, 2, 3, 100), DomainError);
  CHECK_THROWS_AS(build_sequence(Lacunary{1.0}, 2, 3, 100), DomainError);
}

TEST_CASE("lacunary picks the smallest acceptable value above each power") {
  // 7 and 15 are not sums of three squares
  const auto seq = build_sequence(Lacunary{7.0}, 2, 3, 400);
  for (std::size_t j = 0; j < seq.members.size(); ++j) {
    const auto target = static_cast<std::int64_t>(std::pow(7.0, static_cast<double>(j)));
    std::int64_t want = target;
    while (oracle::sphere_count(2, 3, want) == 0) ++want;
    CHECK(seq.members[j] == want);
  }
}

TEST_CASE("growth of N(r) for k=2, d=6") {
  const auto counts = count_sweep(2, 6, 10000, CountMethod::series);
  std::vector<double> lx, ly;
  for (std::int64_t lam = 1000; lam <= 10000; lam += 37) {
    if (counts[lam] == 0) continue;
    lx.push_back(0.5 * std::log(static_cast<double>(lam)));
    ly.push_back(std::log(counts[lam].get_d()));
  }
  const auto fit = least_squares(lx, ly);
  CHECK(std::abs(fit.slope - 4.0) < 0.25);
}

TEST_CASE("counts exceed 64 bits without loss") {
  const auto n = count_points({2, 40, 400}, CountMethod::series);
  CHECK(n > BigInt("18446744073709551615"));
  // split the 40 coordinates into two halves of 20
  const auto half = count_sweep(2, 20, 400, CountMethod::series);
  BigInt joined = 0;
  for (std::int64_t m = 0; m <= 400; ++m) joined += half[m] * half[400 - m];
  CHECK(n == joined);
}

TEST_CASE("power histogram kernels agree") {
  for (int k : {2, 3}) {
    for (int d = 1; d <= 5; ++d) {
      const auto a = kernels::power_histogram_serial(k, d, 500);
      const auto b = kernels::power_histogram_omp(k, d, 500);
      CHECK(a == b);
      for (std::int64_t m : {0, 1, 2, 50, 99, 500}) CHECK(count_points({k, d, m}, CountMethod::series) == a[m]);
    }
  }
}

TEST_CASE("invalid specs") {
  CHECK_THROWS_AS(count_points({1, 3, 4}, CountMethod::series), DomainError);
  CHECK_THROWS_AS(count_points({2, 0, 4}, CountMethod::series), DomainError);
  CHECK_THROWS_AS(count_points({2, 3, -1}, CountMethod::series), DomainError);
  CHECK_THROWS_AS(count_points({2, 40, 100000}, CountMethod::brute, WorkBound{1e6}), WorkBoundExceeded);
}
