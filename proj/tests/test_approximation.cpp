#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "ksphere/approximation.hpp"
#include "ksphere/exp_sums.hpp"
#include "ksphere/gauss_sums.hpp"
#include "ksphere/surface_measure.hpp"
#include "oracles.hpp"

using namespace ksphere;

TEST_CASE("frequency samples") {
  const auto full = make_frequency_sample(3, 4, SampleScheme::automatic);
  CHECK(full.size() == 64);
  CHECK(full.scheme == "full");
  const auto decl = make_frequency_sample(5, 64, SampleScheme::automatic, 100, 3);
  CHECK(decl.scheme.rfind("declared", 0) == 0);
  CHECK(decl.seed == 3);
  CHECK(decl.size() < 64 * 64 * 64);
  // closed under negation mod M
  std::set<std::vector<std::int64_t>> pts;
  for (std::size_t i = 0; i < decl.size(); ++i) pts.emplace(decl[i].begin(), decl[i].end());
  for (const auto& p : pts) {
    std::vector<std::int64_t> q(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) q[j] = (64 - p[j]) % 64;
    CHECK(pts.count(q) == 1);
  }
  // every axis point is present
  for (std::int64_t m = 0; m < 64; ++m) CHECK(pts.count({0, 0, m, 0, 0}) == 1);
  const auto again = make_frequency_sample(5, 64, SampleScheme::automatic, 100, 3);
  CHECK(again.points == decl.points);
}

TEST_CASE("exact multiplier matches direct lattice sums") {
  const SphereSpec spec{2, 3, 9};
  const auto sample = make_frequency_sample(3, 6, SampleScheme::full);
  const auto g = exact_multiplier(spec, sample);
  const auto pts = oracle::sphere_points(2, 3, 9);
  const double norm = multiplier_normalization(spec);
  CHECK(norm == doctest::Approx(gelfand_leray_volume(2, 3) * 3.0));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    Complex want = 0;
    for (const auto& p : pts) {
      std::int64_t dot = 0;
      for (int j = 0; j < 3; ++j) dot += p[j] * sample[i][j];
      want += oracle::e_frac(dot, 6);
    }
    CHECK(std::abs(g.values[i] * norm - want) < 1e-12);
  }
  CHECK(g.values[0].real() == doctest::Approx(30.0 / norm));
  CHECK(conjugate_symmetry_defect(g) < 1e-12);
}

TEST_CASE("exact multiplier on the ten point sphere") {
  const SphereSpec spec{2, 5, 1};
  const auto g = exact_multiplier(spec, make_frequency_sample(5, 4, SampleScheme::full));
  REQUIRE(g.values.size() == 1024);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    double want = 0;
    for (int j = 0; j < 5; ++j) want += 2.0 * std::cos(2.0 * std::numbers::pi * g.sample[i][j] / 4.0);
    CHECK(std::abs(g.values[i].real() * multiplier_normalization(spec) - want) < 1e-12);
  }
}

TEST_CASE("main term with a single denominator") {
  const SphereSpec spec{2, 3, 16};
  const auto sample = make_frequency_sample(3, 8, SampleScheme::full);
  const auto main = main_term_multiplier(spec, sample, 1, 256);
  const SurfaceQuadrature quad({2, 3, 4.0, 256});
  for (std::size_t i = 0; i < sample.size(); ++i) {
    auto th = sample.theta(i);
    for (double& t : th) t -= std::round(t);
    const double want = bump_product(th) * sigma_fourier(quad, th).real();
    CHECK(std::abs(main.values[i] - Complex(want, 0)) < 1e-12);
  }
  CHECK(conjugate_symmetry_defect(main) < 1e-10);
}

TEST_CASE("main term at zero is the truncated singular series") {
  const SphereSpec spec{2, 5, 49};
  const auto sample = make_frequency_sample(5, 4, SampleScheme::declared, 10, 1);
  for (std::int64_t Q : {1, 3, 7}) {
    const auto main = main_term_multiplier(spec, sample, Q);
    const auto ss = singular_series_partial(2, 5, 49, Q, 1.0).value;
    CHECK(std::abs(main.values[0] - ss) < 1e-10);
  }
}

TEST_CASE("exact equals main plus error") {
  const SphereSpec spec{2, 4, 25};
  const auto sample = make_frequency_sample(4, 10, SampleScheme::full);
  const auto rep = error_multiplier(spec, sample, 3);
  double worst = 0, sup = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    worst = std::max(worst, std::abs(rep.exact.values[i] - rep.main.values[i] - rep.error.values[i]));
    sup = std::max(sup, std::abs(rep.error.values[i]));
  }
  CHECK(worst < 1e-12);
  CHECK(rep.sup == doctest::Approx(sup));
  CHECK(std::abs(rep.error.values[rep.argsup]) == doctest::Approx(sup));
}

TEST_CASE("error at zero tracks the waring asymptotic") {
  const SphereSpec spec{2, 5, 400};
  const auto sample = make_frequency_sample(5, 4, SampleScheme::declared, 4, 1);
  const auto rep = error_multiplier(spec, sample, default_Q(spec));
  CHECK(std::abs(rep.error.values[0]) < 0.05);
}

TEST_CASE("error sup trace over squares") {
  const auto sample = make_frequency_sample(5, 32, SampleScheme::declared, 64, 1);
  std::vector<double> sups;
  for (std::int64_t lam : {4, 9, 16, 25, 36, 49, 64}) {
    const SphereSpec spec{2, 5, lam};
    const auto rep = error_multiplier(spec, sample, default_Q(spec));
    double main_sup = 0;
    for (const auto& v : rep.main.values) main_sup = std::max(main_sup, std::abs(v));
    // |exact| <= 1, so the error is at most 1 + sup |main|
    CHECK(rep.sup <= 1.0 + main_sup + 1e-12);
    sups.push_back(rep.sup);
  }
  // not monotone at small radii, but well below the first values by r = 8
  CHECK(sups.back() < 0.5 * sups.front());
  CHECK(sups.back() < sups[1]);
}

TEST_CASE("kappa theory") {
  CHECK(kappa_theory(2, 5, 0.5) == doctest::Approx(std::min(5 * 0.5 - 2, 2.5 - 4)));
  CHECK(kappa_theory(3, 20, 0.25) == doctest::Approx(std::min(20 * 0.25 - 3, 20.0 / 3 - 5)));
}

TEST_CASE("decay fit reports its inputs") {
  const auto sample = make_frequency_sample(5, 16, SampleScheme::declared, 32, 2);
  const std::int64_t lams[] = {16, 25, 36, 49, 64};
  const double gammas[] = {0.5};
  const auto rep = decay_fit(2, 5, lams, sample, 0, gammas);
  CHECK(rep.rows.size() == 5);
  CHECK(rep.kappa_emp == doctest::Approx(-rep.slope));
  CHECK(rep.kappa_theory[0] == doctest::Approx(kappa_theory(2, 5, 0.5)));
  for (const auto& r : rep.rows) CHECK(r.Q == static_cast<std::int64_t>(std::floor(std::sqrt(r.r))));
  const std::int64_t few[] = {16, 25};
  CHECK_THROWS_AS(decay_fit(2, 5, few, sample, 0, gammas), DomainError);
}

TEST_CASE("arc split sums to the exact value") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t lam = 1 + static_cast<std::int64_t>(rng() % 25);
    const SphereSpec spec{2, 3, lam};
    std::vector<double> th{u(rng), u(rng), u(rng)};
    const auto split = arc_split(spec, DissectionRule{}.at(spec), th);
    const auto exact = sphere_exponential_sum(spec, th, SphereSumMethod::direct);
    CHECK(std::abs(split.major + split.minor - exact) < 1e-8);
  }
}

TEST_CASE("arc dissection guards") {
  const SphereSpec spec{2, 3, 25};
  const std::vector<double> th{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(arc_split(spec, ArcDissection{0, 1.0}, th), DomainError);
  // wide arcs at many denominators overlap
  CHECK_THROWS_AS(check_dissection(ArcDissection{50, 1.9}, 5.0, 2), DomainError);
  CHECK_NOTHROW(check_dissection(ArcDissection{2, 1.0}, 5.0, 2));
  // a single arc around 0/1 wide enough to cover the circle leaves nothing minor
  const auto cover = arc_split(spec, ArcDissection{1, 2.0}, th);
  CHECK(std::abs(cover.minor) < 1e-12);
}

TEST_CASE("minor arc trace") {
  const std::int64_t lams[] = {16, 25, 36, 49, 64};
  std::vector<std::vector<double>> thetas;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 4; ++i) thetas.push_back({u(rng), u(rng), u(rng), u(rng), u(rng)});
  const double gammas[] = {0.5};
  const auto tr = minor_arc_l2_trace(2, 5, lams, DissectionRule{}, 2, thetas, gammas);
  CHECK(tr.rows.size() == 5);
  CHECK(tr.theory[0] == doctest::Approx(-(5 - 4) * 0.5));
  for (const auto& r : tr.rows) {
    CHECK(r.holder_applicable);
    CHECK(r.holder_ratio <= 1.0 + 1e-9);
  }
  const auto s3 = minor_arc_l2_trace(2, 5, lams, DissectionRule{}, 3, thetas, gammas);
  for (const auto& r : s3.rows) CHECK_FALSE(r.holder_applicable);
  CHECK(s3.slope < 0.0);
  DissectionRule covering;
  covering.Q_major = 1;
  covering.nu = 2.0;
  for (const auto& r : minor_arc_l2_trace(2, 5, lams, covering, 2, thetas, gammas).rows) CHECK(r.sup_minor < 1e-12);
}
