#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ksphere/common.hpp"
#include "ksphere/lattice_sphere.hpp"

namespace ksphere {

enum class SampleScheme { automatic, full, declared };

/// Frequencies theta = m / modulus, m in (Z/modulus)^d, stored row-major.
/// The declared scheme is the union of the d axis lines, the 2^(d-1)
/// diagonals through 0, and a seeded uniform random set; it is closed under
/// negation and sorted.
struct FrequencySample {
  int dimension = 0;
  std::int64_t modulus = 0;
  std::vector<std::int64_t> points;
  std::string scheme;
  std::uint64_t seed = 0;

  std::size_t size() const { return dimension == 0 ? 0 : points.size() / dimension; }
  std::span<const std::int64_t> operator[](std::size_t i) const {
    return {points.data() + i * dimension, static_cast<std::size_t>(dimension)};
  }
  std::vector<double> theta(std::size_t i) const;
};

/// automatic picks the full grid when modulus^d <= 65536.
FrequencySample make_frequency_sample(int dimension, std::int64_t modulus, SampleScheme scheme,
                                      std::size_t random_count = 512, std::uint64_t seed = 1);

struct MultiplierGrid {
  int degree = 2;
  int dimension = 0;
  std::int64_t power_value = 0;
  FrequencySample sample;
  std::vector<Complex> values;

  double sup_norm() const;
};

/// vol * r^(d-k), where vol = 2^d Gamma(1+1/k)^d / Gamma(d/k) is the Gelfand-Leray
/// mass of the unit k-sphere, so that N(r) / normalization tends to the singular series.
double multiplier_normalization(const SphereSpec& spec);

/// floor(r^(1/2)) with r = lambda^(1/k), at least 1.
std::int64_t default_Q(const SphereSpec& spec);

/// a_r(theta) / normalization on the sample, with exact integer phases.
MultiplierGrid exact_multiplier(const SphereSpec& spec, const FrequencySample& sample);

/// sum_{q<=Q} sum_{a in U(q)} e(-a lambda/q) G(a,q;m) Psi(q theta - m) sigma_hat_r(theta - m/q),
/// with m the nearest integer vector to q theta. resolution = 0 picks the
/// smallest surface quadrature whose trusted range covers every term.
MultiplierGrid main_term_multiplier(const SphereSpec& spec, const FrequencySample& sample, std::int64_t Q,
                                    int resolution = 0);

struct ErrorReport {
  MultiplierGrid exact;
  MultiplierGrid main;
  MultiplierGrid error;
  double sup = 0.0;
  std::size_t argsup = 0;
};

ErrorReport error_multiplier(const SphereSpec& spec, const FrequencySample& sample, std::int64_t Q);

/// max |values(-m) - conj(values(m))| over sample points whose negation is also sampled.
double conjugate_symmetry_defect(const MultiplierGrid& grid);

struct DecayRow {
  std::int64_t power_value;
  double r;
  std::int64_t Q;
  double sup_error;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double slope = 0.0;
  double kappa_emp = 0.0;  // -slope
  std::vector<double> gammas;
  std::vector<double> kappa_theory;  // min{d gamma - k, d/k - (k+2)}
};

/// Q = 0 uses default_Q per radius.
DecayReport decay_fit(int degree, int dimension, std::span<const std::int64_t> power_values,
                      const FrequencySample& sample, std::int64_t Q, std::span<const double> gammas);

double kappa_theory(int degree, int dimension, double gamma);

/// Major arcs {t : |t - a/q| <= q^-1 r^(nu-k)} for q <= Q_major, a in U(q).
struct ArcDissection {
  std::int64_t Q_major = 1;
  double nu = 1.0;
};

/// Q_major unset means floor(r^(1/2)) per radius.
struct DissectionRule {
  std::optional<std::int64_t> Q_major;
  double nu = 1.0;

  ArcDissection at(const SphereSpec& spec) const;
};

/// Throws DomainError when two major arcs overlap (checked on consecutive Farey fractions).
void check_dissection(const ArcDissection& arcs, double r, int degree);

struct ArcSplit {
  Complex major;
  Complex minor;
  std::int64_t nodes = 0;
  std::int64_t major_nodes = 0;
};

/// Splits a_r(theta) = int e(-lambda t) prod alpha_r(t,theta_i) dt over 2(d+1)lambda+1 nodes.
ArcSplit arc_split(const SphereSpec& spec, const ArcDissection& arcs, std::span<const double> theta);

struct MinorTraceRow {
  std::int64_t power_value;
  double r;
  std::int64_t Q_major;
  double sup_minor;  // sup over thetas of |minor| / normalization
  // |minor(theta)| against max over minor nodes of prod_{i>2s} |alpha_r(t,theta_i)| times
  // the s-th mean value; worst ratio over thetas. Only meaningful when d > 2s.
  double holder_ratio;
  bool holder_applicable;
};

struct MinorTrace {
  std::vector<MinorTraceRow> rows;
  double slope = 0.0;
  int s = 0;
  std::vector<double> gammas;
  std::vector<double> theory;  // -(d - 2s) gamma
};

MinorTrace minor_arc_l2_trace(int degree, int dimension, std::span<const std::int64_t> power_values,
                              const DissectionRule& rule, int s, std::span<const std::vector<double>> thetas,
                              std::span<const double> gammas);

}  // namespace ksphere
