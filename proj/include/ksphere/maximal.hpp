#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ksphere/common.hpp"
#include "ksphere/lattice_sphere.hpp"

namespace ksphere {

/// Real function on the torus (Z/side)^d, row-major.
struct GridFunction {
  int dimension = 1;
  std::int64_t side = 1;
  std::vector<double> values;

  static GridFunction zeros(int dimension, std::int64_t side);
  std::size_t size() const { return values.size(); }
  std::size_t index(std::span<const std::int64_t> x) const;  // coordinates reduced mod side

  double norm1() const;
  double norm2() const;
  double norm_p(double p) const;
  bool is_indicator() const;
};

GridFunction delta_function(int dimension, std::int64_t side);
/// Indicator of the cube [0, width)^d.
GridFunction box_indicator(int dimension, std::int64_t side, std::int64_t width);
/// Values uniform in [-1,1).
GridFunction random_function(int dimension, std::int64_t side, std::uint64_t seed);
/// Each point included independently with the given probability.
GridFunction random_indicator(int dimension, std::int64_t side, double density, std::uint64_t seed);

enum class AverageMethod { direct, dft };

struct AverageOptions {
  AverageMethod method = AverageMethod::direct;
  /// Treat the torus as a window on Z^d: require side > 2 (support radius + r)
  /// so that no wraparound occurs, and fail otherwise.
  bool emulate_lattice = false;
};

/// A_r f(x) = N(r)^-1 sum_{y on the sphere} f(x - y), cyclically.
GridFunction spherical_average(const GridFunction& f, const SphereSpec& spec, const AverageOptions& opts = {});

/// Pointwise sup over the sequence of |A_r f|.
GridFunction maximal_function(const GridFunction& f, const RadiusSequence& seq, const AverageOptions& opts = {});

/// Finite subset of Z^d with unit weights, for exact computations without a torus.
struct LatticeSet {
  int dimension = 1;
  std::vector<std::int32_t> coords;  // row-major

  std::size_t size() const { return coords.size() / static_cast<std::size_t>(dimension); }
};

/// Distinct points drawn uniformly from [0, L)^d with L^d about size / density.
LatticeSet random_lattice_set(int dimension, std::size_t size, double density, std::uint64_t seed);

/// Values of M 1_F on its support (all values positive), for radii in seq.
std::vector<double> lattice_maximal_values(const LatticeSet& F, const RadiusSequence& seq);

struct DeltaRow {
  std::int64_t lambda_max;
  double norm_pp;  // sum over spheres lambda <= lambda_max of N^(1-p)
};

struct DeltaSeries {
  double p;
  std::vector<DeltaRow> rows;
  double slope;           // least squares of log norm_pp against log lambda_max
  double cauchy_defect;   // relative change between the last two rows
};

struct DeltaReport {
  int degree, dimension;
  std::vector<DeltaSeries> series;
  double sup_value;  // 1 / min N over the range (the p = infinity analogue)
};

/// ||sup_{lambda <= Lambda} A_r delta||_p^p = sum_{1 <= lambda <= Lambda} N(lambda)^(1-p),
/// since every x != 0 lies on exactly one sphere.
DeltaReport delta_endpoint_test(int degree, int dimension, std::span<const double> p_list,
                                std::span<const std::int64_t> lambda_list);

struct DensityFit {
  double delta;      // slope of log #members against log r
  double intercept;
  std::vector<std::int64_t> grid;
  std::vector<std::size_t> counts;
};

/// Geometric grid of `points` power values from `start` to lambda_max.
std::vector<std::int64_t> default_density_grid(std::int64_t lambda_max, std::int64_t start = 16, int points = 16);

/// Uses only grid points with a nonzero count; needs at least 4 of them.
DensityFit density_parameter_fit(const RadiusSequence& seq, std::span<const std::int64_t> lambda_grid);

struct UnionBoundReport {
  double sup_norm1;   // || sup_{lambda <= Lambda0} A_r f ||_1
  double bound;       // #members * ||f||_1
  double ratio;
  std::size_t members;
  bool indicator;     // false flags a non-indicator input
};

UnionBoundReport narrow_union_bound_check(const GridFunction& f, const RadiusSequence& seq, std::int64_t lambda0,
                                          const AverageOptions& opts = {AverageMethod::dft, false});

struct WeakTypeRow {
  std::size_t set_size;
  double constant;       // max over the altitude grid of alpha^p |{M 1_F > alpha}| / |F|
  double best_altitude;
  double limit_constant; // sup over all alpha in (0,1]
};

struct WeakTypeReport {
  double p;
  std::vector<WeakTypeRow> rows;
  double worst;
  double spread;  // max constant / min constant over the family
};

/// Altitudes 2^(-j/4), j = 0..80.
std::vector<double> default_altitudes();

WeakTypeReport restricted_weak_type_probe(const RadiusSequence& seq, double p, std::span<const LatticeSet> sets,
                                          std::span<const double> altitudes);

}  // namespace ksphere
