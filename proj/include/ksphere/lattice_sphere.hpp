#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ksphere/common.hpp"

namespace ksphere {

/// Arithmetic k-sphere {n in Z^d : sum |n_i|^k = power_value}. The radius is
/// r = power_value^(1/k) and is never stored as a float.
struct SphereSpec {
  int degree = 2;
  int dimension = 3;
  std::int64_t power_value = 0;

  void validate() const;
  double radius() const;
  /// floor(r): the largest |n_i| that can occur on the sphere.
  std::int64_t max_coordinate() const;
};

enum class CountMethod { brute, series, mitm };

/// Row-major list of integer points in Z^d.
class PointSet {
 public:
  explicit PointSet(int dimension) : dimension_(dimension) {}

  int dimension() const { return dimension_; }
  std::size_t size() const { return dimension_ == 0 ? 0 : coords_.size() / dimension_; }
  bool empty() const { return coords_.empty(); }
  std::span<const std::int32_t> operator[](std::size_t i) const {
    return {coords_.data() + i * dimension_, static_cast<std::size_t>(dimension_)};
  }
  void push_back(std::span<const std::int32_t> p) { coords_.insert(coords_.end(), p.begin(), p.end()); }
  const std::vector<std::int32_t>& raw() const { return coords_; }

 private:
  int dimension_;
  std::vector<std::int32_t> coords_;
};

/// Generating-function coefficients indexed by power value 0..cutoff.
struct CoefficientSeries {
  std::int64_t cutoff = 0;
  std::vector<BigInt> coeffs;

  const BigInt& operator[](std::int64_t m) const { return coeffs[static_cast<std::size_t>(m)]; }
};

struct RadiusSequence {
  int degree = 2;
  int dimension = 3;
  std::vector<std::int64_t> members;  // power values, strictly increasing
  std::string label;                  // full | lacunary | superlacunary | custom
};

/// N(r) for one sphere. brute walks the nonnegative orthant with sign weights,
/// series reads the d-fold power of the one-dimensional series, mitm joins
/// two half-dimension partial-sum tables.
BigInt count_points(const SphereSpec& spec, CountMethod method,
                    const WorkBound& bound = WorkBound::from_env());

/// N for every power value 0..cutoff, computed in one pass of the chosen method.
std::vector<BigInt> count_sweep(int degree, int dimension, std::int64_t cutoff, CountMethod method,
                                const WorkBound& bound = WorkBound::from_env());

/// Every point on the sphere in lexicographic order.
PointSet enumerate_points(const SphereSpec& spec, std::size_t max_points = 50'000'000);

CoefficientSeries one_dim_series(int degree, std::int64_t cutoff);
CoefficientSeries convolve_series(const CoefficientSeries& a, const CoefficientSeries& b);
/// d-fold self convolution (d >= 1).
CoefficientSeries power_series(const CoefficientSeries& a, int times);

/// Boolean image of the d-fold series: entry m is true iff N(m^(1/k)) > 0.
std::vector<bool> representable_mask(int degree, int dimension, std::int64_t cutoff);

/// Witness search: true iff the sphere has at least one point.
bool is_acceptable(const SphereSpec& spec);

RadiusSequence acceptable_radii(int degree, int dimension, std::int64_t cutoff);

struct Lacunary {
  double base = 2.0;
};
struct Superlacunary {
  double exponent = 1.5;  // v in h(j) = floor(2^(j^v))
};
struct CustomSequence {
  std::vector<std::int64_t> members;
};
using SequenceKind = std::variant<Lacunary, Superlacunary, CustomSequence>;

RadiusSequence build_sequence(const SequenceKind& kind, int degree, int dimension, std::int64_t cutoff);

}  // namespace ksphere
