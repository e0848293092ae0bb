#pragma once

#include <span>
#include <vector>

#include "ksphere/common.hpp"

namespace ksphere {

/// Continuous k-sphere {x : sum |x_i|^k = r^k} carrying its normalized
/// Gelfand-Leray measure.
struct SurfaceSpec {
  int degree = 2;
  int dimension = 3;
  double radius = 1.0;
  int resolution = 256;  // Gauss-Legendre nodes per slicing level

  void validate() const;
};

/// Gamma(1+1/k)^d / Gamma(d/k).
double gelfand_leray_constant(int degree, int dimension);
/// Total Gelfand-Leray mass of the unit k-sphere: 2^d Gamma(1+1/k)^d / Gamma(d/k).
double gelfand_leray_volume(int degree, int dimension);

/// One-dimensional slicing rule at a given level: the next coordinate is
/// x = rho * t (times a random sign) and the remaining radius is rho * shrink.
struct SliceRule {
  std::vector<double> t;
  std::vector<double> shrink;
  std::vector<double> weight;  // sums to 1
};

/// Tensor quadrature for the normalized measure. Coordinate j (j < d-1) is drawn
/// from the conditional law of |x_j| given the earlier ones; the last is solved.
class SurfaceQuadrature {
 public:
  explicit SurfaceQuadrature(const SurfaceSpec& spec);

  const SurfaceSpec& spec() const { return spec_; }
  const SliceRule& level(int j) const { return levels_[static_cast<std::size_t>(j)]; }

  /// Largest |xi| r for which transforms are considered reliable.
  double trusted_frequency() const { return spec_.resolution / 8.0; }

 private:
  SurfaceSpec spec_;
  std::vector<SliceRule> levels_;
};

struct SurfaceNode {
  std::vector<double> x;
  double weight;
};

/// Every node with all sign patterns, scaled to radius r. Size resolution^(d-1) 2^d.
std::vector<SurfaceNode> surface_quadrature(const SurfaceSpec& spec, std::size_t max_nodes = 20'000'000);

enum class Evaluation { automatic, nested };

/// Fourier transform of the normalized measure at xi: int e(x . xi) dsigma_r(x).
/// The measure is invariant under coordinate sign flips, so the value is real.
/// automatic uses radial symmetry when k = 2.
Complex sigma_fourier(const SurfaceQuadrature& quad, std::span<const double> xi,
                      Evaluation mode = Evaluation::automatic);
bool sigma_trusted(const SurfaceQuadrature& quad, std::span<const double> xi);

struct DecaySample {
  double R;
  double value;
  bool trusted;
};

struct BnwFit {
  double slope;
  double intercept;
  double theory;  // (1 - d) / k
  std::size_t maxima;
  std::vector<DecaySample> trace;
};

/// Fits log of the local maxima of |sigma_hat(R xi0)| against log R for R in
/// [R_min, R_max], clipped to the trusted range. xi0 is normalized to |xi0| = 1.
BnwFit bnw_decay_fit(const SurfaceQuadrature& quad, std::span<const double> direction, double R_min, double R_max,
                     double step = 0.02, Evaluation mode = Evaluation::automatic);

/// One-dimensional bump: 1 on [-1/8,1/8], 0 outside (-1/4,1/4), smooth in between.
double bump(double u);
/// Product bump Psi(z) = prod bump(z_i).
double bump_product(std::span<const double> z);
/// Fourier transform of the one-dimensional bump, int bump(u) e(-u zeta) du.
double bump_transform(double zeta);

/// t^-d int prod_i bumphat((x_i - y_i)/t) dsigma_r(y).
double blurred_sphere_kernel(const SurfaceQuadrature& quad, double t, std::span<const double> x);

}  // namespace ksphere
