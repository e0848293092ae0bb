#pragma once

// Data-parallel hot loops. Every kernel has a plain serial reference and an
// OpenMP variant with identical results (bitwise for floating point: work is
// split over independent outputs, never over a shared reduction).

#include <cstdint>
#include <span>
#include <vector>

#include "ksphere/common.hpp"
#include "ksphere/lattice_sphere.hpp"

namespace ksphere::kernels {

/// hist[m] = #{n in Z^d : sum |n_i|^k = m} for 0 <= m <= cutoff, by walking the
/// nonnegative orthant and weighting each point by 2^(nonzero coordinates).
std::vector<std::uint64_t> power_histogram_serial(int degree, int dimension, std::int64_t cutoff);
std::vector<std::uint64_t> power_histogram_omp(int degree, int dimension, std::int64_t cutoff);

/// out[j] = sum over points n of e(n . m_j / modulus), where m_j is row j of
/// the flat frequency array. Phases are reduced exactly in integers.
void lattice_fourier_serial(const PointSet& points, std::span<const std::int64_t> freqs,
                            std::int64_t modulus, std::span<Complex> out);
void lattice_fourier_omp(const PointSet& points, std::span<const std::int64_t> freqs,
                         std::int64_t modulus, std::span<Complex> out);

/// max over m in Z/q of |q^-1 sum_b e((a b^k + b m)/q)| for a running over
/// representatives of U(q) modulo k-th powers; out[q] for 1 <= q <= q_max.
std::vector<double> gauss_profile_serial(int degree, std::int64_t q_max);
std::vector<double> gauss_profile_omp(int degree, std::int64_t q_max);

/// Cyclic convolution on (Z/side)^d: out(x) = scale * sum_{y in offsets} f(x - y).
void cyclic_average_serial(std::span<const double> f, int dimension, std::int64_t side,
                           const PointSet& offsets, double scale, std::span<double> out);
void cyclic_average_omp(std::span<const double> f, int dimension, std::int64_t side,
                        const PointSet& offsets, double scale, std::span<double> out);

}  // namespace ksphere::kernels
