#include "ksphere/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "ksphere/numeric.hpp"

namespace ksphere::kernels {

namespace {

std::vector<std::int64_t> powers_upto(int k, std::int64_t cutoff) {
  std::vector<std::int64_t> pw;
  for (std::int64_t n = 0;; ++n) {
    const std::int64_t p = ipow_checked(n, k);
    if (p > cutoff) break;
    pw.push_back(p);
  }
  return pw;
}

// Adds the weighted orthant points whose leading coordinates are already fixed
// (partial sum `partial`, weight `weight`) into hist.
void orthant_walk(const std::vector<std::int64_t>& pw, int levels_left, std::int64_t partial, std::uint64_t weight,
                  std::int64_t cutoff, std::uint64_t* hist) {
  const std::int64_t rem = cutoff - partial;
  if (levels_left == 1) {
    hist[partial] += weight;
    const std::uint64_t w2 = 2 * weight;
    for (std::size_t x = 1; x < pw.size() && pw[x] <= rem; ++x) hist[partial + pw[x]] += w2;
    return;
  }
  orthant_walk(pw, levels_left - 1, partial, weight, cutoff, hist);
  for (std::size_t x = 1; x < pw.size() && pw[x] <= rem; ++x) {
    orthant_walk(pw, levels_left - 1, partial + pw[x], 2 * weight, cutoff, hist);
  }
}

void check_histogram_args(int degree, int dimension, std::int64_t cutoff) {
  if (degree < 1 || dimension < 1) throw DomainError("power_histogram: degree, dimension >= 1");
  if (cutoff < 0) throw DomainError("power_histogram: cutoff >= 0");
}

struct TorusShape {
  int d;
  std::int64_t side;
  std::size_t total;
};

TorusShape torus_shape(std::size_t fsize, int dimension, std::int64_t side) {
  if (dimension < 1 || side < 1) throw DomainError("cyclic_average: bad torus shape");
  std::size_t total = 1;
  for (int i = 0; i < dimension; ++i) total *= static_cast<std::size_t>(side);
  if (fsize != total) throw DomainError("cyclic_average: array size does not match side^d");
  return {dimension, side, total};
}

// Flat index shift of each offset, applied per coordinate with wraparound.
std::vector<std::int64_t> reduced_offsets(const PointSet& offsets, std::int64_t side) {
  std::vector<std::int64_t> red(offsets.raw().size());
  for (std::size_t i = 0; i < red.size(); ++i) {
    const std::int64_t v = offsets.raw()[i] % side;
    red[i] = v < 0 ? v + side : v;
  }
  return red;
}

inline double cyclic_point(std::span<const double> f, const TorusShape& sh, const std::vector<std::int64_t>& red,
                           std::size_t n_off, std::size_t x, std::vector<std::int64_t>& xc) {
  std::size_t rest = x;
  for (int i = sh.d - 1; i >= 0; --i) {
    xc[i] = static_cast<std::int64_t>(rest % sh.side);
    rest /= sh.side;
  }
  double acc = 0.0;
  for (std::size_t o = 0; o < n_off; ++o) {
    std::size_t idx = 0;
    for (int i = 0; i < sh.d; ++i) {
      std::int64_t c = xc[i] - red[o * sh.d + i];
      if (c < 0) c += sh.side;
      idx = idx * sh.side + static_cast<std::size_t>(c);
    }
    acc += f[idx];
  }
  return acc;
}

struct FourierTable {
  std::int64_t modulus;
  std::vector<Complex> roots;  // empty when the modulus is too large to tabulate

  explicit FourierTable(std::int64_t m) : modulus(m) {
    if (m <= (1 << 22)) {
      roots.resize(static_cast<std::size_t>(m));
      for (std::int64_t j = 0; j < m; ++j) roots[j] = unit_phase(static_cast<double>(j) / m);
    }
  }
  Complex at(std::int64_t residue) const {
    if (!roots.empty()) return roots[static_cast<std::size_t>(residue)];
    return unit_phase(static_cast<double>(residue) / static_cast<double>(modulus));
  }
};

Complex fourier_row(const PointSet& points, const std::int64_t* freq, const FourierTable& table) {
  const int d = points.dimension();
  const std::int64_t M = table.modulus;
  CompensatedSum acc;
  const auto& raw = points.raw();
  for (std::size_t p = 0; p < points.size(); ++p) {
    __int128 dot = 0;
    for (int i = 0; i < d; ++i) dot += static_cast<__int128>(raw[p * d + i]) * freq[i];
    auto r = static_cast<std::int64_t>(dot % M);
    if (r < 0) r += M;
    acc.add(table.at(r));
  }
  return acc.value();
}

void check_fourier_args(const PointSet& points, std::span<const std::int64_t> freqs, std::int64_t modulus,
                        std::span<Complex> out) {
  if (modulus < 1) throw DomainError("lattice_fourier: modulus >= 1");
  const auto d = static_cast<std::size_t>(points.dimension());
  if (d == 0 || freqs.size() != out.size() * d) throw DomainError("lattice_fourier: frequency array shape");
}

// Max over m of |sum_b e((a b^k + b m)/q)| / q over coset representatives a.
double gauss_profile_at(int degree, std::int64_t q, std::vector<Complex>& roots) {
  if (q == 1) return 1.0;
  roots.resize(static_cast<std::size_t>(q));
  for (std::int64_t j = 0; j < q; ++j) roots[j] = unit_phase(static_cast<double>(j) / q);
  std::vector<char> is_power(static_cast<std::size_t>(q), 0);
  std::vector<std::int64_t> kth;
  for (std::int64_t b = 1; b < q; ++b) {
    if (gcd64(b, q) != 1) continue;
    const std::int64_t p = powmod(b, degree, q);
    if (!is_power[p]) {
      is_power[p] = 1;
      kth.push_back(p);
    }
  }
  std::vector<char> covered(static_cast<std::size_t>(q), 0);
  std::vector<std::int64_t> bk(static_cast<std::size_t>(q));
  for (std::int64_t b = 0; b < q; ++b) bk[b] = powmod(b, degree, q);
  double best = 0.0;
  std::vector<std::int64_t> abk(static_cast<std::size_t>(q));
  for (std::int64_t a = 1; a < q; ++a) {
    if (covered[a] || gcd64(a, q) != 1) continue;
    for (std::int64_t h : kth) covered[static_cast<std::size_t>(static_cast<__int128>(a) * h % q)] = 1;
    for (std::int64_t b = 0; b < q; ++b) abk[b] = static_cast<std::int64_t>(static_cast<__int128>(a) * bk[b] % q);
    for (std::int64_t m = 0; m < q; ++m) {
      double re = 0.0, im = 0.0;
      std::int64_t lin = 0;
      for (std::int64_t b = 0; b < q; ++b) {
        std::int64_t ph = abk[b] + lin;
        if (ph >= q) ph -= q;
        re += roots[ph].real();
        im += roots[ph].imag();
        lin += m;
        if (lin >= q) lin -= q;
      }
      best = std::max(best, std::hypot(re, im) / static_cast<double>(q));
    }
  }
  return best;
}

}  // namespace

std::vector<std::uint64_t> power_histogram_serial(int degree, int dimension, std::int64_t cutoff) {
  check_histogram_args(degree, dimension, cutoff);
  const auto pw = powers_upto(degree, cutoff);
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(cutoff) + 1, 0);
  orthant_walk(pw, dimension, 0, 1, cutoff, hist.data());
  return hist;
}

std::vector<std::uint64_t> power_histogram_omp(int degree, int dimension, std::int64_t cutoff) {
  check_histogram_args(degree, dimension, cutoff);
  const auto pw = powers_upto(degree, cutoff);
  const std::size_t len = static_cast<std::size_t>(cutoff) + 1;
  if (dimension == 1) return power_histogram_serial(degree, dimension, cutoff);
  const auto top = static_cast<std::int64_t>(pw.size());
  const int threads = omp_get_max_threads();
  std::vector<std::vector<std::uint64_t>> local(static_cast<std::size_t>(threads),
                                                std::vector<std::uint64_t>(len, 0));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t x = 0; x < top; ++x) {
    auto& h = local[static_cast<std::size_t>(omp_get_thread_num())];
    orthant_walk(pw, dimension - 1, pw[x], x == 0 ? 1 : 2, cutoff, h.data());
  }
  std::vector<std::uint64_t> hist(len, 0);
  for (const auto& h : local) {
    for (std::size_t m = 0; m < len; ++m) hist[m] += h[m];
  }
  return hist;
}

void lattice_fourier_serial(const PointSet& points, std::span<const std::int64_t> freqs, std::int64_t modulus,
                            std::span<Complex> out) {
  check_fourier_args(points, freqs, modulus, out);
  const FourierTable table(modulus);
  const int d = points.dimension();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = fourier_row(points, freqs.data() + j * d, table);
}

void lattice_fourier_omp(const PointSet& points, std::span<const std::int64_t> freqs, std::int64_t modulus,
                         std::span<Complex> out) {
  check_fourier_args(points, freqs, modulus, out);
  const FourierTable table(modulus);
  const int d = points.dimension();
  const auto rows = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < rows; ++j) out[j] = fourier_row(points, freqs.data() + j * d, table);
}

std::vector<double> gauss_profile_serial(int degree, std::int64_t q_max) {
  if (degree < 1 || q_max < 1) throw DomainError("gauss_profile: degree >= 1, q_max >= 1");
  std::vector<double> out(static_cast<std::size_t>(q_max) + 1, 0.0);
  std::vector<Complex> roots;
  for (std::int64_t q = 1; q <= q_max; ++q) out[q] = gauss_profile_at(degree, q, roots);
  return out;
}

std::vector<double> gauss_profile_omp(int degree, std::int64_t q_max) {
  if (degree < 1 || q_max < 1) throw DomainError("gauss_profile: degree >= 1, q_max >= 1");
  std::vector<double> out(static_cast<std::size_t>(q_max) + 1, 0.0);
#pragma omp parallel
  {
    std::vector<Complex> roots;
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t q = 1; q <= q_max; ++q) out[q] = gauss_profile_at(degree, q, roots);
  }
  return out;
}

void cyclic_average_serial(std::span<const double> f, int dimension, std::int64_t side, const PointSet& offsets,
                           double scale, std::span<double> out) {
  const auto sh = torus_shape(f.size(), dimension, side);
  if (out.size() != sh.total || offsets.dimension() != dimension) throw DomainError("cyclic_average: shape");
  const auto red = reduced_offsets(offsets, side);
  std::vector<std::int64_t> xc(dimension);
  for (std::size_t x = 0; x < sh.total; ++x) out[x] = scale * cyclic_point(f, sh, red, offsets.size(), x, xc);
}

void cyclic_average_omp(std::span<const double> f, int dimension, std::int64_t side, const PointSet& offsets,
                        double scale, std::span<double> out) {
  const auto sh = torus_shape(f.size(), dimension, side);
  if (out.size() != sh.total || offsets.dimension() != dimension) throw DomainError("cyclic_average: shape");
  const auto red = reduced_offsets(offsets, side);
  const auto total = static_cast<std::int64_t>(sh.total);
#pragma omp parallel
  {
    std::vector<std::int64_t> xc(dimension);
#pragma omp for schedule(static)
    for (std::int64_t x = 0; x < total; ++x) {
      out[x] = scale * cyclic_point(f, sh, red, offsets.size(), static_cast<std::size_t>(x), xc);
    }
  }
}

}  // namespace ksphere::kernels
