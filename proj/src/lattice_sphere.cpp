#include "ksphere/lattice_sphere.hpp"

#include <algorithm>
#include <cmath>

#include "ksphere/kernels.hpp"
#include "ksphere/numeric.hpp"

namespace ksphere {

namespace {

BigInt from_u128(unsigned __int128 v) {
  BigInt hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
  hi <<= 64;
  return hi + BigInt(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
}

std::vector<std::int64_t> power_table(int k, std::int64_t cutoff) {
  const std::int64_t top = iroot(cutoff, k);
  std::vector<std::int64_t> pw(static_cast<std::size_t>(top) + 1);
  for (std::int64_t j = 0; j <= top; ++j) pw[j] = ipow_checked(j, k);
  return pw;
}

// Lattice points in the nonnegative orthant of a j-dimensional k-ball of the
// given power radius: Gamma(1+1/k)^j / Gamma(1+j/k) * lambda^(j/k), plus the
// boundary layer.
double orthant_points_estimate(int k, int j, double lambda) {
  if (j <= 0) return 1.0;
  const double r = std::pow(std::max(lambda, 1.0), 1.0 / k);
  const double vol = std::exp(j * std::lgamma(1.0 + 1.0 / k) - std::lgamma(1.0 + static_cast<double>(j) / k)) *
                     std::pow(r, j);
  return vol + std::pow(r + 1.0, j - 1) * j + 1.0;
}

void validate_kd(int k, int d) {
  if (k < 2) throw DomainError("degree k must be >= 2");
  if (d < 1) throw DomainError("dimension d must be >= 1");
}

// Single sphere, orthant walk with the last coordinate solved exactly.
struct OrthantCounter {
  int k, d;
  std::int64_t lambda;
  const std::vector<std::int64_t>& pw;
  unsigned __int128 total = 0;

  void walk(int level, std::int64_t partial, std::uint64_t weight) {
    const std::int64_t rem = lambda - partial;
    if (level == d - 1) {
      const std::int64_t j = iroot(rem, k);
      if (pw[j] == rem) total += static_cast<unsigned __int128>(weight) * (j == 0 ? 1u : 2u);
      return;
    }
    for (std::size_t x = 0; x < pw.size() && pw[x] <= rem; ++x) {
      walk(level + 1, partial + pw[x], x == 0 ? weight : weight * 2);
    }
  }
};

// Sorted run-length table of sum |n_i|^k over all signed points of a
// `dims`-dimensional cube with partial sum <= cutoff.
struct PartialSumTable {
  std::vector<std::int64_t> keys;
  std::vector<std::uint64_t> mult;
};

PartialSumTable partial_sums(int dims, std::int64_t cutoff, const std::vector<std::int64_t>& pw) {
  std::vector<std::int64_t> sums;
  if (dims == 0) {
    sums.push_back(0);
  } else {
    const auto top = static_cast<std::int64_t>(pw.size()) - 1;
    std::vector<std::int64_t> stack_partial(dims + 1, 0);
    // iterative odometer over signed coordinates with pruning
    std::vector<std::int64_t> coord(dims, -top - 1);
    int level = 0;
    while (level >= 0) {
      std::int64_t& c = coord[level];
      ++c;
      if (c > top) {
        c = -top - 1;
        --level;
        continue;
      }
      const std::int64_t s = stack_partial[level] + pw[static_cast<std::size_t>(c < 0 ? -c : c)];
      if (s > cutoff) {
        // |c| only grows past zero; skip the rest of the positive side
        if (c > 0) {
          c = top;
        }
        continue;
      }
      if (level == dims - 1) {
        sums.push_back(s);
      } else {
        stack_partial[level + 1] = s;
        ++level;
      }
    }
  }
  std::sort(sums.begin(), sums.end());
  PartialSumTable t;
  for (std::size_t i = 0; i < sums.size();) {
    std::size_t j = i;
    while (j < sums.size() && sums[j] == sums[i]) ++j;
    t.keys.push_back(sums[i]);
    t.mult.push_back(j - i);
    i = j;
  }
  return t;
}

unsigned __int128 merge_count(const PartialSumTable& a, const PartialSumTable& b, std::int64_t target) {
  unsigned __int128 total = 0;
  std::size_t i = 0;
  std::size_t j = b.keys.size();
  while (i < a.keys.size() && j > 0) {
    const std::int64_t s = a.keys[i] + b.keys[j - 1];
    if (s == target) {
      total += static_cast<unsigned __int128>(a.mult[i]) * b.mult[j - 1];
      ++i;
      --j;
    } else if (s < target) {
      ++i;
    } else {
      --j;
    }
  }
  return total;
}

}  // namespace

void SphereSpec::validate() const {
  validate_kd(degree, dimension);
  if (power_value < 0) throw DomainError("power value must be nonnegative");
}

double SphereSpec::radius() const { return std::pow(static_cast<double>(power_value), 1.0 / degree); }

std::int64_t SphereSpec::max_coordinate() const { return iroot(power_value, degree); }

BigInt count_points(const SphereSpec& spec, CountMethod method, const WorkBound& bound) {
  spec.validate();
  const int k = spec.degree;
  const int d = spec.dimension;
  const std::int64_t lambda = spec.power_value;
  switch (method) {
    case CountMethod::brute: {
      bound.check(static_cast<double>(d) * orthant_points_estimate(k, d - 1, static_cast<double>(lambda)),
                  "count_points(brute)");
      const auto pw = power_table(k, lambda);
      OrthantCounter counter{k, d, lambda, pw};
      counter.walk(0, 0, 1);
      return from_u128(counter.total);
    }
    case CountMethod::series: {
      const auto series = power_series(one_dim_series(k, lambda), d);
      return series[lambda];
    }
    case CountMethod::mitm: {
      const int h1 = (d + 1) / 2;
      const int h2 = d / 2;
      bound.check(std::pow(2.0, h1) * orthant_points_estimate(k, h1, static_cast<double>(lambda)),
                  "count_points(mitm)");
      const auto pw = power_table(k, lambda);
      const auto a = partial_sums(h1, lambda, pw);
      const auto b = h2 == h1 ? a : partial_sums(h2, lambda, pw);
      return from_u128(merge_count(a, b, lambda));
    }
  }
  throw DomainError("unknown count method");
}

std::vector<BigInt> count_sweep(int degree, int dimension, std::int64_t cutoff, CountMethod method,
                                const WorkBound& bound) {
  validate_kd(degree, dimension);
  if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
  std::vector<BigInt> out(static_cast<std::size_t>(cutoff) + 1);
  switch (method) {
    case CountMethod::brute: {
      bound.check(orthant_points_estimate(degree, dimension, static_cast<double>(cutoff)),
                  "count_sweep(brute)");
      const auto hist = kernels::power_histogram_omp(degree, dimension, cutoff);
      for (std::size_t m = 0; m < hist.size(); ++m) out[m] = BigInt(static_cast<unsigned long>(hist[m]));
      return out;
    }
    case CountMethod::series: {
      auto s = power_series(one_dim_series(degree, cutoff), dimension);
      return std::move(s.coeffs);
    }
    case CountMethod::mitm: {
      const int h1 = (dimension + 1) / 2;
      const int h2 = dimension / 2;
      bound.check(std::pow(2.0, h1) * orthant_points_estimate(degree, h1, static_cast<double>(cutoff)) +
                      static_cast<double>(cutoff) * static_cast<double>(cutoff),
                  "count_sweep(mitm)");
      const auto pw = power_table(degree, cutoff);
      const auto a = partial_sums(h1, cutoff, pw);
      const auto b = h2 == h1 ? a : partial_sums(h2, cutoff, pw);
      for (std::int64_t m = 0; m <= cutoff; ++m) out[m] = from_u128(merge_count(a, b, m));
      return out;
    }
  }
  throw DomainError("unknown count method");
}

PointSet enumerate_points(const SphereSpec& spec, std::size_t max_points) {
  spec.validate();
  const auto expected = count_points(spec, CountMethod::series);
  if (expected > BigInt(static_cast<unsigned long>(max_points))) {
    throw WorkBoundExceeded("enumerate_points: " + expected.get_str() + " points exceed memory bound");
  }
  const int k = spec.degree;
  const int d = spec.dimension;
  const auto pw = power_table(k, spec.power_value);
  const auto top = static_cast<std::int32_t>(pw.size()) - 1;
  PointSet out(d);
  std::vector<std::int32_t> cur(d, 0);
  // lexicographic: each coordinate ascends from -top to top
  auto rec = [&](auto&& self, int level, std::int64_t partial) -> void {
    const std::int64_t rem = spec.power_value - partial;
    if (level == d - 1) {
      const std::int64_t j = iroot(rem, k);
      if (pw[j] != rem) return;
      if (j == 0) {
        cur[level] = 0;
        out.push_back(cur);
      } else {
        cur[level] = static_cast<std::int32_t>(-j);
        out.push_back(cur);
        cur[level] = static_cast<std::int32_t>(j);
        out.push_back(cur);
      }
      return;
    }
    for (std::int32_t x = -top; x <= top; ++x) {
      const std::int64_t p = pw[static_cast<std::size_t>(x < 0 ? -x : x)];
      if (p > rem) continue;
      cur[level] = x;
      self(self, level + 1, partial + p);
    }
  };
  rec(rec, 0, 0);
  return out;
}

CoefficientSeries one_dim_series(int degree, std::int64_t cutoff) {
  if (degree < 1) throw DomainError("degree must be >= 1");
  if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
  CoefficientSeries s;
  s.cutoff = cutoff;
  s.coeffs.assign(static_cast<std::size_t>(cutoff) + 1, BigInt(0));
  s.coeffs[0] = 1;
  for (std::int64_t n = 1;; ++n) {
    const std::int64_t p = ipow_checked(n, degree);
    if (p > cutoff) break;
    s.coeffs[p] = 2;
  }
  return s;
}

CoefficientSeries convolve_series(const CoefficientSeries& a, const CoefficientSeries& b) {
  if (a.cutoff != b.cutoff) throw DomainError("convolve_series: cutoff mismatch");
  CoefficientSeries out;
  out.cutoff = a.cutoff;
  out.coeffs.assign(a.coeffs.size(), BigInt(0));
  // iterate over the sparser operand's support
  std::vector<std::int64_t> support_b;
  for (std::int64_t j = 0; j <= b.cutoff; ++j) {
    if (sgn(b[j]) != 0) support_b.push_back(j);
  }
  for (std::int64_t i = 0; i <= a.cutoff; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::int64_t j : support_b) {
      if (i + j > a.cutoff) break;
      mpz_addmul(out.coeffs[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

CoefficientSeries power_series(const CoefficientSeries& a, int times) {
  if (times < 1) throw DomainError("power_series: times >= 1");
  CoefficientSeries acc = a;
  for (int i = 1; i < times; ++i) acc = convolve_series(acc, a);
  return acc;
}

std::vector<bool> representable_mask(int degree, int dimension, std::int64_t cutoff) {
  if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
  const std::size_t bits = static_cast<std::size_t>(cutoff) + 1;
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::uint64_t> cur(words, 0), next(words, 0);
  cur[0] = 1;
  std::vector<std::int64_t> powers;
  for (std::int64_t n = 0;; ++n) {
    const std::int64_t p = ipow_checked(n, degree);
    if (p > cutoff) break;
    powers.push_back(p);
  }
  const std::uint64_t tail_mask = (bits % 64 == 0) ? ~0ULL : ((1ULL << (bits % 64)) - 1);
  for (int step = 0; step < dimension; ++step) {
    std::fill(next.begin(), next.end(), 0);
    for (std::int64_t p : powers) {
      const std::size_t ws = static_cast<std::size_t>(p) / 64;
      const unsigned bs = static_cast<unsigned>(p % 64);
      for (std::size_t w = words; w-- > ws;) {
        std::uint64_t v = cur[w - ws] << bs;
        if (bs != 0 && w - ws >= 1) v |= cur[w - ws - 1] >> (64 - bs);
        next[w] |= v;
      }
    }
    next[words - 1] &= tail_mask;
    cur.swap(next);
  }
  std::vector<bool> out(bits);
  for (std::size_t m = 0; m < bits; ++m) out[m] = (cur[m / 64] >> (m % 64)) & 1u;
  return out;
}

bool is_acceptable(const SphereSpec& spec) {
  spec.validate();
  const int k = spec.degree;
  const int d = spec.dimension;
  // coordinates in nonincreasing order n_1 >= n_2 >= ... >= 0
  auto rec = [&](auto&& self, int level, std::int64_t rem, std::int64_t cap) -> bool {
    if (level == d - 1) {
      const std::int64_t j = iroot(rem, k);
      return j <= cap && ipow_checked(j, k) == rem;
    }
    const int left = d - level - 1;
    for (std::int64_t x = std::min(cap, iroot(rem, k)); x >= 0; --x) {
      const std::int64_t p = ipow_checked(x, k);
      // remaining coordinates are each <= x
      if (static_cast<__int128>(rem - p) > static_cast<__int128>(left) * p) break;
      if (self(self, level + 1, rem - p, x)) return true;
    }
    return false;
  };
  return rec(rec, 0, spec.power_value, iroot(spec.power_value, k));
}

RadiusSequence acceptable_radii(int degree, int dimension, std::int64_t cutoff) {
  validate_kd(degree, dimension);
  if (cutoff < 1) throw DomainError("acceptable_radii: cutoff >= 1");
  const auto mask = representable_mask(degree, dimension, cutoff);
  RadiusSequence seq{degree, dimension, {}, "full"};
  for (std::int64_t m = 1; m <= cutoff; ++m) {
    if (mask[m]) seq.members.push_back(m);
  }
  return seq;
}

RadiusSequence build_sequence(const SequenceKind& kind, int degree, int dimension, std::int64_t cutoff) {
  validate_kd(degree, dimension);
  RadiusSequence seq{degree, dimension, {}, ""};
  auto acceptable = [&](std::int64_t m) { return is_acceptable(SphereSpec{degree, dimension, m}); };

  if (const auto* lac = std::get_if<Lacunary>(&kind)) {
    if (!(lac->base > 1.0)) throw DomainError("lacunary base must exceed 1");
    seq.label = "lacunary";
    for (int j = 0;; ++j) {
      const long double target_f = std::ceil(std::pow(static_cast<long double>(lac->base), j) - 1e-12L);
      if (target_f > static_cast<long double>(cutoff)) break;
      std::int64_t m = std::max<std::int64_t>(1, static_cast<std::int64_t>(target_f));
      if (!seq.members.empty()) m = std::max(m, seq.members.back() + 1);
      while (m <= cutoff && !acceptable(m)) ++m;
      if (m > cutoff) break;
      seq.members.push_back(m);
    }
  } else if (const auto* sup = std::get_if<Superlacunary>(&kind)) {
    if (!(sup->exponent > 1.0)) throw DomainError("superlacunary exponent must exceed 1");
    seq.label = "superlacunary";
    for (int j = 1;; ++j) {
      const double h_f = std::floor(std::pow(2.0, std::pow(static_cast<double>(j), sup->exponent)));
      // the product of the first h primes outgrows any int64 cutoff quickly
      if (h_f > 64) break;
      const auto h = static_cast<std::size_t>(h_f);
      const auto primes = first_primes(h);
      __int128 prod = 1;
      bool over = false;
      for (std::int64_t p : primes) {
        prod *= p;
        if (prod >= cutoff) {
          over = true;
          break;
        }
      }
      if (over) break;
      const auto m = static_cast<std::int64_t>(prod) + 1;
      if (acceptable(m) && (seq.members.empty() || m > seq.members.back())) seq.members.push_back(m);
    }
  } else {
    const auto& custom = std::get<CustomSequence>(kind);
    seq.label = "custom";
    auto list = custom.members;
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (std::int64_t m : list) {
      if (m < 1) throw DomainError("custom radius power values must be >= 1");
      if (m > cutoff) continue;
      if (!acceptable(m)) throw DomainError("custom entry " + std::to_string(m) + " is not an acceptable radius");
      seq.members.push_back(m);
    }
  }
  if (seq.members.empty()) throw DomainError("build_sequence: empty result");
  return seq;
}

}  // namespace ksphere
