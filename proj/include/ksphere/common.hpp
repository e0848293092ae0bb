#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace ksphere {

using BigInt = mpz_class;
using Complex = std::complex<double>;

/// Raised when an input violates an operation's precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a request would exceed the configured work bound. Callers are
/// expected to retry with a cheaper method or smaller parameters.
class WorkBoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-call cap on elementary operations (lattice points visited, terms
/// summed). Defaults to KSPHERE_WORK_BOUND when set, else 4e9.
struct WorkBound {
  double limit;

  static WorkBound from_env();
  void check(double work, const std::string& what) const;
};

std::string to_string(const BigInt& v);

}  // namespace ksphere
