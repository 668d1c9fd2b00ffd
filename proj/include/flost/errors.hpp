#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flost {

/// Inverse transform was asked to produce a real tensor from a frequency
/// stack whose conjugate symmetry is broken beyond tolerance.
class SymmetryViolation : public std::runtime_error {
 public:
  explicit SymmetryViolation(const std::string& what) : std::runtime_error(what) {}
};

/// SVD of a frequency slice failed (non-finite input or no convergence).
class SvdError : public std::runtime_error {
 public:
  explicit SvdError(const std::string& what, std::int64_t slice = -1)
      : std::runtime_error(slice >= 0 ? what + " (slice " + std::to_string(slice) + ")" : what),
        slice_(slice) {}
  std::int64_t slice() const { return slice_; }

 private:
  std::int64_t slice_;
};

}  // namespace flost
