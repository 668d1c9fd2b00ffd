#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace flost {

using cxd = std::complex<double>;
using index_t = std::int64_t;

struct Dims3 {
  index_t m = 0;
  index_t n = 0;
  index_t t = 0;

  index_t size() const { return m * n * t; }
  bool operator==(const Dims3&) const = default;
};

/// Partition of the frequency slices of a length-T stack. Indices are
/// 0-based: slice 0 is DC, slices [0,k) are the low-rank band, [k,half) the
/// sparse tail, and [half,t) mirror the first half by conjugation.
struct SliceIndexPlan {
  index_t t = 0;
  index_t k = 0;
  index_t half = 0;  // number of non-redundant slices, T/2 + 1

  SliceIndexPlan(index_t T, index_t K) : t(T), k(K), half(half_slices(T)) {
    if (T < 1) throw std::invalid_argument("SliceIndexPlan: T must be positive");
    if (K < 1 || K > half) throw std::invalid_argument("SliceIndexPlan: K out of range [1, T/2+1]");
  }

  static index_t half_slices(index_t T) { return T / 2 + 1; }

  /// Slice whose conjugate equals slice l; DC maps to itself.
  index_t mirror(index_t l) const { return l == 0 ? 0 : t - l; }

  /// DC, and the Nyquist slice for even T, are their own mirrors and real.
  bool self_conjugate(index_t l) const { return l == 0 || (t % 2 == 0 && l == t / 2); }
};

/// Dense real M x N x T tensor. Storage is row-major with the time index
/// fastest, so every tube x(i,j,:) is contiguous.
class DenseTensor3 {
 public:
  DenseTensor3() = default;
  explicit DenseTensor3(Dims3 dims, double fill = 0.0)
      : dims_(dims), values_(check_size(dims), fill) {}
  DenseTensor3(Dims3 dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
    if (static_cast<index_t>(values_.size()) != check_size(dims))
      throw std::invalid_argument("DenseTensor3: value count does not match dims");
  }

  const Dims3& dims() const { return dims_; }
  index_t size() const { return dims_.size(); }

  index_t linear_index(index_t i, index_t j, index_t t) const {
    return (i * dims_.n + j) * dims_.t + t;
  }
  double operator()(index_t i, index_t j, index_t t) const {
    return values_[linear_index(i, j, t)];
  }
  double& operator()(index_t i, index_t j, index_t t) { return values_[linear_index(i, j, t)]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  static index_t check_size(Dims3 d) {
    if (d.m < 1 || d.n < 1 || d.t < 1)
      throw std::invalid_argument("DenseTensor3: dims must be positive");
    return d.size();
  }

 private:
  Dims3 dims_;
  std::vector<double> values_;
};

/// Complex M x N x T frequency stack, same layout as DenseTensor3. The
/// conjugate_symmetric flag records that slice l equals conj(slice T-l) and
/// that the DC (and Nyquist) slices are real, which is what makes the
/// inverse transform land back in the reals.
class ComplexTensor3 {
 public:
  ComplexTensor3() = default;
  explicit ComplexTensor3(Dims3 dims, cxd fill = cxd(0.0, 0.0))
      : dims_(dims), values_(DenseTensor3::check_size(dims), fill) {}

  const Dims3& dims() const { return dims_; }
  index_t size() const { return dims_.size(); }

  index_t linear_index(index_t i, index_t j, index_t t) const {
    return (i * dims_.n + j) * dims_.t + t;
  }
  cxd operator()(index_t i, index_t j, index_t t) const { return values_[linear_index(i, j, t)]; }
  cxd& operator()(index_t i, index_t j, index_t t) { return values_[linear_index(i, j, t)]; }

  const std::vector<cxd>& values() const { return values_; }
  std::vector<cxd>& values() { return values_; }

  bool conjugate_symmetric() const { return conjugate_symmetric_; }
  void set_conjugate_symmetric(bool flag) { conjugate_symmetric_ = flag; }

 private:
  Dims3 dims_;
  std::vector<cxd> values_;
  bool conjugate_symmetric_ = false;
};

double frobenius_norm(const DenseTensor3& x);
double frobenius_norm(const ComplexTensor3& x);

}  // namespace flost
