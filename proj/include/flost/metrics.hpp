#pragma once

#include <string>
#include <vector>

#include "flost/observation.hpp"
#include "flost/tensor.hpp"

namespace flost {

/// RMSE over an index set. count == 0 flags an absent report (value is NaN),
/// which percentile filtering can produce.
struct RmseReport {
  std::string label;
  index_t count = 0;
  double value = 0.0;

  bool absent() const { return count == 0; }
};

/// Evaluation index set: everything, the observed entries, their
/// complement, or an explicit list of linear indices.
class IndexSet {
 public:
  enum class Kind { All, Observed, Missing, Explicit };

  static IndexSet all(Dims3 dims);
  static IndexSet observed(const ObservationSet& obs);
  static IndexSet missing(const ObservationSet& obs);
  static IndexSet explicit_list(Dims3 dims, std::vector<index_t> linear);

  Kind kind() const { return kind_; }
  const Dims3& dims() const { return dims_; }
  index_t size() const;
  const std::string& label() const { return label_; }

  template <class F>
  void for_each(F&& f) const {
    switch (kind_) {
      case Kind::All:
        for (index_t idx = 0; idx < dims_.size(); ++idx) f(idx);
        break;
      case Kind::Explicit:
      case Kind::Observed:
        for (index_t idx : linear_) f(idx);
        break;
      case Kind::Missing: {
        std::size_t next = 0;
        for (index_t idx = 0; idx < dims_.size(); ++idx) {
          if (next < linear_.size() && linear_[next] == idx) {
            ++next;
            continue;
          }
          f(idx);
        }
        break;
      }
    }
  }

 private:
  IndexSet(Kind kind, Dims3 dims, std::vector<index_t> linear, std::string label);

  Kind kind_;
  Dims3 dims_;
  std::vector<index_t> linear_;  // sorted; complement for Missing
  std::string label_;
};

/// RMSE(delta) = ||P_delta(est - truth)||_F / sqrt(|delta|).
RmseReport rmse(const DenseTensor3& est, const DenseTensor3& truth, const IndexSet& delta,
                const std::string& label = "");

/// For each quantile q, the RMSE restricted to indices of delta whose truth
/// value strictly exceeds the q-th empirical percentile of the full truth
/// tensor (nearest-rank). q = 0 applies no filter.
std::vector<RmseReport> percentile_rmse(const DenseTensor3& est, const DenseTensor3& truth,
                                        const IndexSet& delta, const std::vector<double>& quantiles);

/// One RMSE per contiguous time interval of chunk_len frames; the last
/// chunk may be short.
std::vector<RmseReport> chunked_rmse(const DenseTensor3& est, const DenseTensor3& truth,
                                     const IndexSet& delta, index_t chunk_len);

/// Circularly shifts the second mode per frame: output column
/// (j + offsets[t]) mod N of frame t is input column j.
DenseTensor3 localtime_shift(const DenseTensor3& x, const std::vector<index_t>& offsets);

}  // namespace flost
