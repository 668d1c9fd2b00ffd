#pragma once

#include <cstdint>
#include <vector>

#include "flost/tensor.hpp"

namespace flost {

struct Index3 {
  index_t i = 0;
  index_t j = 0;
  index_t t = 0;
  bool operator==(const Index3&) const = default;
};

struct ObservationEntry {
  index_t i = 0;
  index_t j = 0;
  index_t t = 0;
  double value = 0.0;
};

enum class PSource { Given, Estimated };

/// Sparse set of observed tensor entries together with the Bernoulli
/// sampling rate p. When p_source is Estimated the estimator replaces p by
/// the empirical rate |entries| / (M N T).
struct ObservationSet {
  Dims3 dims;
  std::vector<ObservationEntry> entries;
  double p = 1.0;
  PSource p_source = PSource::Given;

  index_t linear_index(const ObservationEntry& e) const {
    return (e.i * dims.n + e.j) * dims.t + e.t;
  }

  /// Checks index ranges, duplicate indices, p in (0,1], and finite values.
  /// Throws std::invalid_argument on the first violation.
  void validate() const;
};

}  // namespace flost
