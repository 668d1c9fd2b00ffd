#include "flost/observation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace flost {

void ObservationSet::validate() const {
  DenseTensor3::check_size(dims);
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("ObservationSet: p must be in (0,1], got " + std::to_string(p));
  std::unordered_set<index_t> seen;
  seen.reserve(entries.size());
  for (const ObservationEntry& e : entries) {
    if (e.i < 0 || e.i >= dims.m || e.j < 0 || e.j >= dims.n || e.t < 0 || e.t >= dims.t)
      throw std::invalid_argument("ObservationSet: index (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + "," + std::to_string(e.t) +
                                  ") out of range");
    if (!std::isfinite(e.value))
      throw std::invalid_argument("ObservationSet: non-finite value at (" + std::to_string(e.i) +
                                  "," + std::to_string(e.j) + "," + std::to_string(e.t) + ")");
    if (!seen.insert(linear_index(e)).second)
      throw std::invalid_argument("ObservationSet: duplicate index (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + "," + std::to_string(e.t) + ")");
  }
}

}  // namespace flost
