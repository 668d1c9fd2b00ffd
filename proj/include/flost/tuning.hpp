#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "flost/estimator.hpp"
#include "flost/observation.hpp"

namespace flost {

/// Grid of (scale1, scale2) multipliers applied to a base configuration's
/// (lambda1, lambda2), evaluated against a held-out slice of the
/// observations.
struct TuningSpec {
  double holdout_fraction = 0.10;
  std::vector<std::pair<double, double>> grid;
  std::uint64_t seed = 0;
};

struct TuningRow {
  double scale1 = 1.0;
  double scale2 = 1.0;
  double validation_rmse = 0.0;
};

struct TuningResult {
  RegularizationConfig best;
  double best_scale1 = 1.0;
  double best_scale2 = 1.0;
  std::vector<TuningRow> table;
};

/// Disjoint partition of the entries; |val| = round(fraction * |entries|),
/// deterministic in the seed. When p is given, train.p becomes
/// p (1 - fraction) and val.p becomes p * fraction, so rescaling by the
/// thinned rate stays unbiased.
std::pair<ObservationSet, ObservationSet> split_validation(const ObservationSet& obs,
                                                           double fraction, std::uint64_t seed);

/// Fits every grid point on the training split and scores it by RMSE
/// between the reconstruction and the held-out observed values. Ties are
/// broken toward the smallest (scale1, scale2).
TuningResult grid_search(const ObservationSet& obs, const RegularizationConfig& base,
                         const TuningSpec& spec, int threads = 0);

/// steps values of 10^e with e evenly spaced over [log10_min, log10_max].
std::vector<double> log_spaced(double log10_min, double log10_max, index_t steps);

}  // namespace flost
