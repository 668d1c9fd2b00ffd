#include "flost/tuning.hpp"

#include <cmath>
#include <stdexcept>

#include "flost/rng.hpp"

namespace flost {

namespace {
constexpr std::uint64_t kStreamSplit = 3;
}

std::pair<ObservationSet, ObservationSet> split_validation(const ObservationSet& obs,
                                                           double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction >= 1.0)
    throw std::invalid_argument("split_validation: fraction must be in (0,1)");
  obs.validate();
  const index_t n = static_cast<index_t>(obs.entries.size());
  const index_t n_val = static_cast<index_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_val < 1 || n_val >= n)
    throw std::invalid_argument("split_validation: too few entries for a " +
                                std::to_string(fraction) + " holdout");

  std::vector<index_t> order(n);
  for (index_t i = 0; i < n; ++i) order[i] = i;
  RandomStream stream(seed, kStreamSplit);
  for (index_t i = n - 1; i > 0; --i) {
    const index_t j = static_cast<index_t>(stream.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> in_val(n, false);
  for (index_t i = 0; i < n_val; ++i) in_val[order[i]] = true;

  ObservationSet train;
  ObservationSet val;
  train.dims = val.dims = obs.dims;
  train.p_source = val.p_source = obs.p_source;
  train.p = obs.p_source == PSource::Given ? obs.p * (1.0 - fraction) : obs.p;
  val.p = obs.p_source == PSource::Given ? obs.p * fraction : obs.p;
  train.entries.reserve(n - n_val);
  val.entries.reserve(n_val);
  for (index_t i = 0; i < n; ++i)
    (in_val[i] ? val : train).entries.push_back(obs.entries[i]);
  return {std::move(train), std::move(val)};
}

TuningResult grid_search(const ObservationSet& obs, const RegularizationConfig& base,
                         const TuningSpec& spec, int threads) {
  if (spec.grid.empty()) throw std::invalid_argument("grid_search: empty grid");
  auto [train, val] = split_validation(obs, spec.holdout_fraction, spec.seed);

  std::vector<Index3> val_at;
  val_at.reserve(val.entries.size());
  for (const ObservationEntry& e : val.entries) val_at.push_back({e.i, e.j, e.t});

  const FitWorkspace workspace(train, base.k, threads);
  TuningResult result;
  result.table.reserve(spec.grid.size());
  std::size_t best_index = 0;
  for (const auto& [s1, s2] : spec.grid) {
    if (!(s1 > 0.0) || !(s2 > 0.0))
      throw std::invalid_argument("grid_search: scales must be positive");
    const FlostModel model = workspace.solve(base.scaled(s1, s2));
    const std::vector<double> pred = reconstruct_at(model, val_at);
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = pred[i] - val.entries[i].value;
      sum += d * d;
    }
    result.table.push_back({s1, s2, std::sqrt(sum / static_cast<double>(pred.size()))});
    const TuningRow& row = result.table.back();
    const TuningRow& best = result.table[best_index];
    if (row.validation_rmse < best.validation_rmse ||
        (row.validation_rmse == best.validation_rmse &&
         std::pair(row.scale1, row.scale2) < std::pair(best.scale1, best.scale2)))
      best_index = result.table.size() - 1;
  }
  result.best_scale1 = result.table[best_index].scale1;
  result.best_scale2 = result.table[best_index].scale2;
  result.best = base.scaled(result.best_scale1, result.best_scale2);
  return result;
}

std::vector<double> log_spaced(double log10_min, double log10_max, index_t steps) {
  if (steps < 1) throw std::invalid_argument("log_spaced: steps must be positive");
  std::vector<double> out;
  out.reserve(steps);
  if (steps == 1) {
    out.push_back(std::pow(10.0, log10_min));
    return out;
  }
  const double step = (log10_max - log10_min) / static_cast<double>(steps - 1);
  for (index_t i = 0; i < steps; ++i)
    out.push_back(std::pow(10.0, log10_min + step * static_cast<double>(i)));
  return out;
}

}  // namespace flost
