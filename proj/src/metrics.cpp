#include "flost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace flost {

IndexSet::IndexSet(Kind kind, Dims3 dims, std::vector<index_t> linear, std::string label)
    : kind_(kind), dims_(dims), linear_(std::move(linear)), label_(std::move(label)) {
  DenseTensor3::check_size(dims_);
  for (index_t idx : linear_)
    if (idx < 0 || idx >= dims_.size())
      throw std::invalid_argument("IndexSet: linear index out of range");
  std::sort(linear_.begin(), linear_.end());
  if (std::adjacent_find(linear_.begin(), linear_.end()) != linear_.end())
    throw std::invalid_argument("IndexSet: duplicate index");
}

IndexSet IndexSet::all(Dims3 dims) { return IndexSet(Kind::All, dims, {}, "all"); }

IndexSet IndexSet::observed(const ObservationSet& obs) {
  std::vector<index_t> linear;
  linear.reserve(obs.entries.size());
  for (const ObservationEntry& e : obs.entries) linear.push_back(obs.linear_index(e));
  return IndexSet(Kind::Observed, obs.dims, std::move(linear), "observed");
}

IndexSet IndexSet::missing(const ObservationSet& obs) {
  std::vector<index_t> linear;
  linear.reserve(obs.entries.size());
  for (const ObservationEntry& e : obs.entries) linear.push_back(obs.linear_index(e));
  return IndexSet(Kind::Missing, obs.dims, std::move(linear), "missing");
}

IndexSet IndexSet::explicit_list(Dims3 dims, std::vector<index_t> linear) {
  return IndexSet(Kind::Explicit, dims, std::move(linear), "explicit");
}

index_t IndexSet::size() const {
  switch (kind_) {
    case Kind::All:
      return dims_.size();
    case Kind::Observed:
    case Kind::Explicit:
      return static_cast<index_t>(linear_.size());
    case Kind::Missing:
      return dims_.size() - static_cast<index_t>(linear_.size());
  }
  return 0;
}

namespace {

void check_dims(const DenseTensor3& est, const DenseTensor3& truth, const IndexSet& delta) {
  if (!(est.dims() == truth.dims()) || !(est.dims() == delta.dims()))
    throw std::invalid_argument("rmse: estimate, truth and index set dims must match");
}

}  // namespace

RmseReport rmse(const DenseTensor3& est, const DenseTensor3& truth, const IndexSet& delta,
                const std::string& label) {
  check_dims(est, truth, delta);
  if (delta.size() == 0) throw std::invalid_argument("rmse: empty index set");
  double sum = 0.0;
  const std::vector<double>& a = est.values();
  const std::vector<double>& b = truth.values();
  delta.for_each([&](index_t idx) {
    const double d = a[idx] - b[idx];
    sum += d * d;
  });
  RmseReport report;
  report.label = label.empty() ? delta.label() : label;
  report.count = delta.size();
  report.value = std::sqrt(sum / static_cast<double>(report.count));
  return report;
}

std::vector<RmseReport> percentile_rmse(const DenseTensor3& est, const DenseTensor3& truth,
                                        const IndexSet& delta,
                                        const std::vector<double>& quantiles) {
  check_dims(est, truth, delta);
  for (double q : quantiles)
    if (!(q >= 0.0) || q >= 1.0)
      throw std::invalid_argument("percentile_rmse: quantiles must lie in [0,1)");

  // nearest-rank thresholds over the flattened full truth tensor
  std::vector<double> sorted = truth.values();
  std::sort(sorted.begin(), sorted.end());
  const index_t n = static_cast<index_t>(sorted.size());

  const std::vector<double>& a = est.values();
  const std::vector<double>& b = truth.values();
  std::vector<RmseReport> reports;
  reports.reserve(quantiles.size());
  for (double q : quantiles) {
    char label[32];
    std::snprintf(label, sizeof(label), "q%g", q);
    RmseReport report;
    report.label = label;
    if (q == 0.0) {
      report = rmse(est, truth, delta, label);
    } else {
      const index_t rank = std::max<index_t>(
          1, static_cast<index_t>(std::ceil(q * static_cast<double>(n))));
      const double threshold = sorted[rank - 1];
      double sum = 0.0;
      index_t count = 0;
      delta.for_each([&](index_t idx) {
        if (b[idx] > threshold) {
          const double d = a[idx] - b[idx];
          sum += d * d;
          ++count;
        }
      });
      report.count = count;
      report.value =
          count > 0 ? std::sqrt(sum / static_cast<double>(count)) : std::numeric_limits<double>::quiet_NaN();
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<RmseReport> chunked_rmse(const DenseTensor3& est, const DenseTensor3& truth,
                                     const IndexSet& delta, index_t chunk_len) {
  check_dims(est, truth, delta);
  if (chunk_len < 1) throw std::invalid_argument("chunked_rmse: chunk_len must be positive");
  const index_t t_len = est.dims().t;
  const index_t chunks = (t_len + chunk_len - 1) / chunk_len;
  std::vector<double> sums(chunks, 0.0);
  std::vector<index_t> counts(chunks, 0);
  const std::vector<double>& a = est.values();
  const std::vector<double>& b = truth.values();
  delta.for_each([&](index_t idx) {
    const index_t chunk = (idx % t_len) / chunk_len;
    const double d = a[idx] - b[idx];
    sums[chunk] += d * d;
    ++counts[chunk];
  });
  std::vector<RmseReport> reports(chunks);
  for (index_t c = 0; c < chunks; ++c) {
    reports[c].label = "chunk" + std::to_string(c);
    reports[c].count = counts[c];
    reports[c].value = counts[c] > 0 ? std::sqrt(sums[c] / static_cast<double>(counts[c]))
                                     : std::numeric_limits<double>::quiet_NaN();
  }
  return reports;
}

DenseTensor3 localtime_shift(const DenseTensor3& x, const std::vector<index_t>& offsets) {
  const Dims3 d = x.dims();
  if (static_cast<index_t>(offsets.size()) != d.t)
    throw std::invalid_argument("localtime_shift: offsets must have T entries");
  DenseTensor3 out(d);
  for (index_t t = 0; t < d.t; ++t) {
    const index_t off = ((offsets[t] % d.n) + d.n) % d.n;
    for (index_t i = 0; i < d.m; ++i)
      for (index_t j = 0; j < d.n; ++j) out(i, (j + off) % d.n, t) = x(i, j, t);
  }
  return out;
}

}  // namespace flost
