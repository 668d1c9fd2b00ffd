#include "flost/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "flost/dft.hpp"
#include "flost/errors.hpp"
#include "flost/parallel.hpp"

namespace flost {

void RegularizationConfig::validate(const Dims3& dims) const {
  const index_t half = SliceIndexPlan::half_slices(dims.t);
  if (k < 1 || k > half)
    throw std::invalid_argument("RegularizationConfig: K must be in [1, " + std::to_string(half) +
                                "], got " + std::to_string(k));
  if (static_cast<index_t>(lambda1.size()) != k)
    throw std::invalid_argument("RegularizationConfig: lambda1 must have K entries");
  for (double l : lambda1)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument("RegularizationConfig: lambda1 entries must be nonnegative");
  if (k < half && (!(lambda2 >= 0.0) || !std::isfinite(lambda2)))
    throw std::invalid_argument("RegularizationConfig: lambda2 must be nonnegative");
}

RegularizationConfig RegularizationConfig::scaled(double scale1, double scale2) const {
  RegularizationConfig out = *this;
  for (double& l : out.lambda1) l *= scale1;
  out.lambda2 *= scale2;
  return out;
}

double effective_sampling_rate(const ObservationSet& obs) {
  if (obs.p_source == PSource::Given) return obs.p;
  if (obs.entries.empty()) return 1.0;
  return static_cast<double>(obs.entries.size()) / static_cast<double>(obs.dims.size());
}

DenseTensor3 rescaled_projection(const ObservationSet& obs) {
  obs.validate();
  const double p = effective_sampling_rate(obs);
  DenseTensor3 out(obs.dims);
  for (const ObservationEntry& e : obs.entries) out(e.i, e.j, e.t) = e.value / p;
  return out;
}

ComplexMatrix observation_slice(const ObservationSet& obs, index_t l, double p) {
  const Dims3 d = obs.dims;
  if (l < 0 || l >= d.t) throw std::out_of_range("observation_slice: slice index out of range");
  const std::vector<cxd> w = fourier_row(d.t, l);
  const double scale = 1.0 / (p * std::sqrt(static_cast<double>(d.t)));
  ComplexMatrix out = ComplexMatrix::Zero(d.m, d.n);
  for (const ObservationEntry& e : obs.entries) out(e.i, e.j) += e.value * w[e.t];
  return out * scale;
}

FitWorkspace::FitWorkspace(const ObservationSet& obs, index_t k, int threads) {
  obs.validate();
  const SliceIndexPlan plan(obs.dims.t, k);
  dims_ = obs.dims;
  k_ = k;
  p_ = effective_sampling_rate(obs);
  slice_svd_.resize(k_);
  tail_.resize(plan.half - k_);
  parallel_for(plan.half, threads, [&](index_t l) {
    ComplexMatrix b = observation_slice(obs, l, p_);
    if (l < k_) {
      try {
        slice_svd_[l] = complex_svd(b);
      } catch (const SvdError& e) {
        throw SvdError(e.what(), l);
      }
    } else {
      tail_[l - k_] = std::move(b);
    }
  });
}

FlostModel FitWorkspace::solve(const RegularizationConfig& cfg) const {
  cfg.validate(dims_);
  if (cfg.k != k_)
    throw std::invalid_argument("FitWorkspace::solve: config K does not match workspace K");
  FlostModel model;
  model.dims = dims_;
  model.k = k_;
  model.fitted_lambdas = cfg;
  model.lowrank.resize(k_);
  for (index_t l = 0; l < k_; ++l)
    model.lowrank[l] = shrink_factors(slice_svd_[l], cfg.lambda1[l]);
  for (index_t off = 0; off < static_cast<index_t>(tail_.size()); ++off) {
    const ComplexMatrix& b = tail_[off];
    for (index_t i = 0; i < dims_.m; ++i)
      for (index_t j = 0; j < dims_.n; ++j) {
        const cxd z = complex_soft_threshold(b(i, j), cfg.lambda2);
        if (z.real() != 0.0 || z.imag() != 0.0)
          model.sparse_tail.push_back(TailEntry{k_ + off, i, j, z});
      }
  }
  return model;
}

FlostModel fit(const ObservationSet& obs, const RegularizationConfig& cfg, int threads) {
  return FitWorkspace(obs, cfg.k, threads).solve(cfg);
}

namespace {

std::vector<ComplexMatrix> densify_front(const FlostModel& model) {
  const SliceIndexPlan plan(model.dims.t, model.k);
  std::vector<ComplexMatrix> front(plan.half);
  for (index_t l = 0; l < plan.half; ++l)
    front[l] = (l < model.k) ? model.lowrank[l].compose()
                             : ComplexMatrix::Zero(model.dims.m, model.dims.n);
  for (const TailEntry& e : model.sparse_tail) {
    if (e.slice < model.k || e.slice >= plan.half)
      throw std::invalid_argument("reconstruct: tail entry outside sparse slice range");
    front[e.slice](e.i, e.j) = e.value;
  }
  return front;
}

}  // namespace

DenseTensor3 reconstruct(const FlostModel& model) {
  return mode3_idft(conjugate_symmetrize(densify_front(model), model.dims.t));
}

std::vector<double> reconstruct_at(const FlostModel& model, const std::vector<Index3>& at) {
  const std::vector<ComplexMatrix> front = densify_front(model);
  const Dims3 d = model.dims;
  const SliceIndexPlan plan(d.t, model.k);
  // inverse twiddles e^(+2 pi i e / T) for reduced exponents e
  std::vector<cxd> tw(d.t);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (index_t e = 0; e < d.t; ++e) {
    const double angle = kTwoPi * static_cast<double>(e) / static_cast<double>(d.t);
    tw[e] = cxd(std::cos(angle), std::sin(angle));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d.t));
  std::vector<double> out;
  out.reserve(at.size());
  for (const Index3& q : at) {
    if (q.i < 0 || q.i >= d.m || q.j < 0 || q.j >= d.n || q.t < 0 || q.t >= d.t)
      throw std::out_of_range("reconstruct_at: index out of range");
    double acc = front[0](q.i, q.j).real();
    for (index_t l = 1; l < plan.half; ++l) {
      const cxd w = tw[(l * q.t) % d.t];
      if (plan.self_conjugate(l))
        acc += front[l](q.i, q.j).real() * w.real();
      else
        acc += 2.0 * (front[l](q.i, q.j) * w).real();
    }
    out.push_back(acc * scale);
  }
  return out;
}

RegularizationConfig theorem_lambda_schedule(index_t m, index_t n, index_t t, double p,
                                             double sigma_gamma, double c1, double c2, index_t k) {
  if (m < 1 || n < 1 || t < 1)
    throw std::invalid_argument("theorem_lambda_schedule: dims must be positive");
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("theorem_lambda_schedule: p must be in (0,1]");
  if (sigma_gamma < 0.0)
    throw std::invalid_argument("theorem_lambda_schedule: sigma_gamma must be nonnegative");
  const SliceIndexPlan plan(t, k);
  const double mn = static_cast<double>(std::max(m, n));
  const double mnt = static_cast<double>(std::max({m, n, t}));
  const double sqrt_t = std::sqrt(static_cast<double>(t));
  const double log_mn = std::log(mn);
  const double log_mnt = std::log(mnt);
  const double lam1 = c1 * sigma_gamma *
                      (std::sqrt(mn * log_mn / p) + std::sqrt(log_mn * log_mn * log_mn) / (p * sqrt_t));
  const double lam2 = c2 * sigma_gamma * (std::sqrt(log_mnt / p) + log_mnt / (sqrt_t * p));
  RegularizationConfig cfg;
  cfg.k = k;
  cfg.lambda1.assign(k, lam1);
  cfg.lambda2 = lam2;
  cfg.c1 = c1;
  cfg.c2 = c2;
  cfg.sigma_gamma = sigma_gamma;
  return cfg;
}

BoundReport error_bound(const RegularizationConfig& cfg, const std::vector<index_t>& ranks,
                        index_t s) {
  if (static_cast<index_t>(ranks.size()) != cfg.k)
    throw std::invalid_argument("error_bound: ranks must have K entries");
  BoundReport report;
  report.lowrank_terms.reserve(ranks.size());
  for (index_t l = 0; l < cfg.k; ++l) {
    const double term = 16.0 * cfg.lambda1[l] * cfg.lambda1[l] * static_cast<double>(ranks[l]);
    report.lowrank_terms.push_back(term);
    report.bound_value += term;
  }
  report.sparse_term = 16.0 * cfg.lambda2 * cfg.lambda2 * static_cast<double>(s);
  report.bound_value += report.sparse_term;
  return report;
}

index_t parameter_count(const FlostModel& model) {
  index_t count = 0;
  for (const SvdFactors& f : model.lowrank)
    count += f.rank() * (model.dims.m + model.dims.n + 1);
  return count + 2 * static_cast<index_t>(model.sparse_tail.size());
}

}  // namespace flost
