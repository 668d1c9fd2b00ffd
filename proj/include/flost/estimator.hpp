#pragma once

#include <vector>

#include "flost/observation.hpp"
#include "flost/prox.hpp"
#include "flost/tensor.hpp"

namespace flost {

/// Per-slice nuclear-norm weights lambda1 (one per low-rank slice),
/// entrywise weight lambda2 for the sparse tail, and the schedule constants
/// they were derived from.
struct RegularizationConfig {
  index_t k = 1;
  std::vector<double> lambda1;
  double lambda2 = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double sigma_gamma = 1.0;

  void validate(const Dims3& dims) const;
  RegularizationConfig scaled(double scale1, double scale2) const;
};

/// Nonzero of the thresholded sparse tail, at frequency slice `slice` in
/// [k, T/2+1).
struct TailEntry {
  index_t slice = 0;
  index_t i = 0;
  index_t j = 0;
  cxd value;
};

/// Fitted model: shrunken SVD factors for the K low-frequency slices plus
/// the surviving sparse tail entries. This is the compressed form of the
/// estimate; reconstruct() expands it to a dense tensor.
struct FlostModel {
  Dims3 dims;
  index_t k = 0;
  std::vector<SvdFactors> lowrank;
  std::vector<TailEntry> sparse_tail;
  RegularizationConfig fitted_lambdas;
};

/// Error-bound diagnostic 16 (sum_l lambda1_l^2 r_l + lambda2^2 s) with the
/// per-term breakdown.
struct BoundReport {
  double bound_value = 0.0;
  std::vector<double> lowrank_terms;
  double sparse_term = 0.0;
};

/// obs.p when given, otherwise the empirical rate |entries| / (M N T).
double effective_sampling_rate(const ObservationSet& obs);

/// Dense tensor with value / p at the observed indices and zero elsewhere.
DenseTensor3 rescaled_projection(const ObservationSet& obs);

/// Frequency slice l of rescaled_projection(obs), accumulated directly from
/// the sparse entries in O(|entries|) without densifying.
ComplexMatrix observation_slice(const ObservationSet& obs, index_t l, double p);

/// Caches the lambda-independent part of a fit: the per-slice data matrices
/// of the rescaled projection, with the low-rank band already decomposed.
/// solve() then applies the proximal shrinkage for a given configuration,
/// which makes sweeping lambda values cheap. The slice subproblems are
/// independent and are solved as a parallel map; the result is identical
/// for any worker count.
class FitWorkspace {
 public:
  FitWorkspace(const ObservationSet& obs, index_t k, int threads = 0);

  FlostModel solve(const RegularizationConfig& cfg) const;
  double effective_p() const { return p_; }
  const Dims3& dims() const { return dims_; }

 private:
  Dims3 dims_;
  index_t k_ = 0;
  double p_ = 1.0;
  std::vector<SvdFactors> slice_svd_;
  std::vector<ComplexMatrix> tail_;
};

/// One-shot estimation: SVT on the first K frequency slices of the rescaled
/// projection and componentwise soft-thresholding on the tail.
FlostModel fit(const ObservationSet& obs, const RegularizationConfig& cfg, int threads = 0);

/// Densifies the model's frequency slices, mirrors them by conjugation and
/// applies the inverse transform. Output is real.
DenseTensor3 reconstruct(const FlostModel& model);

/// Reconstructed values at selected indices, O(T/2) per index; matches
/// reconstruct() up to roundoff.
std::vector<double> reconstruct_at(const FlostModel& model, const std::vector<Index3>& at);

/// Regularization weights from the error-guarantee schedule (natural logs):
///   lambda1 = c1 sg (sqrt((M v N) log(M v N) / p) + sqrt(log^3(M v N)) / (p sqrt(T)))
///   lambda2 = c2 sg (sqrt(log(M v N v T) / p) + log(M v N v T) / (sqrt(T) p))
/// with sg a proxy for (noise level v max |entry|). All K lambda1 entries
/// are equal.
RegularizationConfig theorem_lambda_schedule(index_t m, index_t n, index_t t, double p,
                                             double sigma_gamma, double c1, double c2, index_t k);

/// Squared-error bound 16 (sum_l lambda1_l^2 ranks_l + lambda2^2 s).
BoundReport error_bound(const RegularizationConfig& cfg, const std::vector<index_t>& ranks,
                        index_t s);

/// Stored size of the model: sum_l r_l (M + N + 1) + 2 nnz(tail).
index_t parameter_count(const FlostModel& model);

}  // namespace flost
