#pragma once

#include <cstdint>
#include <vector>

#include "flost/observation.hpp"
#include "flost/tensor.hpp"

namespace flost {

/// Recipe for a synthetic ground-truth tensor whose first K frequency
/// slices have rank r and whose tail slices hold at most s nonzeros in
/// total.
struct SynthesisSpec {
  Dims3 dims;
  index_t r = 1;
  index_t k = 1;
  index_t s = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Bernoulli sampling with probability p and additive N(0, sigma^2) noise
/// on the observed entries. Mask and noise are drawn from independent
/// streams derived from the one seed.
struct SamplingSpec {
  double p = 1.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// The raw i.i.d. standard normal draw used by generate_flost_truth.
DenseTensor3 gaussian_tensor(Dims3 dims, std::uint64_t seed);

/// Draws a standard normal tensor and projects it onto the (r,K,s)
/// structure: rank-r truncation of the first K frequency slices, the s
/// largest-modulus entries kept across all tail slices, conjugate
/// mirroring, inverse transform. Reproducible bit-for-bit from the seed.
DenseTensor3 generate_flost_truth(const SynthesisSpec& spec);

/// The same structural projection applied to an arbitrary tensor.
DenseTensor3 flost_truncate(const DenseTensor3& x, index_t r, index_t k, index_t s);

/// Independent structure check: every low-band slice has at most r singular
/// values above tol * sigma_max, and the tail has at most s entries with
/// modulus above tol.
bool is_flost(const DenseTensor3& x, index_t r, index_t k, index_t s, double tol);

ObservationSet sample_observations(const DenseTensor3& x, const SamplingSpec& spec);

namespace detail {

struct TailCandidate {
  index_t slice = 0;
  index_t i = 0;
  index_t j = 0;
  double modulus = 0.0;
};

/// Marks the s largest-modulus candidates. Ties are broken toward the
/// smallest (slice, i, j), so the kept support is deterministic.
std::vector<bool> keep_top_s(const std::vector<TailCandidate>& candidates, index_t s);

}  // namespace detail

}  // namespace flost
