#include "flost/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "flost/dft.hpp"
#include "flost/prox.hpp"
#include "flost/rng.hpp"

namespace flost {

namespace {
constexpr std::uint64_t kStreamGaussian = 0;
constexpr std::uint64_t kStreamMask = 1;
constexpr std::uint64_t kStreamNoise = 2;
}  // namespace

void SynthesisSpec::validate() const {
  DenseTensor3::check_size(dims);
  const index_t half = SliceIndexPlan::half_slices(dims.t);
  if (r < 0 || r > std::min(dims.m, dims.n))
    throw std::invalid_argument("SynthesisSpec: r must be in [0, min(M,N)]");
  if (k < 1 || k > half) throw std::invalid_argument("SynthesisSpec: K must be in [1, T/2+1]");
  if (s < 0 || s > (half - k) * dims.m * dims.n)
    throw std::invalid_argument("SynthesisSpec: s exceeds tail capacity");
}

DenseTensor3 gaussian_tensor(Dims3 dims, std::uint64_t seed) {
  DenseTensor3 out(dims);
  RandomStream stream(seed, kStreamGaussian);
  for (double& v : out.values()) v = stream.normal();
  return out;
}

DenseTensor3 generate_flost_truth(const SynthesisSpec& spec) {
  spec.validate();
  return flost_truncate(gaussian_tensor(spec.dims, spec.seed), spec.r, spec.k, spec.s);
}

namespace detail {

std::vector<bool> keep_top_s(const std::vector<TailCandidate>& candidates, index_t s) {
  std::vector<bool> keep(candidates.size(), false);
  if (s >= static_cast<index_t>(candidates.size())) {
    keep.assign(candidates.size(), true);
    return keep;
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const TailCandidate& ca = candidates[a];
    const TailCandidate& cb = candidates[b];
    if (ca.modulus != cb.modulus) return ca.modulus > cb.modulus;
    return std::tie(ca.slice, ca.i, ca.j) < std::tie(cb.slice, cb.i, cb.j);
  });
  for (index_t n = 0; n < s; ++n) keep[order[n]] = true;
  return keep;
}

}  // namespace detail

DenseTensor3 flost_truncate(const DenseTensor3& x, index_t r, index_t k, index_t s) {
  SynthesisSpec spec{x.dims(), r, k, s, 0};
  spec.validate();
  const Dims3 d = x.dims();
  const SliceIndexPlan plan(d.t, k);
  const ComplexTensor3 y = mode3_dft(x);

  std::vector<ComplexMatrix> front(plan.half);
  for (index_t l = 0; l < plan.half; ++l) front[l] = extract_slice(y, l);

  for (index_t l = 0; l < k; ++l) {
    SvdFactors f = complex_svd(front[l]);
    const index_t q = std::min(r, f.rank());
    f.u = f.u.leftCols(q).eval();
    f.sigma = f.sigma.head(q).eval();
    f.v = f.v.leftCols(q).eval();
    front[l] = f.compose();
  }

  if (k < plan.half) {
    std::vector<detail::TailCandidate> candidates;
    candidates.reserve((plan.half - k) * d.m * d.n);
    for (index_t l = k; l < plan.half; ++l)
      for (index_t i = 0; i < d.m; ++i)
        for (index_t j = 0; j < d.n; ++j)
          candidates.push_back({l, i, j, std::abs(front[l](i, j))});
    const std::vector<bool> keep = detail::keep_top_s(candidates, s);
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if (!keep[c]) front[candidates[c].slice](candidates[c].i, candidates[c].j) = cxd(0.0, 0.0);
  }

  return mode3_idft(conjugate_symmetrize(front, d.t));
}

bool is_flost(const DenseTensor3& x, index_t r, index_t k, index_t s, double tol) {
  const Dims3 d = x.dims();
  const SliceIndexPlan plan(d.t, k);
  const ComplexTensor3 y = mode3_dft(x);
  for (index_t l = 0; l < k; ++l) {
    const SvdFactors f = complex_svd(extract_slice(y, l));
    if (f.rank() == 0) continue;
    const double cutoff = tol * f.sigma(0);
    index_t rank = 0;
    while (rank < f.rank() && f.sigma(rank) > cutoff) ++rank;
    if (rank > r) return false;
  }
  index_t nnz = 0;
  for (index_t l = k; l < plan.half; ++l)
    for (index_t i = 0; i < d.m; ++i)
      for (index_t j = 0; j < d.n; ++j)
        if (std::abs(y(i, j, l)) > tol) ++nnz;
  return nnz <= s;
}

ObservationSet sample_observations(const DenseTensor3& x, const SamplingSpec& spec) {
  if (!(spec.p > 0.0) || spec.p > 1.0)
    throw std::invalid_argument("sample_observations: p must be in (0,1]");
  if (spec.sigma < 0.0)
    throw std::invalid_argument("sample_observations: sigma must be nonnegative");
  const Dims3 d = x.dims();
  ObservationSet obs;
  obs.dims = d;
  obs.p = spec.p;
  obs.p_source = PSource::Given;
  RandomStream mask(spec.seed, kStreamMask);
  RandomStream noise(spec.seed, kStreamNoise);
  // Noise is drawn for every position so a value never depends on the mask.
  for (index_t i = 0; i < d.m; ++i)
    for (index_t j = 0; j < d.n; ++j)
      for (index_t t = 0; t < d.t; ++t) {
        const bool observed = mask.uniform() < spec.p;
        const double eps = noise.normal();
        if (observed) obs.entries.push_back({i, j, t, x(i, j, t) + spec.sigma * eps});
      }
  return obs;
}

}  // namespace flost
