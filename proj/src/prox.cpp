#include "flost/prox.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "flost/errors.hpp"

namespace flost {

SvdFactors complex_svd(const ComplexMatrix& m) {
  if (!m.allFinite()) throw SvdError("complex_svd: non-finite input");
  Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw SvdError("complex_svd: decomposition failed");
  return SvdFactors{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SvdFactors shrink_factors(const SvdFactors& f, double tau) {
  if (tau < 0.0) throw std::invalid_argument("shrink_factors: tau must be nonnegative");
  index_t rank = 0;
  while (rank < f.rank() && f.sigma(rank) > tau) ++rank;
  SvdFactors out;
  out.u = f.u.leftCols(rank);
  out.sigma = f.sigma.head(rank).array() - tau;
  out.v = f.v.leftCols(rank);
  return out;
}

std::pair<ComplexMatrix, index_t> svt(const ComplexMatrix& m, double tau) {
  if (tau < 0.0) throw std::invalid_argument("svt: tau must be nonnegative");
  const SvdFactors shrunk = shrink_factors(complex_svd(m), tau);
  return {shrunk.compose(), shrunk.rank()};
}

namespace {
inline double soft(double v, double tau) {
  const double mag = std::abs(v) - tau;
  return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}
}  // namespace

cxd complex_soft_threshold(cxd x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("complex_soft_threshold: tau must be nonnegative");
  return cxd(soft(x.real(), tau), soft(x.imag(), tau));
}

std::vector<ComplexMatrix> threshold_stack(const std::vector<ComplexMatrix>& y, double tau) {
  std::vector<ComplexMatrix> out;
  out.reserve(y.size());
  for (const ComplexMatrix& slice : y) {
    ComplexMatrix s(slice.rows(), slice.cols());
    for (index_t j = 0; j < slice.cols(); ++j)
      for (index_t i = 0; i < slice.rows(); ++i) s(i, j) = complex_soft_threshold(slice(i, j), tau);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace flost
