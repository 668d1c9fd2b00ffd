#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "flost/tensor.hpp"

namespace flost {

using ComplexMatrix = Eigen::MatrixXcd;

/// Thin SVD factors U diag(sigma) V^*, with sigma nonincreasing and the
/// factor columns orthonormal. rank() may be smaller than min(M,N) after
/// shrinkage; compose() of rank 0 is the zero matrix.
struct SvdFactors {
  ComplexMatrix u;
  Eigen::VectorXd sigma;
  ComplexMatrix v;

  index_t rank() const { return sigma.size(); }
  ComplexMatrix compose() const { return u * sigma.asDiagonal() * v.adjoint(); }
};

/// Thin SVD of a complex matrix. Throws SvdError on non-finite input or if
/// the decomposition does not converge.
SvdFactors complex_svd(const ComplexMatrix& m);

/// Keeps the factors with sigma_i > tau (strictly) and subtracts tau from
/// the retained singular values.
SvdFactors shrink_factors(const SvdFactors& f, double tau);

/// Singular value soft-thresholding D_tau(M) = U diag((sigma_i - tau)_+) V^*,
/// the proximal map of tau * nuclear norm. Returns the thresholded matrix
/// and the number of singular values strictly above tau.
std::pair<ComplexMatrix, index_t> svt(const ComplexMatrix& m, double tau);

/// Componentwise soft-thresholding of a complex scalar,
/// sign(Re x)(|Re x|-tau)_+ + i sign(Im x)(|Im x|-tau)_+ : the proximal map
/// of tau * (|Re| + |Im|).
cxd complex_soft_threshold(cxd x, double tau);

/// complex_soft_threshold applied to every entry of every slice.
std::vector<ComplexMatrix> threshold_stack(const std::vector<ComplexMatrix>& y, double tau);

}  // namespace flost
