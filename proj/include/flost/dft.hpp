#pragma once

#include <Eigen/Core>
#include <vector>

#include "flost/tensor.hpp"

namespace flost {

using ComplexMatrix = Eigen::MatrixXcd;

/// Unitary discrete Fourier transform along the third mode: slice l of the
/// result is (1/sqrt(T)) * sum_t x(:,:,t) gamma^(l t) with gamma = e^(-2 pi i / T).
/// The output is flagged conjugate-symmetric and preserves the Frobenius norm.
ComplexTensor3 mode3_dft(const DenseTensor3& x);

/// Inverse of mode3_dft. The imaginary residual of the back-transform must
/// stay within 1e-8 * (1 + ||y||_F); a larger residual means the stack lost
/// its conjugate symmetry and SymmetryViolation is thrown.
DenseTensor3 mode3_idft(const ComplexTensor3& y);

/// Frontal slice l of the frequency stack.
ComplexMatrix extract_slice(const ComplexTensor3& y, index_t l);

/// Frequency slice l of a real tensor, computed as a single transform row
/// without forming the full stack. Cost O(M N T).
ComplexMatrix extract_slice(const DenseTensor3& x, index_t l);

/// Assembles a full T-slice stack from the first ceil((T+1)/2) slices by
/// conjugate mirroring. The DC slice (and Nyquist slice for even T) has its
/// imaginary part forced to zero so the stack is exactly symmetric.
ComplexTensor3 conjugate_symmetrize(const std::vector<ComplexMatrix>& front, index_t T);

/// Twiddle row gamma^(l t mod T) for t = 0..T-1, gamma = e^(-2 pi i / T).
/// Angles are reduced modulo T before evaluation, so entries are accurate
/// for any l, t.
std::vector<cxd> fourier_row(index_t T, index_t l);

/// Largest deviation from conjugate symmetry: max over mirrored pairs of
/// |y(i,j,l) - conj(y(i,j,T-l))| and over self-conjugate slices of |Im|.
double max_conjugate_asymmetry(const ComplexTensor3& y);

}  // namespace flost
