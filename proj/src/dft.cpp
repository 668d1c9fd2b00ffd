#include "flost/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "flost/errors.hpp"

namespace flost {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// The FFTW planner is not thread-safe; executing a plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform_tubes(std::vector<cxd>& buf, index_t tubes, index_t len, int sign) {
  if (tubes > std::numeric_limits<int>::max() || len > std::numeric_limits<int>::max())
    throw std::invalid_argument("mode-3 transform: dims exceed FFTW int range");
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  const int n = static_cast<int>(len);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft(1, &n, static_cast<int>(tubes), data, nullptr, 1, n, data, nullptr,
                              1, n, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("mode-3 transform: FFTW plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace

ComplexTensor3 mode3_dft(const DenseTensor3& x) {
  if (!x.all_finite()) throw std::invalid_argument("mode3_dft: input has non-finite values");
  const Dims3 d = x.dims();
  ComplexTensor3 out(d);
  std::vector<cxd>& buf = out.values();
  const std::vector<double>& in = x.values();
  for (index_t idx = 0; idx < d.size(); ++idx) buf[idx] = cxd(in[idx], 0.0);
  transform_tubes(buf, d.m * d.n, d.t, FFTW_FORWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d.t));
  for (cxd& v : buf) v *= scale;
  out.set_conjugate_symmetric(true);
  return out;
}

DenseTensor3 mode3_idft(const ComplexTensor3& y) {
  const Dims3 d = y.dims();
  std::vector<cxd> buf = y.values();
  transform_tubes(buf, d.m * d.n, d.t, FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d.t));
  double max_imag = 0.0;
  DenseTensor3 out(d);
  std::vector<double>& v = out.values();
  for (index_t idx = 0; idx < d.size(); ++idx) {
    const cxd z = buf[idx] * scale;
    max_imag = std::max(max_imag, std::abs(z.imag()));
    v[idx] = z.real();
  }
  const double tol = 1e-8 * (1.0 + frobenius_norm(y));
  if (max_imag > tol)
    throw SymmetryViolation("mode3_idft: imaginary residual " + std::to_string(max_imag) +
                            " exceeds tolerance " + std::to_string(tol));
  return out;
}

ComplexMatrix extract_slice(const ComplexTensor3& y, index_t l) {
  const Dims3 d = y.dims();
  if (l < 0 || l >= d.t) throw std::out_of_range("extract_slice: slice index out of range");
  ComplexMatrix out(d.m, d.n);
  for (index_t i = 0; i < d.m; ++i)
    for (index_t j = 0; j < d.n; ++j) out(i, j) = y(i, j, l);
  return out;
}

ComplexMatrix extract_slice(const DenseTensor3& x, index_t l) {
  const Dims3 d = x.dims();
  if (l < 0 || l >= d.t) throw std::out_of_range("extract_slice: slice index out of range");
  const std::vector<cxd> w = fourier_row(d.t, l);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d.t));
  ComplexMatrix out(d.m, d.n);
  const std::vector<double>& v = x.values();
  for (index_t i = 0; i < d.m; ++i) {
    for (index_t j = 0; j < d.n; ++j) {
      const double* tube = v.data() + (i * d.n + j) * d.t;
      cxd acc(0.0, 0.0);
      for (index_t t = 0; t < d.t; ++t) acc += tube[t] * w[t];
      out(i, j) = acc * scale;
    }
  }
  return out;
}

ComplexTensor3 conjugate_symmetrize(const std::vector<ComplexMatrix>& front, index_t T) {
  const index_t half = SliceIndexPlan::half_slices(T);
  if (static_cast<index_t>(front.size()) != half)
    throw std::invalid_argument("conjugate_symmetrize: expected " + std::to_string(half) +
                                " slices, got " + std::to_string(front.size()));
  const index_t m = front[0].rows();
  const index_t n = front[0].cols();
  for (const ComplexMatrix& s : front)
    if (s.rows() != m || s.cols() != n)
      throw std::invalid_argument("conjugate_symmetrize: slice dims mismatch");

  ComplexTensor3 out({m, n, T});
  for (index_t l = 0; l < half; ++l) {
    const bool force_real = (l == 0) || (T % 2 == 0 && l == T / 2);
    for (index_t i = 0; i < m; ++i)
      for (index_t j = 0; j < n; ++j) {
        const cxd z = front[l](i, j);
        out(i, j, l) = force_real ? cxd(z.real(), 0.0) : z;
      }
  }
  for (index_t l = half; l < T; ++l) {
    const index_t src = T - l;
    for (index_t i = 0; i < m; ++i)
      for (index_t j = 0; j < n; ++j) out(i, j, l) = std::conj(out(i, j, src));
  }
  out.set_conjugate_symmetric(true);
  return out;
}

std::vector<cxd> fourier_row(index_t T, index_t l) {
  std::vector<cxd> w(T);
  for (index_t t = 0; t < T; ++t) {
    const index_t e = (l * t) % T;
    const double angle = -kTwoPi * static_cast<double>(e) / static_cast<double>(T);
    w[t] = cxd(std::cos(angle), std::sin(angle));
  }
  return w;
}

double max_conjugate_asymmetry(const ComplexTensor3& y) {
  const Dims3 d = y.dims();
  double worst = 0.0;
  for (index_t l = 0; l < d.t; ++l) {
    const index_t mirror = (l == 0) ? 0 : d.t - l;
    if (l == mirror) {
      for (index_t i = 0; i < d.m; ++i)
        for (index_t j = 0; j < d.n; ++j)
          worst = std::max(worst, std::abs(y(i, j, l).imag()));
    } else if (l < mirror) {
      for (index_t i = 0; i < d.m; ++i)
        for (index_t j = 0; j < d.n; ++j)
          worst = std::max(worst, std::abs(y(i, j, l) - std::conj(y(i, j, mirror))));
    }
  }
  return worst;
}

}  // namespace flost
