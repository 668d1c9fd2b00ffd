#include "flost/tensor.hpp"

#include <cmath>

namespace flost {

double frobenius_norm(const DenseTensor3& x) {
  double sum = 0.0;
  for (double v : x.values()) sum += v * v;
  return std::sqrt(sum);
}

double frobenius_norm(const ComplexTensor3& x) {
  double sum = 0.0;
  for (const cxd& v : x.values()) sum += std::norm(v);
  return std::sqrt(sum);
}

}  // namespace flost
