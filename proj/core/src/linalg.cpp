#include "nehari/linalg.hpp"

#include <cmath>

namespace nehari::linalg {

double dot(std::span<const double> a, std::span<const double> b) {
  // Four interleaved partial sums, combined in a fixed order.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = a.size();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + beta * y[k];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

void copy(std::span<const double> src, std::span<double> dst) {
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k];
}

}  // namespace nehari::linalg
