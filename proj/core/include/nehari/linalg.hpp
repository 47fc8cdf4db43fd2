#pragma once

// Plain vector kernels over contiguous spans. Reductions run in index order
// so results are reproducible run to run.

#include <cstddef>
#include <span>

namespace nehari::linalg {

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y);
void scale(double alpha, std::span<double> x);
void copy(std::span<const double> src, std::span<double> dst);

}  // namespace nehari::linalg
