#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nehari/grid.hpp"

namespace nehari {

/// z = M^{-1} r for some symmetric positive definite M.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
  virtual std::string name() const = 0;
};

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(std::vector<double> diagonal);
  void apply(std::span<const double> r, std::span<double> z) const override;
  std::string name() const override { return "jacobi"; }

 private:
  std::vector<double> inv_diag_;
};

/// Exact inverse of the 5-point operator -Laplace_h + shift on the grid's
/// bounding box (Dirichlet one lattice step outside the box), applied with
/// two-dimensional type-I sine transforms. On masked grids the residual is
/// scattered into the box and the result gathered back, which keeps M
/// symmetric positive definite.
class FastPoissonPreconditioner final : public Preconditioner {
 public:
  FastPoissonPreconditioner(GridPtr grid, double shift);
  ~FastPoissonPreconditioner() override;
  FastPoissonPreconditioner(const FastPoissonPreconditioner&) = delete;
  FastPoissonPreconditioner& operator=(const FastPoissonPreconditioner&) = delete;

  void apply(std::span<const double> r, std::span<double> z) const override;
  std::string name() const override { return "fast-poisson"; }

  double shift() const { return shift_; }
  /// Smallest eigenvalue of the box Laplacian (without shift).
  static double box_ground_eigenvalue(const Grid& grid);

 private:
  GridPtr grid_;
  double shift_;
  std::vector<double> inv_eig_;  // scaled inverse symbols, row-major box order
  void* plan_ = nullptr;         // fftw_plan
};

}  // namespace nehari
