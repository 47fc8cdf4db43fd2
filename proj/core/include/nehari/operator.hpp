#pragma once

// The discrete Schrödinger operator A = -Laplace_h + diag(V) on a masked
// lattice, its energy inner product, and a preconditioned CG solver.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nehari/fast_poisson.hpp"
#include "nehari/grid.hpp"

namespace nehari {

enum class PreconditionerKind { Jacobi, FastPoisson };

/// y = M x for a symmetric matrix M.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct CgStats {
  int iterations = 0;
  double relative_residual = 0.0;
  /// The recursive residual met the tolerance but a restart could not lower
  /// the recomputed one: the tolerance lies below the rounding floor.
  bool at_rounding_floor = false;
};

/// Preconditioned conjugate gradients for M x = b, starting from the
/// contents of x. Converged when ||b - M x||_2 <= tol ||b||_2 (checked on the
/// recomputed residual). A tolerance below the rounding floor ends with
/// `at_rounding_floor` set instead of iterating on. Throws NotPositiveDefinite
/// when a search direction has non-positive curvature and NonConvergence
/// after max_iter steps.
CgStats pcg(const LinearMap& m, const Preconditioner* precond, std::span<const double> b,
            std::span<double> x, double tol, int max_iter);

class Operator {
 public:
  /// Row k: diagonal 4/h^2 + V_k, -1/h^2 per interior neighbour.
  static Operator assemble(const Field& potential,
                           PreconditionerKind kind = PreconditionerKind::FastPoisson);

  const GridPtr& grid_ptr() const { return grid_; }
  const Grid& grid() const { return *grid_; }
  const Field& potential() const { return potential_; }
  std::size_t size() const { return diag_.size(); }

  double diagonal(std::size_t k) const { return diag_[k]; }
  double off_diagonal() const { return -inv_h2_; }
  /// Left, right, down, up neighbour indices; -1 for boundary.
  const std::array<std::int32_t, 4>& neighbours(std::size_t k) const { return nbr_[k]; }

  /// y = (A + shift I) x
  void apply(std::span<const double> x, std::span<double> y, double shift = 0.0) const;
  Field apply(const Field& u) const;
  /// y = -Laplace_h x (the operator with V removed).
  void apply_laplacian(std::span<const double> x, std::span<double> y) const;

  PreconditionerKind preconditioner_kind() const { return kind_; }
  /// Preconditioner for A itself (built once at assembly).
  const Preconditioner& preconditioner() const { return *precond_; }
  /// A fresh preconditioner for A + shift I.
  std::shared_ptr<const Preconditioner> make_preconditioner(double shift) const;

  /// Lazily computed and cached: smallest eigenvalue of A is positive.
  bool is_positive_definite() const;

 private:
  Operator() = default;

  struct Cache;
  GridPtr grid_;
  Field potential_;
  PreconditionerKind kind_ = PreconditionerKind::FastPoisson;
  double inv_h2_ = 0.0;
  std::vector<double> diag_;
  std::vector<std::array<std::int32_t, 4>> nbr_;
  std::shared_ptr<const Preconditioner> precond_;
  std::shared_ptr<Cache> cache_;
};

/// sum_k w v_k (A u)_k
double h_inner(const Operator& a, const Field& u, const Field& v);
double h_norm_sq(const Operator& a, const Field& u);

/// CG solve of A x = rhs with relative residual <= tol.
Field solve_spd(const Operator& a, const Field& rhs, double tol = 1e-10, int max_iter = 5000);
/// Same, starting from and overwriting `x`.
CgStats solve_spd_into(const Operator& a, const Field& rhs, Field& x, double tol = 1e-10,
                       int max_iter = 5000);

struct AssumptionReport {
  double smallest_eigenvalue = 0.0;
  bool positive_definite = false;
  /// Bounds of h_norm_sq(u) / int |grad u|^2 over the sampled fields.
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  int samples = 0;
  bool potential_finite = false;
  double potential_min = 0.0;
  double potential_max = 0.0;
  std::vector<std::string> notes;
};

/// Positive definiteness, norm-equivalence estimate over 50 pseudo-random
/// fields (fixed seed), and finiteness of the sampled potential. Never
/// throws for an indefinite operator; that is reported.
AssumptionReport check_assumptions(const Operator& a);

}  // namespace nehari
