#include "nehari/operator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "nehari/errors.hpp"
#include "nehari/linalg.hpp"
#include "nehari/spectrum.hpp"

namespace nehari {

struct Operator::Cache {
  std::mutex mutex;
  int positive_definite = -1;
};

CgStats pcg(const LinearMap& m, const Preconditioner* precond, std::span<const double> b,
            std::span<double> x, double tol, int max_iter) {
  const std::size_t n = b.size();
  const double bnorm = linalg::norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {};
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  auto true_residual = [&] {
    m(x, q);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
    return linalg::norm2(r);
  };
  auto apply_precond = [&] {
    if (precond)
      precond->apply(r, z);
    else
      linalg::copy(r, z);
  };

  int it = 0;
  double rnorm = true_residual();
  double last = rnorm;
  while (rnorm > tol * bnorm) {
    if (it >= max_iter)
      throw NonConvergence("conjugate gradients stalled at relative residual " +
                           std::to_string(rnorm / bnorm) + " after " + std::to_string(it) +
                           " iterations");
    apply_precond();
    double rz = linalg::dot(r, z);
    if (!(rz > 0.0)) throw NotPositiveDefinite("preconditioner is not positive definite");
    linalg::copy(z, p);
    while (it < max_iter) {
      m(p, q);
      const double pq = linalg::dot(p, q);
      if (!(pq > 0.0)) throw NotPositiveDefinite("conjugate gradients met non-positive curvature");
      const double alpha = rz / pq;
      linalg::axpy(alpha, p, x);
      linalg::axpy(-alpha, q, r);
      ++it;
      if (linalg::norm2(r) <= tol * bnorm) break;
      apply_precond();
      const double rz_next = linalg::dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      linalg::xpby(z, beta, p);
    }
    // The recursive residual drifts; accept only the recomputed one.
    rnorm = true_residual();
    if (rnorm > tol * bnorm && rnorm >= 0.5 * last && it < max_iter)
      return {it, rnorm / bnorm, true};
    last = rnorm;
  }
  return {it, rnorm / bnorm};
}

Operator Operator::assemble(const Field& potential, PreconditionerKind kind) {
  Operator op;
  op.grid_ = potential.grid_ptr();
  op.potential_ = potential;
  op.kind_ = kind;
  const Grid& g = *op.grid_;
  const double h = g.spacing();
  op.inv_h2_ = 1.0 / (h * h);
  op.diag_.resize(g.size());
  op.nbr_.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const int i = g.box_i(k);
    const int j = g.box_j(k);
    op.nbr_[k] = {g.index(i - 1, j), g.index(i + 1, j), g.index(i, j - 1), g.index(i, j + 1)};
    op.diag_[k] = 4.0 * op.inv_h2_ + potential[k];
  }
  op.cache_ = std::make_shared<Cache>();
  op.precond_ = op.make_preconditioner(0.0);
  return op;
}

void Operator::apply(std::span<const double> x, std::span<double> y, double shift) const {
  const std::size_t n = diag_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& nb = nbr_[k];
    double s = 0.0;
    for (int d = 0; d < 4; ++d)
      if (nb[d] >= 0) s += x[static_cast<std::size_t>(nb[d])];
    y[k] = (diag_[k] + shift) * x[k] - inv_h2_ * s;
  }
}

Field Operator::apply(const Field& u) const {
  if (u.grid_ptr() != grid_) throw GridMismatch("field and operator live on different grids");
  Field out(grid_);
  apply(u.values(), out.values());
  return out;
}

void Operator::apply_laplacian(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = diag_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& nb = nbr_[k];
    double s = 0.0;
    for (int d = 0; d < 4; ++d)
      if (nb[d] >= 0) s += x[static_cast<std::size_t>(nb[d])];
    y[k] = inv_h2_ * (4.0 * x[k] - s);
  }
}

std::shared_ptr<const Preconditioner> Operator::make_preconditioner(double shift) const {
  if (kind_ == PreconditionerKind::Jacobi) {
    std::vector<double> d(diag_);
    for (double& v : d) v += shift;
    return std::make_shared<JacobiPreconditioner>(std::move(d));
  }
  double mean = 0.0;
  for (double v : potential_.values()) mean += v;
  mean /= static_cast<double>(std::max<std::size_t>(1, potential_.size()));
  const double floor = -0.5 * FastPoissonPreconditioner::box_ground_eigenvalue(*grid_);
  return std::make_shared<FastPoissonPreconditioner>(grid_, std::max(mean + shift, floor));
}

double h_inner(const Operator& a, const Field& u, const Field& v) {
  require_same_grid(u, v);
  const Field au = a.apply(u);
  return linalg::dot(v.values(), au.values()) * a.grid().weight();
}

double h_norm_sq(const Operator& a, const Field& u) { return h_inner(a, u, u); }

CgStats solve_spd_into(const Operator& a, const Field& rhs, Field& x, double tol, int max_iter) {
  if (rhs.grid_ptr() != a.grid_ptr()) throw GridMismatch("right-hand side lives on another grid");
  if (x.grid_ptr() != a.grid_ptr()) x = Field(a.grid_ptr());
  LinearMap m = [&a](std::span<const double> in, std::span<double> out) { a.apply(in, out); };
  return pcg(m, &a.preconditioner(), rhs.values(), x.values(), tol, max_iter);
}

Field solve_spd(const Operator& a, const Field& rhs, double tol, int max_iter) {
  Field x(a.grid_ptr());
  solve_spd_into(a, rhs, x, tol, max_iter);
  return x;
}

bool Operator::is_positive_definite() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (cache_->positive_definite < 0)
    cache_->positive_definite = smallest_eigenvalue(*this) > 0.0 ? 1 : 0;
  return cache_->positive_definite == 1;
}

}  // namespace nehari
