#include "nehari/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nehari/errors.hpp"
#include "nehari/linalg.hpp"
#include "subspace.hpp"

namespace nehari {

using detail::Block;
using detail::column;

void ProblemParams::validate() const {
  if (!(p > 2.0) || !std::isfinite(p)) throw DomainError("exponent p must be greater than 2");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
}

double energy(const Operator& a, const ProblemParams& params, const Field& u) {
  return 0.5 * h_norm_sq(a, u) - params.lambda / params.p * lp_integral(u, params.p);
}

Field nonlinearity(const ProblemParams& params, const Field& u) {
  Field f(u.grid_ptr());
  const double q = params.p - 2.0;
  if (params.p == 4.0) {
    for (std::size_t k = 0; k < u.size(); ++k) f[k] = params.lambda * (u[k] * u[k]) * u[k];
  } else {
    for (std::size_t k = 0; k < u.size(); ++k)
      f[k] = u[k] == 0.0 ? 0.0 : params.lambda * std::pow(std::fabs(u[k]), q) * u[k];
  }
  return f;
}

Field grad_H(const Operator& a, const ProblemParams& params, const Field& u, double tol) {
  GradientEvaluator g(a, params, tol);
  return g(u);
}

GradientEvaluator::GradientEvaluator(const Operator& a, ProblemParams params, double tol)
    : a_(a), params_(params), tol_(tol), last_(a.grid_ptr()) {}

Field GradientEvaluator::operator()(const Field& u) {
  const Field f = nonlinearity(params_, u);
  cg_iterations_ += solve_spd_into(a_, f, last_, tol_, 20000).iterations;
  Field g = u;
  g -= last_;
  return g;
}

Field nehari_project(const Operator& a, const ProblemParams& params, const Field& u) {
  const double q = params.lambda * lp_integral(u, params.p);
  if (!(q > 0.0)) throw ZeroField("cannot project the zero field onto the Nehari set");
  const double n2 = h_norm_sq(a, u);
  if (!(n2 > 0.0)) throw NotPositiveDefinite("field has non-positive H-norm");
  const double t = std::pow(n2 / q, 1.0 / (params.p - 2.0));
  Field w = u;
  w *= t;
  return w;
}

Field nodal_nehari_project(const Operator& a, const ProblemParams& params, const Field& u,
                           NodalScaling scaling) {
  Field up = u.positive_part();
  Field um = u.negative_part();
  const double qp = lp_integral(up, params.p);
  const double qm = lp_integral(um, params.p);
  if (!(qp > 0.0) || !(qm > 0.0)) throw PartVanished("field does not change sign");
  up = nehari_project(a, params, up);
  um = nehari_project(a, params, um);
  if (scaling == NodalScaling::Independent) {
    up += um;
    return up;
  }

  // With u+ and u- already on the Nehari set, the optimal multipliers solve
  //   s^{p-1} - s = t c1,   t^{p-1} - t = s c2
  // where c1 = C/P, c2 = C/M, P = |u+|^2, M = |u-|^2, C = <u+,u->_H.
  const Field aup = a.apply(up);
  const double w = a.grid().weight();
  const double pp = linalg::dot(up.values(), aup.values()) * w;
  const double cc = linalg::dot(um.values(), aup.values()) * w;
  const double mm = h_norm_sq(a, um);
  const double c1 = cc / pp;
  const double c2 = cc / mm;
  const double e = params.p - 1.0;
  double s = 1.0, t = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double g1 = std::pow(s, e) - s - t * c1;
    const double g2 = std::pow(t, e) - t - s * c2;
    if (std::fabs(g1) + std::fabs(g2) <= 1e-15 * (s + t)) break;
    const double j11 = e * std::pow(s, e - 1.0) - 1.0;
    const double j22 = e * std::pow(t, e - 1.0) - 1.0;
    const double det = j11 * j22 - c1 * c2;
    if (!(det > 0.0)) break;
    double ds = -(j22 * g1 + c1 * g2) / det;
    double dt = -(c2 * g1 + j11 * g2) / det;
    double step = 1.0;
    while (s + step * ds <= 0.0 || t + step * dt <= 0.0) step *= 0.5;
    const double s_next = s + step * ds;
    const double t_next = t + step * dt;
    if (s_next == s && t_next == t) break;
    s = s_next;
    t = t_next;
  }
  up *= s;
  up.axpy(t, um);
  return up;
}

MorseInfo morse_index(const Operator& a, const ProblemParams& params, const Field& u, int k) {
  MorseInfo info;
  const auto n = static_cast<Eigen::Index>(a.size());
  k = std::max(1, std::min<int>(k, static_cast<int>(n)));
  const double q = params.p - 2.0;
  std::vector<double> kdiag(a.size());
  bool any = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    kdiag[i] = u[i] == 0.0 ? 0.0 : params.lambda * (params.p - 1.0) * std::pow(std::fabs(u[i]), q);
    any = any || kdiag[i] > 0.0;
  }
  if (!any) {
    info.nu.assign(static_cast<std::size_t>(k), 0.0);
    info.gap = 1.0;
    return info;
  }
  LinearMap kmap = [&kdiag](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = kdiag[i] * x[i];
  };
  LinearMap amap = [&a](std::span<const double> x, std::span<double> y) { a.apply(x, y); };

  const Eigen::Index m = std::min<Eigen::Index>(n, k + std::max(4, k / 2));
  Eigen::VectorXd nu;
  Block x;
  int it = 0;
  if (n <= std::max<Eigen::Index>(3 * m, 256)) {
    // Small lattices: the block iteration would span most of the space anyway.
    Eigen::MatrixXd dense(n, n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0), col(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      e[static_cast<std::size_t>(j)] = 1.0;
      a.apply(e, col);
      e[static_cast<std::size_t>(j)] = 0.0;
      dense.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
    }
    const Eigen::MatrixXd kmat =
        Eigen::Map<const Eigen::VectorXd>(kdiag.data(), n).asDiagonal().toDenseMatrix();
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kmat, dense);
    if (es.info() != Eigen::Success) throw NonConvergence("dense Morse eigenproblem failed");
    nu = es.eigenvalues().tail(m).reverse();
    x = es.eigenvectors().rightCols(m).rowwise().reverse();
    it = 1;
  } else {
    x = detail::random_block(n, m, 0x40125eedULL);
    // Seed the block with u+ and u-; they lie close to the top of the spectrum.
    const Field up = u.positive_part();
    const Field um = u.negative_part();
    if (m >= 2) {
      if (up.max() > 0.0) x.col(0) = Eigen::Map<const Eigen::VectorXd>(up.values().data(), n);
      if (um.min() < 0.0) x.col(1) = Eigen::Map<const Eigen::VectorXd>(um.values().data(), n);
    }
    x = detail::orthonormalize(x);

    // Ritz values err by about residual^2 / gap, far below the 1e-8 counting
    // threshold at this tolerance.
    constexpr double kTol = 1e-6;
    constexpr int kMaxIter = 500;
    Block kx = detail::apply_columns(kmap, x);
    Block y = Block::Zero(n, m);
    Block ax, x_prev;
    for (;;) {
      ++it;
      for (Eigen::Index j = 0; j < m; ++j)
        pcg(amap, &a.preconditioner(), column(kx, j), column(y, j), 1e-8, 20000);
      if (nu.size() == m) {
        // y = A^{-1} K x for the current A-orthonormal Ritz vectors, so the
        // residual A^{-1} K x - nu x can be measured in the A-norm.
        bool done = true;
        for (Eigen::Index j = 0; j < k && done; ++j) {
          const Eigen::VectorXd r = y.col(j) - nu(j) * x.col(j);
          const Eigen::VectorXd ar = kx.col(j) - nu(j) * ax.col(j);
          const double res = std::sqrt(std::max(0.0, r.dot(ar)));
          done = res <= kTol * std::max(nu(j), 1e-3);
        }
        if (done) break;
      }
      if (it > kMaxIter)
        throw NonConvergence("Morse eigenproblem did not converge in " + std::to_string(kMaxIter) +
                             " iterations");
      const bool have_ritz = nu.size() == m;
      const Block qb = detail::orthonormalize(
          detail::stack(y, have_ritz ? &x : nullptr, x_prev.size() ? &x_prev : nullptr, n));
      const Block kq = detail::apply_columns(kmap, qb);
      const Block aq = detail::apply_columns(amap, qb);
      detail::RitzPairs rp = detail::rayleigh_ritz(qb, kq, &aq);
      if (have_ritz) x_prev = x;
      // The m largest, descending, A-orthonormal.
      nu = rp.values.tail(m).reverse();
      x = rp.vectors.rightCols(m).rowwise().reverse();
      kx = detail::apply_columns(kmap, x);
      ax = detail::apply_columns(amap, x);
      // Warm start for the next solves: A^{-1} K x = nu x at convergence.
      for (Eigen::Index j = 0; j < m; ++j) y.col(j) = nu(j) * x.col(j);
    }
  }

  info.iterations = it;
  const double w = a.grid().weight();
  info.gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < k; ++j) {
    info.nu.push_back(nu(j));
    info.gap = std::min(info.gap, std::fabs(nu(j) - 1.0));
    if (nu(j) > 1.0 + 1e-8) ++info.index;
    std::vector<double> v(x.col(j).data(), x.col(j).data() + n);
    // Euclidean A-normalised; rescale to unit H-norm.
    linalg::scale(1.0 / std::sqrt(w), v);
    double big = 0.0;
    for (double e : v)
      if (std::fabs(e) > std::fabs(big)) big = e;
    if (big < 0.0) linalg::scale(-1.0, v);
    info.vectors.emplace_back(a.grid_ptr(), std::move(v));
  }
  return info;
}

}  // namespace nehari
