#include "nehari/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "nehari/errors.hpp"
#include "nehari/linalg.hpp"
#include "subspace.hpp"

namespace nehari {

using detail::Block;
using detail::column;

const Cluster& Spectrum::cluster(int i) const {
  if (i < 1 || i > cluster_count())
    throw ClusterMissing("eigenvalue cluster " + std::to_string(i) + " was not computed (have " +
                         std::to_string(cluster_count()) + ")");
  return clusters[static_cast<std::size_t>(i - 1)];
}

bool is_one_signed(const Field& e) {
  double big = 0.0;
  for (double v : e.values())
    if (std::fabs(v) > std::fabs(big)) big = v;
  if (big == 0.0) return false;
  const double s = big > 0.0 ? 1.0 : -1.0;
  double lo = s * e[0];
  for (double v : e.values()) lo = std::min(lo, s * v);
  return lo > -1e-8 * std::fabs(big);
}

namespace {

double cluster_tolerance(const Grid& g) { return std::max(1e-6, 10.0 * g.weight()); }

bool same_cluster(double a, double b, double tol) { return std::fabs(b - a) <= tol * std::fabs(a); }

}  // namespace

Spectrum eig_smallest(const Operator& a, int k, double eig_tol) {
  EigOptions o;
  o.k = k;
  o.tol = eig_tol;
  return eig_smallest(a, o);
}

Spectrum eig_smallest(const Operator& a, const EigOptions& opts) {
  if (opts.k < 1) throw DomainError("need at least one eigenpair");
  const Grid& g = a.grid();
  const auto n = static_cast<Eigen::Index>(a.size());
  if (opts.k > n) throw DomainError("more eigenpairs requested than grid nodes");
  const Eigen::Index m = std::min<Eigen::Index>(n, opts.k + std::max(4, opts.k / 2));
  const double ctol = cluster_tolerance(g);

  const double vmin = a.potential().min();
  const double sigma = vmin < 0.0 ? -vmin : 0.0;
  const auto precond = a.make_preconditioner(sigma);
  LinearMap shifted = [&a, sigma](std::span<const double> x, std::span<double> y) {
    a.apply(x, y, sigma);
  };
  LinearMap plain = [&a](std::span<const double> x, std::span<double> y) { a.apply(x, y); };
  const double inner_tol = std::min(1e-10, 1e-2 * opts.tol);

  Block x = detail::orthonormalize(detail::random_block(n, m, 0x5eed0f5eedULL));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
  Block ax, x_prev;
  Eigen::Index want = opts.k;
  int it = 0;
  bool have_ritz = false;
  for (;;) {
    if (it >= opts.max_iter)
      throw NonConvergence("eigensolver did not converge in " + std::to_string(opts.max_iter) +
                           " iterations");
    ++it;
    Block y(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      auto yj = column(y, j);
      if (have_ritz) {
        const double s = 1.0 / (theta(j) + sigma);
        for (Eigen::Index i = 0; i < n; ++i) yj[static_cast<std::size_t>(i)] = s * x(i, j);
      } else {
        std::fill(yj.begin(), yj.end(), 0.0);
      }
      pcg(shifted, precond.get(), column(x, j), yj, inner_tol, 20000);
    }
    // Rayleigh-Ritz over the new block, the current Ritz vectors and the
    // previous ones (a locally optimal three-term search space).
    const Block q = detail::orthonormalize(detail::stack(y, have_ritz ? &x : nullptr, x_prev.size() ? &x_prev : nullptr, n));
    const Block aq = detail::apply_columns(plain, q);
    Eigen::MatrixXd hp = q.transpose() * aq;
    hp = 0.5 * (hp + hp.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hp);
    if (have_ritz) x_prev = x;
    theta = es.eigenvalues().head(m);
    x = q * es.eigenvectors().leftCols(m);
    ax = aq * es.eigenvectors().leftCols(m);
    have_ritz = true;

    want = opts.k;
    while (want < m - 1 && same_cluster(theta(want - 1), theta(want), ctol)) ++want;
    bool done = true;
    for (Eigen::Index j = 0; j < want && done; ++j) {
      const double r = (ax.col(j) - theta(j) * x.col(j)).norm();
      done = r <= opts.tol * std::max(1.0, std::fabs(theta(j)));
    }
    if (done) break;
  }

  if (!opts.allow_indefinite && !(theta(0) > 0.0))
    throw NotPositiveDefinite("operator has non-positive eigenvalue " + std::to_string(theta(0)));

  Spectrum s;
  s.grid = a.grid_ptr();
  s.iterations = it;
  const double w = g.weight();
  for (Eigen::Index j = 0; j < want; ++j) s.eigenvalues.push_back(theta(j));

  Eigen::Index j = 0;
  while (j < want) {
    Eigen::Index end = j + 1;
    while (end < want && same_cluster(theta(j), theta(end), ctol)) ++end;
    Cluster c;
    double lam = 0.0;
    for (Eigen::Index t = j; t < end; ++t) lam += theta(t);
    c.eigenvalue = lam / static_cast<double>(end - j);
    c.multiplicity = static_cast<int>(end - j);
    // H-orthogonalise within the cluster, then normalise in L2.
    for (Eigen::Index t = j; t < end; ++t) {
      std::vector<double> v(x.col(t).data(), x.col(t).data() + n);
      for (std::size_t b = 0; b < c.basis.size(); ++b) {
        const auto eb = c.basis[b].values();
        const auto ab = c.applied[b].values();
        const double coef = linalg::dot(v, ab) / linalg::dot(eb, ab);
        linalg::axpy(-coef, eb, v);
      }
      double scale = 1.0 / (std::sqrt(w) * linalg::norm2(v));
      if (c.multiplicity == 1) {
        double big = 0.0;
        for (double e : v)
          if (std::fabs(e) > std::fabs(big)) big = e;
        if (big < 0.0) scale = -scale;
      }
      linalg::scale(scale, v);
      Field e(s.grid, std::move(v));
      // Residual against the operator itself, not the Ritz recurrence.
      Field check = a.apply(e);
      check.axpy(-theta(t), e);
      c.residuals.push_back(linalg::norm2(check.values()) / linalg::norm2(e.values()));
      c.basis.push_back(std::move(e));
      c.applied.push_back(a.apply(c.basis.back()));
    }
    c.principal = c.multiplicity == 1 && is_one_signed(c.basis[0]);
    s.clusters.push_back(std::move(c));
    j = end;
  }
  s.unique_principal = !s.clusters.empty() && s.clusters[0].principal;
  for (std::size_t t = 1; t < s.clusters.size(); ++t)
    if (s.clusters[t].principal) s.unique_principal = false;
  return s;
}

double smallest_eigenvalue(const Operator& a, double tol) {
  EigOptions o;
  o.k = 1;
  o.tol = tol;
  o.allow_indefinite = true;
  return eig_smallest(a, o).eigenvalues.front();
}

Field project_eigenspace(const Spectrum& s, int i, const Field& u) {
  const Cluster& c = s.cluster(i);
  if (u.grid_ptr() != s.grid) throw GridMismatch("field and spectrum live on different grids");
  Field out(s.grid);
  for (std::size_t b = 0; b < c.basis.size(); ++b) {
    const auto ab = c.applied[b].values();
    const double coef = linalg::dot(u.values(), ab) / linalg::dot(c.basis[b].values(), ab);
    out.axpy(coef, c.basis[b]);
  }
  return out;
}

PrincipalReport is_unique_principal(const Spectrum& s) {
  PrincipalReport r;
  r.unique_principal = s.unique_principal;
  for (std::size_t t = 0; t < s.clusters.size(); ++t) {
    const Cluster& c = s.clusters[t];
    ClusterEvidence ev;
    ev.index = static_cast<int>(t + 1);
    ev.eigenvalue = c.eigenvalue;
    ev.multiplicity = c.multiplicity;
    ev.principal = c.principal;
    const Field& e = c.basis.front();
    double big = 0.0;
    for (double v : e.values())
      if (std::fabs(v) > std::fabs(big)) big = v;
    if (big != 0.0) {
      ev.normalized_min = e.min() / big;
      ev.normalized_max = e.max() / big;
      if (big < 0.0) std::swap(ev.normalized_min, ev.normalized_max);
    }
    const Grid& g = e.grid();
    for (std::size_t k = 0; k < g.size(); ++k) {
      const std::int32_t right = g.index(g.box_i(k) + 1, g.box_j(k));
      const std::int32_t up = g.index(g.box_i(k), g.box_j(k) + 1);
      if (right >= 0 && e[k] * e[static_cast<std::size_t>(right)] < 0.0) ++ev.sign_change_edges;
      if (up >= 0 && e[k] * e[static_cast<std::size_t>(up)] < 0.0) ++ev.sign_change_edges;
    }
    r.clusters.push_back(ev);
  }
  return r;
}

}  // namespace nehari
