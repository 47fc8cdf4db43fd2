#include "nehari/limit_flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "nehari/errors.hpp"
#include "nehari/fast_poisson.hpp"
#include "nehari/linalg.hpp"

namespace nehari {

namespace {

double entropy_sum(std::span<const double> v, double w) {
  double s = 0.0;
  for (double x : v) {
    const double x2 = x * x;
    if (x2 > 0.0) s += x2 * std::log(x2);
  }
  return s * w;
}

/// Modified Gram-Schmidt in the weighted L2 product, applied twice.
std::vector<Field> l2_orthonormal(std::vector<Field> fs) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < fs.size(); ++j) {
      for (std::size_t i = 0; i < j; ++i) fs[j].axpy(-l2_inner(fs[i], fs[j]), fs[i]);
      const double n = std::sqrt(l2_inner(fs[j], fs[j]));
      if (!(n > 0.0)) throw ZeroField("eigenspace basis is degenerate");
      fs[j] *= 1.0 / n;
    }
  }
  return fs;
}

/// Evaluates int v^2 log v^2 for unit combinations of a fixed orthonormal basis.
class DirectionSearch {
 public:
  explicit DirectionSearch(std::vector<Field> basis) : basis_(std::move(basis)) {
    if (!basis_.empty()) scratch_.assign(basis_.front().size(), 0.0);
  }

  std::size_t dim() const { return basis_.size(); }

  double entropy(const std::vector<double>& c) {
    std::fill(scratch_.begin(), scratch_.end(), 0.0);
    for (std::size_t j = 0; j < basis_.size(); ++j) linalg::axpy(c[j], basis_[j].values(), scratch_);
    return entropy_sum(scratch_, basis_.front().grid().weight());
  }

  Field combine(const std::vector<double>& c) const {
    Field v(basis_.front().grid_ptr());
    for (std::size_t j = 0; j < basis_.size(); ++j) v.axpy(c[j], basis_[j]);
    return v;
  }

 private:
  std::vector<Field> basis_;
  std::vector<double> scratch_;
};

std::vector<double> circle(double theta) { return {std::cos(theta), std::sin(theta)}; }

std::vector<double> sphere(double phi, double theta) {
  return {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)};
}

/// Maximises f on [a, b] by golden sections.
template <class F>
double golden_max(F&& f, double a, double b, int iters = 60) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters && b - a > 1e-13; ++k) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct Candidate {
  std::vector<double> c;
  double value;
};

std::vector<Candidate> search_circle(DirectionSearch& ds) {
  constexpr int kAngles = 720;
  const double step = std::numbers::pi / kAngles;
  std::vector<double> vals(kAngles);
  for (int k = 0; k < kAngles; ++k) vals[static_cast<std::size_t>(k)] = ds.entropy(circle(k * step));
  std::vector<Candidate> out;
  for (int k = 0; k < kAngles; ++k) {
    // theta and theta + pi give the same direction up to sign, so wrap around.
    const double prev = vals[static_cast<std::size_t>((k + kAngles - 1) % kAngles)];
    const double next = vals[static_cast<std::size_t>((k + 1) % kAngles)];
    const double cur = vals[static_cast<std::size_t>(k)];
    if (!(cur >= prev && cur > next)) continue;
    const double t = golden_max([&](double th) { return ds.entropy(circle(th)); },
                                (k - 1) * step, (k + 1) * step);
    out.push_back({circle(t), ds.entropy(circle(t))});
  }
  return out;
}

std::vector<Candidate> search_sphere(DirectionSearch& ds) {
  constexpr int kPhi = 90, kTheta = 180;
  const double dphi = std::numbers::pi / kPhi;
  const double dtheta = 2.0 * std::numbers::pi / kTheta;
  std::vector<double> vals(static_cast<std::size_t>((kPhi + 1) * kTheta));
  auto at = [&](int i, int j) -> double& {
    return vals[static_cast<std::size_t>(i * kTheta + ((j % kTheta) + kTheta) % kTheta)];
  };
  for (int i = 0; i <= kPhi; ++i)
    for (int j = 0; j < kTheta; ++j) at(i, j) = ds.entropy(sphere(i * dphi, j * dtheta));

  std::vector<Candidate> out;
  for (int i = 0; i <= kPhi; ++i) {
    for (int j = 0; j < kTheta; ++j) {
      const double cur = at(i, j);
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1 && is_max; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di;
          if (ii < 0 || ii > kPhi) continue;
          const double other = at(ii, j + dj);
          // Ties are broken towards the lower flat index.
          if (other > cur || (other == cur && ii * kTheta + j + dj < i * kTheta + j)) is_max = false;
        }
      if (!is_max) continue;
      double phi = i * dphi, theta = j * dtheta;
      for (int sweep = 0; sweep < 6; ++sweep) {
        phi = golden_max([&](double f) { return ds.entropy(sphere(f, theta)); }, phi - dphi, phi + dphi);
        theta = golden_max([&](double t) { return ds.entropy(sphere(phi, t)); }, theta - dtheta,
                           theta + dtheta);
      }
      out.push_back({sphere(phi, theta), ds.entropy(sphere(phi, theta))});
    }
  }
  return out;
}

/// For int v^2 = m the constraint reads m log t^2 + int v^2 log v^2 = 0.
Field scaled_minimizer(const Field& v, double* scale) {
  const double m = l2_inner(v, v);
  if (!(m > 0.0)) throw ZeroField("cannot scale a zero direction");
  const double t = std::exp(-0.5 * entropy_sum(v.values(), v.grid().weight()) / m);
  *scale = t;
  Field u = v;
  u *= t;
  return u;
}

}  // namespace

double limit_constraint(const Field& u) { return entropy_sum(u.values(), u.grid().weight()); }

double limit_energy(double lambda_i, const Field& u) {
  return 0.5 * lambda_i * (l2_inner(u, u) - limit_constraint(u));
}

Field limit_scale(const Field& v) {
  double t = 0.0;
  return scaled_minimizer(v, &t);
}

double limit_energy_of_direction(const Spectrum& s, int i, const std::vector<double>& coefficients) {
  const Cluster& c = s.cluster(i);
  if (coefficients.size() != c.basis.size())
    throw DomainError("coefficient count differs from the eigenspace dimension");
  DirectionSearch ds(l2_orthonormal(c.basis));
  Field v = ds.combine(coefficients);
  const double n = std::sqrt(l2_inner(v, v));
  if (!(n > 0.0)) throw ZeroField("zero direction");
  v *= 1.0 / n;
  double t = 0.0;
  return limit_energy(c.eigenvalue, scaled_minimizer(v, &t));
}

LimitMinimizer limit_minimize(const Spectrum& s, int i) {
  const Cluster& c = s.cluster(i);
  const int d = c.multiplicity;
  if (d > 3) throw Unsupported("limit minimisation supports eigenspaces of dimension at most 3");

  DirectionSearch ds(l2_orthonormal(c.basis));
  std::vector<Candidate> cands;
  if (d == 1) {
    cands.push_back({{1.0}, ds.entropy({1.0})});
  } else if (d == 2) {
    cands = search_circle(ds);
  } else {
    cands = search_sphere(ds);
  }
  if (cands.empty()) throw NonConvergence("no maximiser of the entropy found");

  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  const double best = cands.front().value;
  const double tol = 1e-7 * std::max(1.0, std::fabs(best));

  LimitMinimizer out;
  out.cluster = i;
  out.eigenvalue = c.eigenvalue;
  std::vector<std::vector<double>> kept;
  for (const Candidate& cand : cands) {
    if (best - cand.value > tol) break;
    bool dup = false;
    for (const auto& k : kept) {
      double dot = 0.0;
      for (std::size_t j = 0; j < k.size(); ++j) dot += k[j] * cand.c[j];
      if (std::fabs(dot) > 1.0 - 1e-6) dup = true;
    }
    if (dup) continue;
    std::vector<double> coeff = cand.c;
    Field v = ds.combine(coeff);
    v *= 1.0 / std::sqrt(l2_inner(v, v));
    // Make the largest-|value| node positive so the representative is stable.
    double big = 0.0;
    for (double x : v.values())
      if (std::fabs(x) > std::fabs(big)) big = x;
    if (big < 0.0) {
      v *= -1.0;
      for (double& x : coeff) x = -x;
    }
    double t = 0.0;
    Field u = scaled_minimizer(v, &t);
    if (kept.empty()) {
      out.coefficients = coeff;
      out.scale = t;
      out.u = u;
      out.energy = limit_energy(c.eigenvalue, u);
      out.constraint_residual = std::fabs(limit_constraint(u));
    }
    kept.push_back(cand.c);
    out.equivalent.push_back(std::move(u));
  }
  return out;
}

Field predictor_w(const Operator& a, const Spectrum& s, int i, const Field& u_star,
                  PredictorInfo* info, double tol) {
  const Cluster& target = s.cluster(i);
  require_same_grid(u_star, target.basis.front());
  const double li = target.eigenvalue;
  const double w = a.grid().weight();

  Field f(a.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double x = u_star[k];
    f[k] = x != 0.0 ? li * x * std::log(std::fabs(x)) : 0.0;
  }

  // Orthonormal basis of clusters 1..i, with the index of each vector's cluster.
  std::vector<Field> q;
  std::vector<int> owner;
  for (int j = 1; j <= i; ++j)
    for (const Field& e : s.cluster(j).basis) {
      q.push_back(e);
      owner.push_back(j);
    }
  q = l2_orthonormal(std::move(q));

  Field x(a.grid_ptr());
  Field rhs = f;
  double target_part = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    const double c = l2_inner(q[m], f);
    rhs.axpy(-c, q[m]);
    if (owner[m] == i) {
      target_part += c * c;
    } else {
      // (A - lambda_i) is diagonal on the lower eigenspaces.
      x.axpy(c / (s.cluster(owner[m]).eigenvalue - li), q[m]);
    }
  }
  const double f_norm = std::sqrt(l2_inner(f, f));

  auto deflate = [&](std::span<double> v) {
    for (const Field& e : q) linalg::axpy(-linalg::dot(e.values(), v) * w, e.values(), v);
  };
  std::vector<double> tmp(a.size());
  const LinearMap op = [&](std::span<const double> in, std::span<double> out) {
    linalg::copy(in, tmp);
    deflate(tmp);
    a.apply(tmp, out, -li);
    deflate(out);
  };

  class Deflated : public Preconditioner {
   public:
    Deflated(std::shared_ptr<const Preconditioner> base, std::function<void(std::span<double>)> d)
        : base_(std::move(base)), deflate_(std::move(d)) {}
    void apply(std::span<const double> r, std::span<double> z) const override {
      std::vector<double> rr(r.begin(), r.end());
      deflate_(rr);
      base_->apply(rr, z);
      deflate_(z);
    }
    std::string name() const override { return "deflated " + base_->name(); }

   private:
    std::shared_ptr<const Preconditioner> base_;
    std::function<void(std::span<double>)> deflate_;
  };
  const Deflated pre(a.make_preconditioner(-li), deflate);

  Field y(a.grid_ptr());
  CgStats st;
  const double rhs_norm = std::sqrt(l2_inner(rhs, rhs));
  if (rhs_norm > 0.0) st = pcg(op, &pre, rhs.values(), y.values(), tol, 20000);
  deflate(y.values());
  x += y;

  // Remove any E_i part left by round-off.
  x -= project_eigenspace(s, i, x);

  if (info) {
    info->rhs_projection = f_norm > 0.0 ? std::sqrt(target_part) / f_norm : 0.0;
    info->cg_iterations = st.iterations;
    Field r = a.apply(x);
    r.axpy(-li, x);
    // Compare with f minus its E_i component.
    Field g = f;
    for (std::size_t m = 0; m < q.size(); ++m)
      if (owner[m] == i) g.axpy(-l2_inner(q[m], f), q[m]);
    r -= g;
    const double gn = std::sqrt(l2_inner(g, g));
    info->residual = gn > 0.0 ? std::sqrt(l2_inner(r, r)) / gn : 0.0;
  }
  return x;
}

ContinuationResult continuation(const Operator& a, const Spectrum& s,
                                const ContinuationOptions& opts) {
  if (opts.p_list.empty()) throw DomainError("continuation needs at least one exponent");
  for (std::size_t k = 0; k < opts.p_list.size(); ++k) {
    if (!(opts.p_list[k] > 2.0)) throw DomainError("continuation exponents must exceed 2");
    if (k > 0 && !(opts.p_list[k] < opts.p_list[k - 1]))
      throw DomainError("continuation exponents must decrease strictly");
  }
  const int i = opts.mode == BranchMode::GroundState ? 1 : 2;

  ContinuationResult out;
  out.cluster = i;
  out.eigenvalue = s.cluster(i).eigenvalue;
  out.lambda = opts.lambda_override > 0.0 ? opts.lambda_override : opts.lambda_factor * out.eigenvalue;
  if (!(out.lambda > 0.0)) throw DomainError("continuation lambda must be positive");
  out.limit = limit_minimize(s, i);

  const Field& u_star = out.limit.u;
  const double star_norm = std::sqrt(h_norm_sq(a, u_star));
  Field w = predictor_w(a, s, i, u_star, &out.predictor);

  Field start = u_star;
  bool first = true;
  for (double p : opts.p_list) {
    ContinuationStep step;
    step.p = p;
    if (first && opts.use_predictor) start.axpy(p - 2.0, w);
    first = false;

    SolveConfig cfg = opts.solver;
    cfg.params = {p, out.lambda};
    try {
      step.result = opts.mode == BranchMode::GroundState ? ground_state(a, cfg, start)
                                                         : least_energy_nodal(a, cfg, start);
    } catch (const PartVanished& e) {
      step.skipped = true;
      step.note = e.what();
      out.steps.push_back(std::move(step));
      continue;
    }
    const Field& u = step.result.u;
    step.h_norm = std::sqrt(h_norm_sq(a, u));
    step.rescaled = u;
    step.rescaled *= std::pow(out.eigenvalue / out.lambda, 1.0 / (2.0 - p));
    step.rescaled_h_norm = std::sqrt(h_norm_sq(a, step.rescaled));
    const Field proj = project_eigenspace(s, i, step.rescaled);
    step.eigenspace_distance = std::sqrt(std::max(0.0, h_norm_sq(a, step.rescaled - proj)));
    double best = std::numeric_limits<double>::infinity();
    for (const Field& m : out.limit.equivalent) {
      best = std::min(best, std::sqrt(h_norm_sq(a, step.rescaled - m)));
      best = std::min(best, std::sqrt(h_norm_sq(a, step.rescaled + m)));
    }
    step.limit_distance = best;
    step.relative_limit_distance = star_norm > 0.0 ? best / star_norm : best;
    start = u;
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace nehari
