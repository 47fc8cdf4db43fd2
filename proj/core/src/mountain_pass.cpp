#include "nehari/mountain_pass.hpp"

#include <cmath>
#include <deque>
#include <optional>

#include "nehari/errors.hpp"
#include "nehari/linalg.hpp"

namespace nehari {

void SolveConfig::validate() const {
  params.validate();
  if (!(step0 > 0.0)) throw DomainError("step0 must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("shrink must lie in (0,1)");
  if (!(grad_tol > 0.0)) throw DomainError("grad_tol must be positive");
  if (!(armijo > 0.0 && armijo < 0.5)) throw DomainError("armijo constant must lie in (0,1/2)");
  if (max_iter < 1) throw DomainError("max_iter must be positive");
  if (memory < 1) throw DomainError("memory must be positive");
  if (morse_k < 1) throw DomainError("morse_k must be positive");
  if (max_restarts < 0) throw DomainError("max_restarts must be non-negative");
}

namespace {

/// A point on the constraint set with the quantities the descent reuses.
struct Point {
  Field u;
  Field au;  // A u
  double energy = 0.0;
  double norm_sq = 0.0;
};

class Solver {
 public:
  Solver(const Operator& a, const SolveConfig& cfg, bool nodal)
      : a_(a), cfg_(cfg), nodal_(nodal), grad_(a, cfg.params), w_(a.grid().weight()) {}

  SolveResult run(const Field& start) {
    if (start.grid_ptr() != a_.grid_ptr()) throw GridMismatch("seed lives on another grid");
    Point x = make_point(project(start));
    SolveResult res;
    int restarts = 0;
    for (;;) {
      x = descend(std::move(x), res);
      if (!cfg_.morse_check) break;
      res.morse = morse_index(a_, cfg_.params, x.u, cfg_.morse_k);
      res.morse_index = res.morse.index;
      if (res.morse_index <= expected_index() || restarts >= cfg_.max_restarts) break;
      std::optional<Point> kicked = escape(x, res.morse);
      if (!kicked) break;
      ++restarts;
      x = std::move(*kicked);
    }
    res.u = x.u;
    res.energy = x.energy;
    res.min = x.u.min();
    res.max = x.u.max();
    res.restarts = restarts;
    res.cg_iterations = grad_.cg_iterations();
    return res;
  }

 private:
  int expected_index() const { return nodal_ ? 2 : 1; }

  Field project(const Field& u) const {
    return nodal_ ? nodal_nehari_project(a_, cfg_.params, u, cfg_.nodal_scaling)
                  : nehari_project(a_, cfg_.params, u);
  }

  Point make_point(Field u) const {
    Point x;
    x.au = a_.apply(u);
    x.norm_sq = linalg::dot(u.values(), x.au.values()) * w_;
    x.energy = 0.5 * x.norm_sq - cfg_.params.lambda / cfg_.params.p * lp_integral(u, cfg_.params.p);
    x.u = std::move(u);
    return x;
  }

  double h_dot(const Field& applied, const Field& v) const {
    return linalg::dot(applied.values(), v.values()) * w_;
  }

  /// Try project(u + s d); nullopt when a nodal part vanishes.
  std::optional<Point> trial(const Field& u, double s, const Field& d, bool& vanished) const {
    Field v = u;
    v.axpy(s, d);
    try {
      return make_point(project(v));
    } catch (const PartVanished&) {
      vanished = true;
      return std::nullopt;
    } catch (const ZeroField&) {
      vanished = true;
      return std::nullopt;
    }
  }

  Point descend(Point x, SolveResult& res) {
    struct Pair {
      Field s, y, as, ay;
      double rho;
    };
    std::deque<Pair> mem;
    Field g = grad_(x.u);
    for (;;) {
      const Field ag = a_.apply(g);
      const double gg = h_dot(ag, g);
      const double r = std::sqrt(std::max(0.0, gg) / x.norm_sq);
      res.residual = r;
      if (r <= cfg_.grad_tol) {
        res.trace.push_back({x.energy, r, 0.0});
        return x;
      }
      if (res.iterations >= cfg_.max_iter)
        throw NonConvergence("descent stopped after " + std::to_string(res.iterations) +
                             " iterations at relative gradient " + std::to_string(r));

      // Search direction d = -H g by the two-loop recursion.
      Field d = g;
      if (cfg_.method == DescentMethod::Lbfgs && !mem.empty()) {
        std::vector<double> alpha(mem.size());
        for (std::size_t i = mem.size(); i-- > 0;) {
          alpha[i] = mem[i].rho * h_dot(mem[i].as, d);
          d.axpy(-alpha[i], mem[i].y);
        }
        const Pair& last = mem.back();
        d *= 1.0 / (last.rho * h_dot(last.ay, last.y));
        for (std::size_t i = 0; i < mem.size(); ++i) {
          const double beta = mem[i].rho * h_dot(mem[i].ay, d);
          d.axpy(alpha[i] - beta, mem[i].s);
        }
      }
      d *= -1.0;
      double slope = h_dot(ag, d);
      if (!(slope < 0.0)) {
        d = g;
        d *= -1.0;
        slope = -gg;
        mem.clear();
      }

      double s = cfg_.step0;
      bool vanished = false, all_vanished = true;
      std::optional<Point> next;
      for (;;) {
        bool v = false;
        next = trial(x.u, s, d, v);
        vanished = vanished || v;
        all_vanished = all_vanished && v;
        if (next && next->energy <= x.energy + cfg_.armijo * s * slope) break;
        s *= cfg_.shrink;
        if (s < 1e-12) {
          if (nodal_ && all_vanished)
            throw PartVanished("every trial step lost one nodal part (step below 1e-12)");
          throw NonConvergence("line search stalled at relative gradient " + std::to_string(r));
        }
      }
      res.trace.push_back({x.energy, r, s});
      ++res.iterations;

      Field g_next = grad_(next->u);
      if (cfg_.method == DescentMethod::Lbfgs) {
        Pair p{next->u - x.u, g_next - g, {}, {}, 0.0};
        p.as = next->au - x.au;
        p.ay = a_.apply(p.y);
        const double sy = h_dot(p.as, p.y);
        const double ss = h_dot(p.as, p.s);
        const double yy = h_dot(p.ay, p.y);
        if (sy > 1e-12 * std::sqrt(ss * yy)) {
          p.rho = 1.0 / sy;
          mem.push_back(std::move(p));
          if (static_cast<int>(mem.size()) > cfg_.memory) mem.pop_front();
        }
      }
      x = std::move(*next);
      g = std::move(g_next);
    }
  }

  /// Move off a saddle along an unstable direction of the linearisation that
  /// is not tangent to the scaling directions.
  std::optional<Point> escape(const Point& x, const MorseInfo& m) const {
    std::vector<Field> q, aq;
    auto add_basis = [&](Field b) {
      Field ab = a_.apply(b);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double c = h_dot(aq[i], b);
        b.axpy(-c, q[i]);
        ab.axpy(-c, aq[i]);
      }
      const double n = std::sqrt(h_dot(ab, b));
      if (!(n > 0.0)) return;
      b *= 1.0 / n;
      ab *= 1.0 / n;
      q.push_back(std::move(b));
      aq.push_back(std::move(ab));
    };
    if (nodal_) {
      add_basis(x.u.positive_part());
      add_basis(x.u.negative_part());
    } else {
      add_basis(x.u);
    }

    // Candidate directions: unstable eigenvectors with enough weight off the
    // scaling span. The first one that lowers the energy wins.
    const double unorm = std::sqrt(x.norm_sq);
    for (std::size_t j = 0; j < m.nu.size(); ++j) {
      if (!(m.nu[j] > 1.0 + 1e-8)) break;
      Field v = m.vectors[j];
      Field av = a_.apply(v);
      const double n0 = std::sqrt(h_dot(av, v));
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double c = h_dot(aq[i], v);
        v.axpy(-c, q[i]);
        av.axpy(-c, aq[i]);
      }
      const double n1 = std::sqrt(std::max(0.0, h_dot(av, v)));
      if (!(n1 > 0.3 * n0)) continue;
      v *= 1.0 / n1;
      std::optional<Point> best;
      for (double sign : {1.0, -1.0}) {
        for (double delta : {0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) {
          bool vanished = false;
          auto c = trial(x.u, sign * delta * unorm, v, vanished);
          if (c && (!best || c->energy < best->energy)) best = std::move(c);
        }
      }
      if (best && best->energy < x.energy - 1e-12 * std::fabs(x.energy)) return best;
    }
    return std::nullopt;
  }

  const Operator& a_;
  const SolveConfig& cfg_;
  bool nodal_;
  GradientEvaluator grad_;
  double w_;
};

Field sample_seed(const Operator& a, const SolveConfig& cfg) {
  if (cfg.seed.empty()) throw DomainError("no starting function given");
  return sample(cfg.seed, a.grid_ptr(), cfg.sampling).field;
}

}  // namespace

SolveResult ground_state(const Operator& a, const SolveConfig& cfg, const Field& start) {
  cfg.validate();
  return Solver(a, cfg, false).run(start);
}

SolveResult ground_state(const Operator& a, const SolveConfig& cfg) {
  return ground_state(a, cfg, sample_seed(a, cfg));
}

SolveResult least_energy_nodal(const Operator& a, const SolveConfig& cfg, const Field& start) {
  cfg.validate();
  return Solver(a, cfg, true).run(start);
}

SolveResult least_energy_nodal(const Operator& a, const SolveConfig& cfg) {
  return least_energy_nodal(a, cfg, sample_seed(a, cfg));
}

}  // namespace nehari
