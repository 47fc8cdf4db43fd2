#pragma once

// Projected descent solvers for ground states (on the Nehari set) and
// least-energy nodal solutions (on the nodal Nehari set).

#include <vector>

#include "nehari/expr.hpp"
#include "nehari/grid.hpp"
#include "nehari/operator.hpp"
#include "nehari/variational.hpp"

namespace nehari {

enum class DescentMethod {
  /// Limited-memory BFGS in the H-inner product on the projected iterates.
  Lbfgs,
  /// Plain projected gradient steps.
  Steepest,
};

struct SolveConfig {
  ProblemParams params;
  expr::Expr seed;
  double step0 = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  /// Stop when ||grad||_H / ||u||_H <= grad_tol.
  double grad_tol = 1e-6;
  int max_iter = 5000;
  DescentMethod method = DescentMethod::Lbfgs;
  int memory = 8;
  NodalScaling nodal_scaling = NodalScaling::Coupled;
  SampleOptions sampling;
  /// Compute the Morse index of the converged iterate.
  bool morse_check = true;
  int morse_k = 6;
  /// When the Morse index is too high, push the iterate along an unstable
  /// direction and descend again, at most this many times.
  int max_restarts = 6;

  /// Throws DomainError on invalid settings.
  void validate() const;
};

struct TraceEntry {
  double energy;
  double residual;
  double step;
};

struct SolveResult {
  Field u;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  /// -1 when the Morse index was not computed.
  int morse_index = -1;
  MorseInfo morse;
  double min = 0.0;
  double max = 0.0;
  std::vector<TraceEntry> trace;
  int restarts = 0;
  int cg_iterations = 0;
};

/// Throws NonConvergence, ZeroField (seed), NotPositiveDefinite.
SolveResult ground_state(const Operator& a, const SolveConfig& cfg);
SolveResult ground_state(const Operator& a, const SolveConfig& cfg, const Field& start);

/// Throws NonConvergence, PartVanished (seed does not change sign, or every
/// trial step loses a sign), NotPositiveDefinite.
SolveResult least_energy_nodal(const Operator& a, const SolveConfig& cfg);
SolveResult least_energy_nodal(const Operator& a, const SolveConfig& cfg, const Field& start);

}  // namespace nehari
