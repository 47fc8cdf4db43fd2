#pragma once

// The energy E_p(u) = 1/2 ||u||_H^2 - (lambda/p) int |u|^p, its gradient in
// the H-inner product, the Nehari projections and the Morse index.

#include <vector>

#include "nehari/grid.hpp"
#include "nehari/operator.hpp"

namespace nehari {

struct ProblemParams {
  double p = 4.0;
  double lambda = 1.0;

  /// Throws DomainError unless p > 2 and lambda > 0.
  void validate() const;
};

double energy(const Operator& a, const ProblemParams& params, const Field& u);

/// lambda |u|^{p-2} u, nodewise.
Field nonlinearity(const ProblemParams& params, const Field& u);

/// g = u - A^{-1}(lambda |u|^{p-2} u), so that <g, v>_H = dE(u)[v].
Field grad_H(const Operator& a, const ProblemParams& params, const Field& u, double tol = 1e-10);

/// Gradient evaluations along an iteration: each inner solve starts from the
/// previous one, which keeps results deterministic and saves CG steps.
class GradientEvaluator {
 public:
  GradientEvaluator(const Operator& a, ProblemParams params, double tol = 1e-10);
  Field operator()(const Field& u);
  int cg_iterations() const { return cg_iterations_; }

 private:
  const Operator& a_;
  ProblemParams params_;
  double tol_;
  Field last_;
  int cg_iterations_ = 0;
};

/// t* u with t* = (||u||_H^2 / (lambda int |u|^p))^{1/(p-2)}. Throws ZeroField.
Field nehari_project(const Operator& a, const ProblemParams& params, const Field& u);

enum class NodalScaling {
  /// Scale u+ and u- separately to the Nehari set.
  Independent,
  /// Maximise E over {a u+ + b u- : a, b > 0}. On the lattice the two parts
  /// interact through the stencil, and this is the scaling for which the
  /// result satisfies <w, w+->_H = lambda int |w+-|^p.
  Coupled,
};

/// Throws PartVanished when u does not change sign.
Field nodal_nehari_project(const Operator& a, const ProblemParams& params, const Field& u,
                           NodalScaling scaling = NodalScaling::Coupled);

struct MorseInfo {
  int index = 0;
  /// Largest eigenvalues nu of lambda (p-1) |u|^{p-2} x = nu A x, descending.
  /// By Sylvester's law of inertia the linearisation A - lambda (p-1)|u|^{p-2}
  /// has exactly as many negative eigenvalues as there are nu > 1.
  std::vector<double> nu;
  /// Smallest |nu - 1| among the computed values.
  double gap = 0.0;
  /// H-normalised eigenvectors matching `nu`.
  std::vector<Field> vectors;
  int iterations = 0;
};

/// Morse index among the k largest nu, counting nu > 1 + 1e-8.
MorseInfo morse_index(const Operator& a, const ProblemParams& params, const Field& u, int k = 6);

}  // namespace nehari
