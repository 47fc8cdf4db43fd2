#pragma once

// The p -> 2 limit: minimisers of the limit functional on an eigenspace,
// the first-order correction w, and continuation in p with rescaling.

#include <string>
#include <vector>

#include "nehari/mountain_pass.hpp"
#include "nehari/spectrum.hpp"

namespace nehari {

/// int u^2 log u^2 (zero where u vanishes).
double limit_constraint(const Field& u);
/// (lambda_i / 2) int (u^2 - u^2 log u^2)
double limit_energy(double lambda_i, const Field& u);

/// The multiple t v (t > 0) with int (t v)^2 log (t v)^2 = 0. Throws ZeroField.
Field limit_scale(const Field& v);

struct LimitMinimizer {
  int cluster = 0;
  double eigenvalue = 0.0;
  /// Unit coefficients on an L2-orthonormal basis of the eigenspace.
  std::vector<double> coefficients;
  double scale = 0.0;
  Field u;
  double energy = 0.0;
  double constraint_residual = 0.0;
  /// Every global minimiser found, u first. Opposite signs are not listed.
  std::vector<Field> equivalent;
};

/// For a direction v with int v^2 = 1 the constraint fixes
/// log t^2 = -int v^2 log v^2 and the energy is (lambda_i/2) t^2. Simple
/// eigenvalues are closed form; for multiplicity 2 or 3 the unit sphere of
/// coefficients is searched on a grid and refined by golden sections.
/// Throws ClusterMissing, Unsupported (multiplicity above 3).
LimitMinimizer limit_minimize(const Spectrum& s, int i);

/// Unit-norm direction with the given coefficients and its limit energy.
double limit_energy_of_direction(const Spectrum& s, int i, const std::vector<double>& coefficients);

struct PredictorInfo {
  /// ||P_E f||_2 / ||f||_2 for f = lambda_i u* log|u*|; small when u* is a
  /// critical point of the limit problem.
  double rhs_projection = 0.0;
  /// ||(A - lambda_i) w - (f - P_E f)||_2 / ||f - P_E f||_2
  double residual = 0.0;
  int cg_iterations = 0;
};

/// Solves (A - lambda_i) w = lambda_i u* log|u*| on the H-orthogonal
/// complement of E_i (the E_i part of the right-hand side is dropped).
/// Lower eigenspaces are handled exactly; the rest by deflated CG.
/// Throws ClusterMissing, NonConvergence.
Field predictor_w(const Operator& a, const Spectrum& s, int i, const Field& u_star,
                  PredictorInfo* info = nullptr, double tol = 1e-10);

enum class BranchMode { GroundState, Nodal };

struct ContinuationOptions {
  BranchMode mode = BranchMode::GroundState;
  std::vector<double> p_list = {3.0, 2.5, 2.2, 2.1, 2.05, 2.02};
  /// lambda = lambda_factor * lambda_i unless lambda_override > 0.
  double lambda_factor = 1.0;
  double lambda_override = 0.0;
  /// Seed the first step with u* + (p - 2) w instead of u*.
  bool use_predictor = true;
  /// Solver settings; params and seed are filled in per step.
  SolveConfig solver;
};

struct ContinuationStep {
  double p = 0.0;
  bool skipped = false;
  std::string note;
  SolveResult result;
  /// (lambda_i / lambda)^{1/(2-p)} u_p
  Field rescaled;
  double h_norm = 0.0;           // ||u_p||_H
  double rescaled_h_norm = 0.0;  // ||rescaled||_H
  double eigenspace_distance = 0.0;  // ||rescaled - P_E rescaled||_H
  double limit_distance = 0.0;       // min over minimisers and sign of ||rescaled -+ u*||_H
  double relative_limit_distance = 0.0;  // limit_distance / ||u*||_H
};

struct ContinuationResult {
  int cluster = 0;
  double eigenvalue = 0.0;
  double lambda = 0.0;
  LimitMinimizer limit;
  PredictorInfo predictor;
  std::vector<ContinuationStep> steps;
};

/// Warm-started solves along a strictly decreasing list of p > 2. A step
/// whose solve loses a nodal part is recorded as skipped.
ContinuationResult continuation(const Operator& a, const Spectrum& s,
                                const ContinuationOptions& opts);

}  // namespace nehari
