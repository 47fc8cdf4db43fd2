#pragma once

// Lowest eigenpairs of A e = lambda e, grouped into distinct eigenvalues.

#include <string>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/operator.hpp"

namespace nehari {

struct Cluster {
  double eigenvalue = 0.0;
  int multiplicity = 0;
  /// L2-normalised (sum w e^2 = 1) and mutually H-orthogonal.
  std::vector<Field> basis;
  /// A e for each basis vector, kept for cheap H-projections.
  std::vector<Field> applied;
  /// ||A e - lambda e||_2 / ||e||_2 per basis vector.
  std::vector<double> residuals;
  /// Simple and spanned by a one-signed eigenfunction.
  bool principal = false;
};

struct Spectrum {
  GridPtr grid;
  /// Ordered by eigenvalue; clusters are numbered from 1 in the API.
  std::vector<Cluster> clusters;
  /// All computed eigenvalues, ascending, with multiplicity.
  std::vector<double> eigenvalues;
  /// Only cluster 1 is principal.
  bool unique_principal = false;
  int iterations = 0;

  /// 1-based; throws ClusterMissing.
  const Cluster& cluster(int i) const;
  int cluster_count() const { return static_cast<int>(clusters.size()); }
};

struct EigOptions {
  int k = 6;
  double tol = 1e-8;
  int max_iter = 1000;
  /// Solve even if A is not positive definite (eigenvalues may be negative).
  bool allow_indefinite = false;
};

/// Block subspace iteration on (A + sigma)^{-1} with Rayleigh-Ritz, sigma
/// chosen so the shifted operator is positive definite. The last cluster is
/// completed past k when the cutoff falls inside it. Throws
/// NotPositiveDefinite (unless allowed) and NonConvergence.
Spectrum eig_smallest(const Operator& a, const EigOptions& opts = {});
Spectrum eig_smallest(const Operator& a, int k, double eig_tol);

/// Smallest eigenvalue of A; A may be indefinite.
double smallest_eigenvalue(const Operator& a, double tol = 1e-8);

/// H-orthogonal projection onto cluster i (1-based).
Field project_eigenspace(const Spectrum& s, int i, const Field& u);

struct ClusterEvidence {
  int index = 0;
  double eigenvalue = 0.0;
  int multiplicity = 0;
  /// Of the first basis vector after scaling its largest-|value| node to +1.
  double normalized_min = 0.0;
  double normalized_max = 0.0;
  bool principal = false;
  /// Lattice edges whose end values have strictly opposite signs.
  int sign_change_edges = 0;
};

struct PrincipalReport {
  bool unique_principal = false;
  std::vector<ClusterEvidence> clusters;
};

PrincipalReport is_unique_principal(const Spectrum& s);

/// Sign test of the eigenfunction convention: after scaling the max-|value|
/// node to be positive, min > -1e-8 * max.
bool is_one_signed(const Field& e);

}  // namespace nehari
