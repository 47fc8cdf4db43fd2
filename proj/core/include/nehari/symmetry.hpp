#pragma once

// Lattice symmetries of the domain acting on grid fields by node
// permutation, and odd/even/broken classification of solutions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/operator.hpp"

namespace nehari {

enum class TransformKind {
  ReflectX,         // (x, y) -> (x, 2 yc - y), about the horizontal median
  ReflectY,         // (x, y) -> (2 xc - x, y), about the vertical median
  ReflectDiag,      // swap offsets from the centre
  ReflectAntiDiag,  // swap and negate offsets from the centre
  PointInversion,   // (x, y) -> (2 xc - x, 2 yc - y)
};

inline constexpr TransformKind kAllTransforms[] = {
    TransformKind::ReflectX, TransformKind::ReflectY, TransformKind::ReflectDiag,
    TransformKind::ReflectAntiDiag, TransformKind::PointInversion};

std::string to_string(TransformKind kind);
/// Inverse of to_string; nullopt for unknown names.
std::optional<TransformKind> transform_from_string(const std::string& name);

struct SymmetryTransform {
  TransformKind kind;
  /// image[k] is the node that node k is mapped to.
  std::vector<std::int32_t> image;
};

/// Throws NonConforming when the map does not send interior nodes exactly
/// onto interior nodes (or, for diagonals, when the lattice box is not
/// square).
SymmetryTransform make_transform(const GridPtr& grid, TransformKind kind);

/// (u o g)(x) = u(g x)
Field apply(const SymmetryTransform& t, const Field& u);

/// Transforms under which the lattice and the sampled potential are
/// invariant (|V(g x) - V(x)| <= tol max(1, |V(x)|) at every node).
std::vector<SymmetryTransform> applicable_transforms(const GridPtr& grid, const Field& potential,
                                                     double tol = 1e-10);

enum class Parity { Even, Odd, Broken };
std::string to_string(Parity p);

struct Classification {
  TransformKind kind;
  double even_score = 0.0;  // ||u o g - u||_H / ||u||_H
  double odd_score = 0.0;   // ||u o g + u||_H / ||u||_H
  Parity parity = Parity::Broken;
};

Classification classify(const Operator& a, const Field& u, const SymmetryTransform& t,
                        double threshold = 1e-3);

struct SymmetryReport {
  double threshold = 1e-3;
  std::vector<Classification> entries;

  /// Entry for `kind`, if that transform was classified.
  const Classification* find(TransformKind kind) const;
  /// "even reflect-x, odd point-inversion" style summary; transforms with
  /// parity Broken are listed as "broken (...)".
  std::string summary() const;
};

SymmetryReport classify_all(const Operator& a, const Field& u,
                            const std::vector<SymmetryTransform>& transforms,
                            double threshold = 1e-3);

}  // namespace nehari
