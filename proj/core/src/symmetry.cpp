#include "nehari/symmetry.hpp"

#include <cmath>

#include "nehari/errors.hpp"
#include "nehari/linalg.hpp"

namespace nehari {

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::ReflectX: return "reflect-x";
    case TransformKind::ReflectY: return "reflect-y";
    case TransformKind::ReflectDiag: return "reflect-diag";
    case TransformKind::ReflectAntiDiag: return "reflect-antidiag";
    case TransformKind::PointInversion: return "point-inversion";
  }
  return "?";
}

std::optional<TransformKind> transform_from_string(const std::string& name) {
  for (TransformKind k : kAllTransforms)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Broken: return "broken";
  }
  return "?";
}

namespace {

/// Twice the box coordinate of the domain centre, which must be an integer.
int doubled_centre(double centre, double origin, double h, const char* axis) {
  const double c2 = 2.0 * (centre - origin) / h;
  const double r = std::round(c2);
  if (std::fabs(c2 - r) > 1e-9)
    throw NonConforming(std::string("domain centre is not on the half-lattice along ") + axis);
  return static_cast<int>(r);
}

}  // namespace

SymmetryTransform make_transform(const GridPtr& grid, TransformKind kind) {
  const Grid& g = *grid;
  const double h = g.spacing();
  const int ci2 = doubled_centre(g.centre_x(), g.box_x0(), h, "x");
  const int cj2 = doubled_centre(g.centre_y(), g.box_y0(), h, "y");
  const bool diagonal = kind == TransformKind::ReflectDiag || kind == TransformKind::ReflectAntiDiag;
  if (diagonal && g.box_width() != g.box_height())
    throw NonConforming("diagonal reflections need a square lattice box");

  SymmetryTransform t{kind, std::vector<std::int32_t>(g.size())};
  for (std::size_t k = 0; k < g.size(); ++k) {
    // Offsets from the centre, doubled so they stay integral.
    const int di = 2 * g.box_i(k) - ci2;
    const int dj = 2 * g.box_j(k) - cj2;
    int ei = di, ej = dj;
    switch (kind) {
      case TransformKind::ReflectX: ej = -dj; break;
      case TransformKind::ReflectY: ei = -di; break;
      case TransformKind::ReflectDiag: ei = dj; ej = di; break;
      case TransformKind::ReflectAntiDiag: ei = -dj; ej = -di; break;
      case TransformKind::PointInversion: ei = -di; ej = -dj; break;
    }
    if ((ei + ci2) % 2 != 0 || (ej + cj2) % 2 != 0)
      throw NonConforming(to_string(kind) + " does not map lattice points to lattice points");
    const std::int32_t target = g.index((ei + ci2) / 2, (ej + cj2) / 2);
    if (target < 0) throw NonConforming(to_string(kind) + " maps an interior node outside the domain");
    t.image[k] = target;
  }
  return t;
}

Field apply(const SymmetryTransform& t, const Field& u) {
  if (t.image.size() != u.size()) throw GridMismatch("transform built for another grid");
  Field out(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[static_cast<std::size_t>(t.image[k])];
  return out;
}

std::vector<SymmetryTransform> applicable_transforms(const GridPtr& grid, const Field& potential,
                                                     double tol) {
  std::vector<SymmetryTransform> out;
  for (TransformKind kind : kAllTransforms) {
    SymmetryTransform t;
    try {
      t = make_transform(grid, kind);
    } catch (const NonConforming&) {
      continue;
    }
    bool invariant = true;
    for (std::size_t k = 0; k < potential.size() && invariant; ++k) {
      const double v = potential[k];
      const double gv = potential[static_cast<std::size_t>(t.image[k])];
      invariant = std::fabs(gv - v) <= tol * std::max(1.0, std::fabs(v));
    }
    if (invariant) out.push_back(std::move(t));
  }
  return out;
}

Classification classify(const Operator& a, const Field& u, const SymmetryTransform& t,
                        double threshold) {
  Classification c;
  c.kind = t.kind;
  const double un = std::sqrt(std::max(0.0, h_norm_sq(a, u)));
  if (un == 0.0) {
    c.parity = Parity::Even;
    return c;
  }
  const Field gu = apply(t, u);
  c.even_score = std::sqrt(std::max(0.0, h_norm_sq(a, gu - u))) / un;
  c.odd_score = std::sqrt(std::max(0.0, h_norm_sq(a, gu + u))) / un;
  if (c.even_score < threshold)
    c.parity = Parity::Even;
  else if (c.odd_score < threshold)
    c.parity = Parity::Odd;
  else
    c.parity = Parity::Broken;
  return c;
}

const Classification* SymmetryReport::find(TransformKind kind) const {
  for (const auto& e : entries)
    if (e.kind == kind) return &e;
  return nullptr;
}

std::string SymmetryReport::summary() const {
  std::string s;
  for (const auto& e : entries) {
    if (!s.empty()) s += "; ";
    if (e.parity == Parity::Broken)
      s += "broken (" + to_string(e.kind) + ")";
    else
      s += to_string(e.parity) + " " + to_string(e.kind);
  }
  return s.empty() ? "no applicable transforms" : s;
}

SymmetryReport classify_all(const Operator& a, const Field& u,
                            const std::vector<SymmetryTransform>& transforms, double threshold) {
  SymmetryReport r;
  r.threshold = threshold;
  for (const auto& t : transforms) r.entries.push_back(classify(a, u, t, threshold));
  return r;
}

}  // namespace nehari
