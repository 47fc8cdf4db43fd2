#pragma once

// Masked Cartesian lattices over rectangles and disks, grid functions with
// implicit homogeneous Dirichlet data, and composite midpoint quadrature.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nehari/expr.hpp"

namespace nehari {

struct Rectangle {
  double x0, x1, y0, y1;
};

struct Disk {
  double cx, cy, radius;
};

using Domain = std::variant<Rectangle, Disk>;

std::string describe(const Domain& d);

/// Interior nodes of a uniform lattice with spacing h = 1/n.
///
/// Nodes live on a rectangular "box" of `box_width() x box_height()` lattice
/// points; the mask selects the ones strictly inside the domain. Interior
/// nodes are numbered row-major (j outer, i inner) in box coordinates.
class Grid {
 public:
  /// `intervals_per_unit` is the number of lattice intervals per unit length.
  /// Rectangle sides must be integer multiples of 1/n. Throws DegenerateDomain.
  static std::shared_ptr<const Grid> build(const Domain& domain, int intervals_per_unit);

  const Domain& domain() const { return domain_; }
  bool is_disk() const { return std::holds_alternative<Disk>(domain_); }
  int intervals_per_unit() const { return n_; }
  double spacing() const { return h_; }
  /// Quadrature weight of every interior node (h^2).
  double weight() const { return h_ * h_; }
  std::size_t size() const { return xs_.size(); }

  double x(std::size_t k) const { return xs_[k]; }
  double y(std::size_t k) const { return ys_[k]; }
  int box_i(std::size_t k) const { return bi_[k]; }
  int box_j(std::size_t k) const { return bj_[k]; }

  int box_width() const { return bw_; }
  int box_height() const { return bh_; }
  /// Coordinates of box lattice point (0,0).
  double box_x0() const { return bx0_; }
  double box_y0() const { return by0_; }

  /// Linear index of box point (i,j), or -1 when it is outside the box or
  /// not an interior node.
  std::int32_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= bw_ || j >= bh_) return -1;
    return map_[static_cast<std::size_t>(j) * bw_ + i];
  }

  /// Geometric centre of the domain (used by symmetry transforms).
  double centre_x() const;
  double centre_y() const;

 private:
  Grid() = default;

  Domain domain_;
  int n_ = 0;
  double h_ = 0.0;
  int bw_ = 0, bh_ = 0;
  double bx0_ = 0.0, by0_ = 0.0;
  std::vector<double> xs_, ys_;
  std::vector<int> bi_, bj_;
  std::vector<std::int32_t> map_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Real function sampled at the interior nodes of a grid; zero elsewhere.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(grid_->size(), fill) {}
  Field(GridPtr grid, std::vector<double> values);

  const GridPtr& grid_ptr() const { return grid_; }
  const Grid& grid() const { return *grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double max() const;
  double min() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  /// this += a * other
  Field& axpy(double a, const Field& other);

  /// Pointwise max(u,0) and min(u,0).
  Field positive_part() const;
  Field negative_part() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Throws GridMismatch unless both fields live on the same grid object.
void require_same_grid(const Field& a, const Field& b);

enum class SingularRule {
  /// Average the expression over an m x m set of sub-cell midpoints of the
  /// node's h x h cell.
  CellAverage,
  /// Re-evaluate at (x + h*factor, y + h*factor).
  Offset,
};

struct SampleOptions {
  SingularRule rule = SingularRule::CellAverage;
  double offset_factor = 1e-3;
  int subcells = 32;
};

struct Substitution {
  std::size_t node;
  double x, y;
  double value;
  std::string reason;
};

struct SampledField {
  Field field;
  std::vector<Substitution> substitutions;
};

/// Evaluate `e` at every interior node. Nodes where evaluation raises
/// DivisionByZero or DomainError are regularised by `opts.rule` and logged.
/// Throws SamplingError if regularisation also fails.
SampledField sample(const expr::Expr& e, const GridPtr& grid, const SampleOptions& opts = {});

/// Sum of weight * f over interior nodes.
double integrate(const Field& f);
/// Sum of weight * |u|^p. Requires p > 1.
double lp_integral(const Field& u, double p);
/// Sum of weight * u * v.
double l2_inner(const Field& u, const Field& v);

/// CSV with header `x,y,value`, one row per interior node in node order,
/// values printed with 17 significant digits.
void write_csv(std::ostream& os, const Field& f);
std::string to_csv(const Field& f);
/// Reads a CSV written by write_csv for the same grid (coordinates are
/// checked to 1e-9). Throws IoError / GridMismatch.
Field read_csv(std::istream& is, const GridPtr& grid);

}  // namespace nehari
