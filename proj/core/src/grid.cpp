#include "nehari/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nehari/errors.hpp"

namespace nehari {

std::string describe(const Domain& d) {
  char buf[160];
  if (const auto* r = std::get_if<Rectangle>(&d)) {
    std::snprintf(buf, sizeof buf, "rectangle (%g,%g)x(%g,%g)", r->x0, r->x1, r->y0, r->y1);
  } else {
    const auto& k = std::get<Disk>(d);
    std::snprintf(buf, sizeof buf, "disk centre (%g,%g) radius %g", k.cx, k.cy, k.radius);
  }
  return buf;
}

namespace {

int lattice_count(double length, int n, const char* what) {
  const double exact = length * n;
  const double rounded = std::round(exact);
  if (std::fabs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    throw DegenerateDomain(std::string(what) + " is not an integer multiple of the grid spacing");
  }
  return static_cast<int>(rounded);
}

}  // namespace

std::shared_ptr<const Grid> Grid::build(const Domain& domain, int n) {
  if (n < 2) throw DegenerateDomain("need at least 2 intervals per unit length");
  std::shared_ptr<Grid> g(new Grid());
  g->domain_ = domain;
  g->n_ = n;
  g->h_ = 1.0 / n;
  const double h = g->h_;

  if (const auto* r = std::get_if<Rectangle>(&domain)) {
    if (!(r->x0 < r->x1) || !(r->y0 < r->y1)) throw DegenerateDomain("rectangle has empty interior");
    const int nx = lattice_count(r->x1 - r->x0, n, "rectangle width");
    const int ny = lattice_count(r->y1 - r->y0, n, "rectangle height");
    if (nx < 2 || ny < 2) throw DegenerateDomain("rectangle has no interior lattice nodes");
    g->bw_ = nx - 1;
    g->bh_ = ny - 1;
    g->bx0_ = r->x0 + h;
    g->by0_ = r->y0 + h;
    g->map_.assign(static_cast<std::size_t>(g->bw_) * g->bh_, -1);
    for (int j = 0; j < g->bh_; ++j) {
      for (int i = 0; i < g->bw_; ++i) {
        g->map_[static_cast<std::size_t>(j) * g->bw_ + i] = static_cast<std::int32_t>(g->xs_.size());
        g->xs_.push_back(r->x0 + (i + 1) * h);
        g->ys_.push_back(r->y0 + (j + 1) * h);
        g->bi_.push_back(i);
        g->bj_.push_back(j);
      }
    }
  } else {
    const auto& d = std::get<Disk>(domain);
    if (!(d.radius > 0.0)) throw DegenerateDomain("disk radius must be positive");
    const double rn = d.radius * n;
    // Largest m with m*h strictly below the radius.
    int m = static_cast<int>(std::ceil(rn)) - 1;
    if (m < 0) m = 0;
    g->bw_ = g->bh_ = 2 * m + 1;
    g->bx0_ = d.cx - m * h;
    g->by0_ = d.cy - m * h;
    g->map_.assign(static_cast<std::size_t>(g->bw_) * g->bh_, -1);
    const double r2 = rn * rn;
    for (int j = -m; j <= m; ++j) {
      for (int i = -m; i <= m; ++i) {
        if (static_cast<double>(i * i + j * j) >= r2) continue;
        g->map_[static_cast<std::size_t>(j + m) * g->bw_ + (i + m)] =
            static_cast<std::int32_t>(g->xs_.size());
        g->xs_.push_back(d.cx + i * h);
        g->ys_.push_back(d.cy + j * h);
        g->bi_.push_back(i + m);
        g->bj_.push_back(j + m);
      }
    }
    if (g->xs_.empty()) throw DegenerateDomain("disk contains no lattice nodes");
  }
  return g;
}

double Grid::centre_x() const {
  if (const auto* r = std::get_if<Rectangle>(&domain_)) return 0.5 * (r->x0 + r->x1);
  return std::get<Disk>(domain_).cx;
}

double Grid::centre_y() const {
  if (const auto* r = std::get_if<Rectangle>(&domain_)) return 0.5 * (r->y0 + r->y1);
  return std::get<Disk>(domain_).cy;
}

// ---------------------------------------------------------------------------

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw GridMismatch("value count differs from node count");
}

double Field::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::max(m, v);
  return values_.empty() ? 0.0 : m;
}

double Field::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, v);
  return values_.empty() ? 0.0 : m;
}

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid_ptr() != b.grid_ptr()) throw GridMismatch("fields live on different grids");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * other.values_[k];
  return *this;
}

Field Field::positive_part() const {
  Field out(grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] = values_[k] > 0.0 ? values_[k] : 0.0;
  return out;
}

Field Field::negative_part() const {
  Field out(grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] = values_[k] < 0.0 ? values_[k] : 0.0;
  return out;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

// ---------------------------------------------------------------------------

namespace {

double regularised_value(const expr::Expr& e, double x, double y, double h,
                         const SampleOptions& opts) {
  if (opts.rule == SingularRule::Offset) {
    const double eps = h * opts.offset_factor;
    return e(x + eps, y + eps);
  }
  const int m = std::max(2, opts.subcells);
  double sum = 0.0;
  for (int b = 0; b < m; ++b) {
    const double sy = y + ((b + 0.5) / m - 0.5) * h;
    for (int a = 0; a < m; ++a) {
      const double sx = x + ((a + 0.5) / m - 0.5) * h;
      sum += e(sx, sy);
    }
  }
  return sum / (static_cast<double>(m) * m);
}

}  // namespace

SampledField sample(const expr::Expr& e, const GridPtr& grid, const SampleOptions& opts) {
  SampledField out{Field(grid), {}};
  const double h = grid->spacing();
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double x = grid->x(k);
    const double y = grid->y(k);
    try {
      out.field[k] = e(x, y);
    } catch (const Error& first) {
      if (first.kind() != "DivisionByZero" && first.kind() != "DomainError") throw;
      double v = 0.0;
      try {
        v = regularised_value(e, x, y, h, opts);
      } catch (const Error& second) {
        std::ostringstream msg;
        msg << "cannot evaluate at (" << x << "," << y << "): " << second.what();
        throw SamplingError(msg.str());
      }
      out.field[k] = v;
      out.substitutions.push_back({k, x, y, v, first.kind()});
    }
  }
  return out;
}

double integrate(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().weight();
}

double lp_integral(const Field& u, double p) {
  if (!(p > 1.0)) throw DomainError("lp_integral requires p > 1");
  double s = 0.0;
  if (p == 4.0) {
    for (double v : u.values()) {
      const double v2 = v * v;
      s += v2 * v2;
    }
  } else if (p == 2.0) {
    for (double v : u.values()) s += v * v;
  } else {
    for (double v : u.values()) s += std::pow(std::fabs(v), p);
  }
  return s * u.grid().weight();
}

double l2_inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s * u.grid().weight();
}

void write_csv(std::ostream& os, const Field& f) {
  os << "x,y,value\n";
  char buf[96];
  const Grid& g = f.grid();
  for (std::size_t k = 0; k < f.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.x(k), g.y(k), f[k]);
    os << buf;
  }
}

std::string to_csv(const Field& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

Field read_csv(std::istream& is, const GridPtr& grid) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty field CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,value") throw IoError("field CSV must start with header x,y,value");
  Field f(grid);
  std::size_t k = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    double x = 0, y = 0, v = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) != 3)
      throw IoError("malformed CSV row " + std::to_string(k + 2));
    if (k >= grid->size()) throw GridMismatch("CSV has more rows than grid nodes");
    if (std::fabs(x - grid->x(k)) > 1e-9 || std::fabs(y - grid->y(k)) > 1e-9)
      throw GridMismatch("CSV row " + std::to_string(k + 2) + " does not match grid node");
    f[k++] = v;
  }
  if (k != grid->size()) throw GridMismatch("CSV has fewer rows than grid nodes");
  return f;
}

}  // namespace nehari
