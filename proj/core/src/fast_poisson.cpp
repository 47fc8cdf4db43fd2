#include "nehari/fast_poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "nehari/errors.hpp"

namespace nehari {
namespace {

// FFTW's planner is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  FftwBuffer() = default;
  explicit FftwBuffer(std::size_t n) { reserve(n); }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void reserve(std::size_t n) {
    if (n <= size) return;
    fftw_free(data);
    data = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    if (!data) throw std::bad_alloc();
    size = n;
  }
  double* data = nullptr;
  std::size_t size = 0;
};

// Per-thread scratch space, so concurrent solves never share buffers.
struct Scratch {
  FftwBuffer a, b;
};

Scratch& scratch(std::size_t n) {
  thread_local Scratch s;
  s.a.reserve(n);
  s.b.reserve(n);
  return s;
}

}  // namespace

JacobiPreconditioner::JacobiPreconditioner(std::vector<double> diagonal) : inv_diag_(std::move(diagonal)) {
  for (double& d : inv_diag_) {
    if (!(d > 0.0)) throw NotPositiveDefinite("Jacobi preconditioner needs a positive diagonal");
    d = 1.0 / d;
  }
}

void JacobiPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  for (std::size_t k = 0; k < r.size(); ++k) z[k] = inv_diag_[k] * r[k];
}

double FastPoissonPreconditioner::box_ground_eigenvalue(const Grid& grid) {
  const double h = grid.spacing();
  const double sx = std::sin(std::numbers::pi / (2.0 * (grid.box_width() + 1)));
  const double sy = std::sin(std::numbers::pi / (2.0 * (grid.box_height() + 1)));
  return 4.0 / (h * h) * (sx * sx + sy * sy);
}

FastPoissonPreconditioner::FastPoissonPreconditioner(GridPtr grid, double shift)
    : grid_(std::move(grid)), shift_(shift) {
  const int bw = grid_->box_width();
  const int bh = grid_->box_height();
  const double h = grid_->spacing();
  if (!(box_ground_eigenvalue(*grid_) + shift_ > 0.0))
    throw NotPositiveDefinite("fast Poisson shift makes the box operator indefinite");

  std::vector<double> lx(bw), ly(bh);
  for (int a = 0; a < bw; ++a) {
    const double s = std::sin(std::numbers::pi * (a + 1) / (2.0 * (bw + 1)));
    lx[a] = 4.0 / (h * h) * s * s;
  }
  for (int b = 0; b < bh; ++b) {
    const double s = std::sin(std::numbers::pi * (b + 1) / (2.0 * (bh + 1)));
    ly[b] = 4.0 / (h * h) * s * s;
  }
  // RODFT00 applied twice scales by 2(n+1) per dimension.
  const double norm = 4.0 * (bw + 1.0) * (bh + 1.0);
  inv_eig_.resize(static_cast<std::size_t>(bw) * bh);
  for (int b = 0; b < bh; ++b)
    for (int a = 0; a < bw; ++a)
      inv_eig_[static_cast<std::size_t>(b) * bw + a] = 1.0 / ((lx[a] + ly[b] + shift_) * norm);

  FftwBuffer in(inv_eig_.size()), out(inv_eig_.size());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_r2r_2d(bh, bw, in.data, out.data, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  if (!plan_) throw Error("FftwError", "could not create sine-transform plan");
}

FastPoissonPreconditioner::~FastPoissonPreconditioner() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void FastPoissonPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const Grid& g = *grid_;
  const std::size_t box = inv_eig_.size();
  Scratch& w = scratch(box);
  FftwBuffer& a = w.a;
  FftwBuffer& b = w.b;
  std::fill(a.data, a.data + box, 0.0);
  const int bw = g.box_width();
  for (std::size_t k = 0; k < g.size(); ++k)
    a.data[static_cast<std::size_t>(g.box_j(k)) * bw + g.box_i(k)] = r[k];
  auto plan = static_cast<fftw_plan>(plan_);
  fftw_execute_r2r(plan, a.data, b.data);
  for (std::size_t q = 0; q < box; ++q) b.data[q] *= inv_eig_[q];
  fftw_execute_r2r(plan, b.data, a.data);
  for (std::size_t k = 0; k < g.size(); ++k)
    z[k] = a.data[static_cast<std::size_t>(g.box_j(k)) * bw + g.box_i(k)];
}

}  // namespace nehari
