#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nehari/errors.hpp"
#include "nehari/linalg.hpp"
#include "nehari/operator.hpp"
#include "nehari/spectrum.hpp"

namespace nehari {

AssumptionReport check_assumptions(const Operator& a) {
  AssumptionReport r;
  const Field& v = a.potential();
  r.potential_min = v.min();
  r.potential_max = v.max();
  r.potential_finite = std::isfinite(r.potential_min) && std::isfinite(r.potential_max);
  r.notes.push_back(
      "integrability of the positive part of V is only checked through finiteness of nodal values");
  if (!r.potential_finite) {
    r.notes.push_back("potential has non-finite nodal values");
    return r;
  }

  r.smallest_eigenvalue = smallest_eigenvalue(a);
  r.positive_definite = r.smallest_eigenvalue > 0.0;

  // Half white noise, half smoothed noise (one Poisson solve), so both ends
  // of the spectrum are represented in the ratio bounds.
  const std::size_t n = a.size();
  std::mt19937_64 rng(20240611ULL);
  std::vector<double> u(n), lu(n), au(n);
  const auto smoother = FastPoissonPreconditioner(a.grid_ptr(), 0.0);
  LinearMap lap = [&a](std::span<const double> x, std::span<double> y) { a.apply_laplacian(x, y); };
  r.ratio_min = std::numeric_limits<double>::infinity();
  r.ratio_max = -std::numeric_limits<double>::infinity();
  constexpr int kSamples = 50;
  for (int s = 0; s < kSamples; ++s) {
    for (double& x : u) x = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
    if (s % 2 == 1) {
      std::vector<double> smooth(n, 0.0);
      pcg(lap, &smoother, u, smooth, 1e-8, 5000);
      u.swap(smooth);
    }
    a.apply_laplacian(u, lu);
    a.apply(u, au);
    const double ratio = linalg::dot(u, au) / linalg::dot(u, lu);
    r.ratio_min = std::min(r.ratio_min, ratio);
    r.ratio_max = std::max(r.ratio_max, ratio);
  }
  r.samples = kSamples;
  if (!r.positive_definite) r.notes.push_back("operator is not positive definite");
  return r;
}

}  // namespace nehari
