#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "nehari/errors.hpp"
#include "nehari/spectrum.hpp"
#include "test_support.hpp"

using namespace nehari;

namespace {

constexpr double kPi = std::numbers::pi;

/// Eigenvalues of the five-point Laplacian on a rectangle: products of
/// one-dimensional sine modes.
std::vector<double> discrete_rectangle_eigenvalues(double lx, double ly, int n, int count) {
  const double h = 1.0 / n;
  const int mx = static_cast<int>(std::lround(lx * n)) - 1;
  const int my = static_cast<int>(std::lround(ly * n)) - 1;
  std::vector<double> out;
  for (int i = 1; i <= mx; ++i)
    for (int j = 1; j <= my; ++j)
      out.push_back(4.0 / (h * h) *
                    (std::pow(std::sin(i * kPi * h / (2 * lx)), 2) + std::pow(std::sin(j * kPi * h / (2 * ly)), 2)));
  std::sort(out.begin(), out.end());
  out.resize(static_cast<std::size_t>(count));
  return out;
}

}  // namespace

TEST(Spectrum, SquareMatchesDiscreteSineModes) {
  const auto g = support::square_grid(32);
  const Spectrum s = eig_smallest(support::operator_for(g, "0"), 6, 1e-10);
  const auto ref = discrete_rectangle_eigenvalues(2, 2, 32, 6);
  ASSERT_GE(s.eigenvalues.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(s.eigenvalues[i], ref[i], 1e-8 * ref[i]) << i;
  ASSERT_GE(s.cluster_count(), 3);
  EXPECT_EQ(s.cluster(1).multiplicity, 1);
  EXPECT_EQ(s.cluster(2).multiplicity, 2);
  EXPECT_EQ(s.cluster(3).multiplicity, 1);
}

TEST(Spectrum, SquareContinuumValues) {
  const auto g = support::square_grid(64);
  const Spectrum s = eig_smallest(support::operator_for(g, "0"), 3, 1e-8);
  EXPECT_NEAR(s.cluster(1).eigenvalue, kPi * kPi / 2, 0.005 * kPi * kPi / 2);
  EXPECT_NEAR(s.cluster(2).eigenvalue, 5 * kPi * kPi / 4, 0.005 * 5 * kPi * kPi / 4);
}

TEST(Spectrum, RectangleContinuumValues) {
  const auto g = Grid::build(Rectangle{0, 2, 0, 1}, 32);
  const Spectrum s = eig_smallest(support::operator_for(g, "0"), 4, 1e-10);
  const auto ref = discrete_rectangle_eigenvalues(2, 1, 32, 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.eigenvalues[i], ref[i], 1e-8 * ref[i]);
  // pi^2 (m^2/4 + n^2)
  EXPECT_NEAR(s.cluster(1).eigenvalue, kPi * kPi * 1.25, 0.005 * kPi * kPi * 1.25);
  EXPECT_NEAR(s.cluster(2).eigenvalue, kPi * kPi * 2.0, 0.005 * kPi * kPi * 2.0);
}

TEST(Spectrum, DiskMatchesDenseEigensolver) {
  const auto g = Grid::build(Disk{0, 0, 1}, 8);
  const Operator a = support::operator_for(g, "1/sqrt((x-0.5)^2+y^2)");
  const Spectrum s = eig_smallest(a, 5, 1e-10);
  const std::size_t n = g->size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Field e(g);
    e[j] = 1.0;
    const Field c = a.apply(e);
    for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(s.eigenvalues[i], es.eigenvalues()[i], 1e-8 * es.eigenvalues()[i]);
}

TEST(Spectrum, BasisIsNormalisedAndOrthogonal) {
  const auto g = support::square_grid(16);
  const Operator a = support::operator_for(g, "-pi^2/4");
  const Spectrum s = eig_smallest(a, 6, 1e-10);
  std::vector<const Field*> all;
  for (const auto& c : s.clusters)
    for (const auto& e : c.basis) all.push_back(&e);
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_NEAR(l2_inner(*all[i], *all[i]), 1.0, 1e-10);
    for (std::size_t j = 0; j < i; ++j) EXPECT_NEAR(h_inner(a, *all[i], *all[j]), 0.0, 1e-7);
  }
  for (const auto& c : s.clusters)
    for (double r : c.residuals) EXPECT_LE(r, 1e-8 * std::max(1.0, std::fabs(c.eigenvalue)));
}

TEST(Spectrum, PrincipalEigenfunctionIsOneSigned) {
  const auto g = Grid::build(Rectangle{0, 2, 0, 1}, 16);
  const Spectrum s = eig_smallest(support::operator_for(g, "5*(1+(x-1)/abs(x-1))"), 4, 1e-8);
  EXPECT_TRUE(s.unique_principal);
  EXPECT_TRUE(s.cluster(1).principal);
  EXPECT_TRUE(is_one_signed(s.cluster(1).basis[0]));
  const PrincipalReport r = is_unique_principal(s);
  EXPECT_TRUE(r.unique_principal);
  EXPECT_EQ(r.clusters[0].sign_change_edges, 0);
  EXPECT_GT(r.clusters[1].sign_change_edges, 0);
  EXPECT_NEAR(r.clusters[0].normalized_max, 1.0, 1e-15);
}

TEST(Spectrum, ProjectionIsIdempotent) {
  const auto g = support::square_grid(16);
  const Operator a = support::operator_for(g, "0");
  const Spectrum s = eig_smallest(a, 4, 1e-10);
  const Field u = support::random_field(g, 8);
  for (int i = 1; i <= 2; ++i) {
    const Field p = project_eigenspace(s, i, u);
    const Field pp = project_eigenspace(s, i, p);
    EXPECT_LT(std::sqrt(h_norm_sq(a, pp - p)), 1e-12 * std::sqrt(h_norm_sq(a, p)));
  }
}

TEST(Spectrum, Errors) {
  const auto g = support::square_grid(8);
  const Operator bad = support::operator_for(g, "-100");
  EXPECT_THROW(eig_smallest(bad, 2, 1e-8), NotPositiveDefinite);
  EigOptions o;
  o.k = 2;
  o.allow_indefinite = true;
  EXPECT_LT(eig_smallest(bad, o).eigenvalues[0], 0.0);
  const Spectrum s = eig_smallest(support::operator_for(g, "0"), 1, 1e-8);
  EXPECT_THROW(s.cluster(5), ClusterMissing);
  EXPECT_THROW(s.cluster(0), ClusterMissing);
}

TEST(Spectrum, SmallestEigenvalueOfIndefiniteOperator) {
  const auto g = support::square_grid(16);
  const double base = smallest_eigenvalue(support::operator_for(g, "0"));
  EXPECT_NEAR(smallest_eigenvalue(support::operator_for(g, "-30")), base - 30.0, 1e-7);
}
