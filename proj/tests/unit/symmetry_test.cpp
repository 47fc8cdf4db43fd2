#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "nehari/errors.hpp"
#include "nehari/spectrum.hpp"
#include "nehari/symmetry.hpp"
#include "nehari/variational.hpp"
#include "test_support.hpp"

using namespace nehari;

namespace {

std::vector<TransformKind> kinds(const std::vector<SymmetryTransform>& ts) {
  std::vector<TransformKind> out;
  for (const auto& t : ts) out.push_back(t.kind);
  return out;
}

Field sampled(const GridPtr& g, const char* text) { return sample(expr::parse(text), g).field; }

}  // namespace

TEST(Transform, NamesRoundTrip) {
  for (TransformKind k : kAllTransforms) EXPECT_EQ(transform_from_string(to_string(k)), k);
  EXPECT_EQ(to_string(TransformKind::ReflectX), "reflect-x");
  EXPECT_FALSE(transform_from_string("rotate-90").has_value());
}

TEST(Transform, PermutationsAreInvolutions) {
  const std::vector<GridPtr> grids = {support::square_grid(10),
                                      Grid::build(Rectangle{0, 2, 0, 1}, 8),
                                      Grid::build(Disk{0, 0, 1}, 9)};
  for (const auto& g : grids) {
    for (const auto& t : applicable_transforms(g, Field(g))) {
      ASSERT_EQ(t.image.size(), g->size());
      for (std::size_t k = 0; k < g->size(); ++k)
        EXPECT_EQ(t.image[static_cast<std::size_t>(t.image[k])], static_cast<std::int32_t>(k));
    }
  }
}

TEST(Transform, ImagesMatchCoordinates) {
  const auto g = Grid::build(Rectangle{0, 2, 0, 1}, 8);
  const auto rx = make_transform(g, TransformKind::ReflectX);
  const auto ry = make_transform(g, TransformKind::ReflectY);
  for (std::size_t k = 0; k < g->size(); ++k) {
    const auto a = static_cast<std::size_t>(rx.image[k]);
    EXPECT_NEAR(g->x(a), g->x(k), 1e-12);
    EXPECT_NEAR(g->y(a), 1.0 - g->y(k), 1e-12);
    const auto b = static_cast<std::size_t>(ry.image[k]);
    EXPECT_NEAR(g->x(b), 2.0 - g->x(k), 1e-12);
    EXPECT_NEAR(g->y(b), g->y(k), 1e-12);
  }
}

TEST(Applicable, SquareWithConstantPotentialHasFullGroup) {
  const auto g = support::square_grid(12);
  const auto ts = applicable_transforms(g, Field(g, -2.4674));
  EXPECT_EQ(ts.size(), 5u);
}

TEST(Applicable, StepRectangleKeepsOnlyHorizontalMedian) {
  const auto g = Grid::build(Rectangle{0, 2, 0, 1}, 16);
  for (const char* v : {"5*(1+(x-1)/abs(x-1))", "17.5*(1+(x-1)/abs(x-1))"}) {
    const auto ts = applicable_transforms(g, sampled(g, v));
    EXPECT_EQ(kinds(ts), std::vector<TransformKind>{TransformKind::ReflectX}) << v;
  }
}

TEST(Applicable, ShiftedSingularityKeepsOnlyHorizontalMedian) {
  const auto g = Grid::build(Disk{0, 0, 1}, 16);
  const auto ts = applicable_transforms(g, sampled(g, "1/sqrt((x-0.5)^2+y^2)"));
  EXPECT_EQ(kinds(ts), std::vector<TransformKind>{TransformKind::ReflectX});
  EXPECT_EQ(applicable_transforms(g, sampled(g, "1/sqrt(x^2+y^2)")).size(), 5u);
}

TEST(Applicable, DiagonalsNeedASquareBox) {
  const auto g = Grid::build(Rectangle{0, 2, 0, 1}, 8);
  EXPECT_THROW(make_transform(g, TransformKind::ReflectDiag), NonConforming);
  EXPECT_THROW(make_transform(g, TransformKind::ReflectAntiDiag), NonConforming);
  EXPECT_EQ(applicable_transforms(g, Field(g)).size(), 3u);
}

TEST(Classify, PrincipalEigenfunctionIsEvenEverywhere) {
  const auto g = support::square_grid(16);
  const Operator a = support::operator_for(g, "0");
  const Spectrum s = eig_smallest(a, 1, 1e-10);
  const Field& e1 = s.cluster(1).basis[0];
  const auto report = classify_all(a, e1, applicable_transforms(g, a.potential()));
  ASSERT_EQ(report.entries.size(), 5u);
  for (const auto& c : report.entries) {
    EXPECT_EQ(c.parity, Parity::Even) << to_string(c.kind);
    EXPECT_LT(c.even_score, 1e-6);
  }
}

TEST(Classify, OddByConstruction) {
  const auto g = support::square_grid(16);
  const Operator a = support::operator_for(g, "0");
  const auto t = make_transform(g, TransformKind::PointInversion);
  const Field u = support::random_field(g, 3);
  const Field odd = u - apply(t, u);
  const Classification c = classify(a, odd, t);
  EXPECT_EQ(c.parity, Parity::Odd);
  EXPECT_LT(c.odd_score, 1e-12);
  EXPECT_NEAR(c.even_score, 2.0, 1e-12);
}

TEST(Classify, ThresholdDecides) {
  const auto g = support::square_grid(16);
  const Operator a = support::operator_for(g, "0");
  const auto t = make_transform(g, TransformKind::ReflectY);
  const Field u = sampled(g, "(1-x^2)*(1-y^2)*(1+0.01*x)");
  const Classification loose = classify(a, u, t, 0.1);
  const Classification tight = classify(a, u, t, 1e-6);
  EXPECT_EQ(loose.parity, Parity::Even);
  EXPECT_EQ(tight.parity, Parity::Broken);
  EXPECT_EQ(loose.even_score, tight.even_score);
}

TEST(Classify, EnergyInvariance) {
  const auto g = Grid::build(Disk{0, 0, 1}, 16);
  const Operator a = support::operator_for(g, "1/sqrt((x-0.5)^2+y^2)");
  const ProblemParams params{4.0, 1.0};
  const Field u = support::random_field(g, 11);
  for (const auto& t : applicable_transforms(g, a.potential())) {
    const double e = energy(a, params, u);
    EXPECT_NEAR(energy(a, params, apply(t, u)), e, 1e-12 * std::fabs(e));
  }
}

TEST(Classify, ScoresInvariantUnderTheTransform) {
  const auto g = support::square_grid(12);
  const Operator a = support::operator_for(g, "0");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Field u = support::random_field(g, seed);
    for (const auto& t : applicable_transforms(g, a.potential())) {
      const Classification c0 = classify(a, u, t);
      const Classification c1 = classify(a, apply(t, u), t);
      EXPECT_EQ(c0.parity, c1.parity);
      EXPECT_NEAR(c0.even_score, c1.even_score, 1e-12);
      EXPECT_NEAR(c0.odd_score, c1.odd_score, 1e-12);
      EXPECT_GE(c0.even_score, 0.0);
      EXPECT_GE(c0.odd_score, 0.0);
      // Parallelogram law for the isometry u -> u o g.
      EXPECT_NEAR(c0.even_score * c0.even_score + c0.odd_score * c0.odd_score, 4.0, 1e-10);
      EXPECT_LE(std::min(c0.even_score, c0.odd_score), std::sqrt(2.0) + 1e-12);
    }
  }
}

TEST(Classify, ReportHelpers) {
  const auto g = support::square_grid(12);
  const Operator a = support::operator_for(g, "0");
  const Field u = sampled(g, "x*(1-x^2)*(1-y^2)");
  const auto r = classify_all(a, u, applicable_transforms(g, a.potential()));
  ASSERT_NE(r.find(TransformKind::ReflectY), nullptr);
  EXPECT_EQ(r.find(TransformKind::ReflectY)->parity, Parity::Odd);
  EXPECT_EQ(r.find(TransformKind::ReflectX)->parity, Parity::Even);
  EXPECT_EQ(r.find(TransformKind::ReflectDiag)->parity, Parity::Broken);
  const std::string s = r.summary();
  EXPECT_NE(s.find("odd reflect-y"), std::string::npos) << s;
  EXPECT_NE(s.find("even reflect-x"), std::string::npos) << s;
  EXPECT_NE(s.find("broken ("), std::string::npos) << s;
}
