#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nehari/errors.hpp"
#include "nehari/limit_flow.hpp"
#include "test_support.hpp"

using namespace nehari;

namespace {

constexpr double kPi = std::numbers::pi;

struct SquareCase {
  GridPtr grid;
  Operator op;
  Spectrum spectrum;
};

const SquareCase& square() {
  static const SquareCase c = [] {
    auto g = support::square_grid(24);
    Operator a = support::operator_for(g, "0");
    Spectrum s = eig_smallest(a, 4, 1e-10);
    return SquareCase{g, std::move(a), std::move(s)};
  }();
  return c;
}

Field l2_normalised(Field f) {
  f *= 1.0 / std::sqrt(l2_inner(f, f));
  return f;
}

double entropy_of(const Field& u) { return limit_constraint(u); }

}  // namespace

TEST(LimitScale, ConstraintHoldsForRandomDirections) {
  const auto& c = square();
  std::mt19937_64 rng(42);
  std::normal_distribution<double> d;
  for (int i = 0; i < 100; ++i) {
    Field v(c.grid);
    const int cl = 1 + i % 3;
    for (const Field& e : c.spectrum.cluster(cl).basis) v.axpy(d(rng), e);
    v *= std::exp(2.0 * d(rng));
    const Field u = limit_scale(v);
    EXPECT_LT(std::fabs(entropy_of(u)), 1e-8) << i;
    EXPECT_GT(u[c.grid->size() / 2] / v[c.grid->size() / 2], 0.0);
  }
}

TEST(LimitMinimize, SimpleClusterClosedForm) {
  const auto& c = square();
  const LimitMinimizer m = limit_minimize(c.spectrum, 1);
  const Field& e = c.spectrum.cluster(1).basis[0];
  const Field v = l2_normalised(e);
  // log t^2 = -int v^2 log v^2
  const double t = std::exp(-0.5 * entropy_of(v));
  EXPECT_NEAR(m.scale, t, 1e-12 * t);
  EXPECT_NEAR(m.energy, 0.5 * c.spectrum.cluster(1).eigenvalue * t * t, 1e-10 * m.energy);
  EXPECT_LT(m.constraint_residual, 1e-8);
  const Field neg = -1.0 * m.u;
  EXPECT_NEAR(limit_energy(m.eigenvalue, neg), m.energy, 1e-12 * m.energy);
  ASSERT_EQ(m.equivalent.size(), 1u);
}

TEST(LimitMinimize, DoubleClusterBeatsAxisDirections) {
  const auto& c = square();
  const LimitMinimizer m = limit_minimize(c.spectrum, 2);
  ASSERT_EQ(c.spectrum.cluster(2).multiplicity, 2);
  EXPECT_LT(m.constraint_residual, 1e-8);
  const double lam = c.spectrum.cluster(2).eigenvalue;
  // The lattice eigenfunctions sin(pi (x+1)/2) sin(pi (y+1)) and its transpose.
  for (const char* text : {"sin(pi*(x+1)/2)*sin(pi*(y+1))", "sin(pi*(x+1))*sin(pi*(y+1)/2)"}) {
    const Field axis = sample(expr::parse(text), c.grid).field;
    EXPECT_LE(m.energy, limit_energy(lam, limit_scale(axis)) + 1e-12) << text;
  }
  // And every other direction sampled at random.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0, 2 * kPi);
  const auto& b = c.spectrum.cluster(2).basis;
  for (int i = 0; i < 50; ++i) {
    const double th = d(rng);
    const Field v = std::cos(th) * b[0] + std::sin(th) * b[1];
    EXPECT_LE(m.energy, limit_energy(lam, limit_scale(v)) * (1 + 1e-12));
  }
}

TEST(LimitMinimize, SphereSearchFindsTheMinimum) {
  // An artificial three-dimensional "eigenspace" of smooth fields.
  const auto& c = square();
  Spectrum s;
  s.grid = c.grid;
  Cluster cl;
  cl.eigenvalue = 3.0;
  cl.multiplicity = 3;
  for (const char* text : {"sin(pi*(x+1)/2)*sin(pi*(y+1)/2)", "sin(pi*(x+1))*sin(pi*(y+1)/2)",
                           "sin(pi*(x+1)/2)*sin(pi*(y+1))"})
    cl.basis.push_back(l2_normalised(sample(expr::parse(text), c.grid).field));
  s.clusters.push_back(cl);
  const LimitMinimizer m = limit_minimize(s, 1);
  EXPECT_LT(m.constraint_residual, 1e-8);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d;
  for (int i = 0; i < 100; ++i) {
    const Field v = d(rng) * cl.basis[0] + d(rng) * cl.basis[1] + d(rng) * cl.basis[2];
    EXPECT_LE(m.energy, limit_energy(3.0, limit_scale(v)) * (1 + 1e-9));
  }
  double norm = 0.0;
  for (double x : m.coefficients) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
}

TEST(LimitMinimize, Errors) {
  const auto& c = square();
  EXPECT_THROW(limit_minimize(c.spectrum, 9), ClusterMissing);
  Spectrum s;
  s.grid = c.grid;
  Cluster cl;
  cl.eigenvalue = 1.0;
  cl.multiplicity = 4;
  for (int i = 0; i < 4; ++i) cl.basis.push_back(support::random_field(c.grid, i));
  s.clusters.push_back(cl);
  EXPECT_THROW(limit_minimize(s, 1), Unsupported);
}

TEST(Predictor, SolvesTheCorrectionEquation) {
  const auto& c = square();
  for (int i : {1, 2}) {
    const LimitMinimizer m = limit_minimize(c.spectrum, i);
    PredictorInfo info;
    const Field w = predictor_w(c.op, c.spectrum, i, m.u, &info);
    EXPECT_LT(info.residual, 1e-8) << i;
    // u* is critical for the limit problem, so the E_i part of the right side is small.
    EXPECT_LT(info.rhs_projection, 1e-4) << i;
    const Field pw = project_eigenspace(c.spectrum, i, w);
    EXPECT_LT(std::sqrt(h_norm_sq(c.op, pw)), 1e-10) << i;
    // (A - lambda_i) w = lambda_i u* log|u*| checked independently.
    const double li = c.spectrum.cluster(i).eigenvalue;
    Field lhs = c.op.apply(w);
    lhs.axpy(-li, w);
    Field rhs(c.grid);
    for (std::size_t k = 0; k < rhs.size(); ++k)
      rhs[k] = m.u[k] != 0.0 ? li * m.u[k] * std::log(std::fabs(m.u[k])) : 0.0;
    rhs -= project_eigenspace(c.spectrum, i, rhs);
    const Field r = lhs - rhs;
    EXPECT_LT(std::sqrt(l2_inner(r, r)), 1e-6 * std::sqrt(l2_inner(rhs, rhs))) << i;
  }
}

TEST(Predictor, OddInTheLimitPoint) {
  const auto& c = square();
  const LimitMinimizer m = limit_minimize(c.spectrum, 1);
  const Field w1 = predictor_w(c.op, c.spectrum, 1, m.u);
  const Field w2 = predictor_w(c.op, c.spectrum, 1, -1.0 * m.u);
  EXPECT_LT(std::sqrt(h_norm_sq(c.op, w1 + w2)), 1e-8 * std::sqrt(h_norm_sq(c.op, w1)));
}

TEST(Predictor, SeedingSavesIterations) {
  const auto& c = square();
  ContinuationOptions o;
  o.p_list = {2.05};
  o.solver.morse_check = false;
  const ContinuationResult with = continuation(c.op, c.spectrum, o);
  o.use_predictor = false;
  const ContinuationResult without = continuation(c.op, c.spectrum, o);
  RecordProperty("iterations_with_predictor", with.steps[0].result.iterations);
  RecordProperty("iterations_without_predictor", without.steps[0].result.iterations);
  EXPECT_NEAR(with.steps[0].result.energy, without.steps[0].result.energy,
              1e-6 * without.steps[0].result.energy);
}

class Continuation : public ::testing::TestWithParam<BranchMode> {};

TEST_P(Continuation, RescaledFieldsApproachTheLimit) {
  const auto& c = square();
  ContinuationOptions o;
  o.mode = GetParam();
  o.solver.morse_check = false;
  const ContinuationResult r = continuation(c.op, c.spectrum, o);
  ASSERT_EQ(r.steps.size(), 6u);
  for (const auto& s : r.steps) {
    ASSERT_FALSE(s.skipped);
    const Field proj = project_eigenspace(c.spectrum, r.cluster, s.rescaled);
    EXPECT_GT(std::sqrt(h_norm_sq(c.op, proj)), 0.0);
  }
  for (std::size_t k = 3; k < 6; ++k)
    EXPECT_LT(r.steps[k].eigenspace_distance, r.steps[k - 1].eigenspace_distance);
  EXPECT_LT(r.steps.back().relative_limit_distance, 0.05);
  const double star = std::sqrt(h_norm_sq(c.op, r.limit.u));
  for (std::size_t k = 3; k < 6; ++k) {
    EXPECT_LT(std::fabs(r.steps[k].rescaled_h_norm / star - 1.0), 0.05);
    EXPECT_LT(std::fabs(r.steps[k].rescaled_h_norm / star - 1.0),
              std::fabs(r.steps[k - 1].rescaled_h_norm / star - 1.0));
  }
}

TEST_P(Continuation, NormTrendsOffTheEigenvalue) {
  const auto& c = square();
  ContinuationOptions o;
  o.mode = GetParam();
  o.solver.morse_check = false;
  o.lambda_factor = 2.0;
  const ContinuationResult up = continuation(c.op, c.spectrum, o);
  o.lambda_factor = 0.5;
  const ContinuationResult down = continuation(c.op, c.spectrum, o);
  for (std::size_t k = 3; k < 6; ++k) {
    EXPECT_LT(up.steps[k].h_norm, up.steps[k - 1].h_norm);
    EXPECT_GT(down.steps[k].h_norm, down.steps[k - 1].h_norm);
  }
  EXPECT_LT(up.steps.back().h_norm, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Branches, Continuation,
                         ::testing::Values(BranchMode::GroundState, BranchMode::Nodal),
                         [](const auto& info) {
                           return info.param == BranchMode::GroundState ? std::string("gs")
                                                                        : std::string("lens");
                         });

TEST(ContinuationOptions, Validation) {
  const auto& c = square();
  ContinuationOptions o;
  o.p_list = {2.5, 3.0};
  EXPECT_THROW(continuation(c.op, c.spectrum, o), DomainError);
  o.p_list = {2.0};
  EXPECT_THROW(continuation(c.op, c.spectrum, o), DomainError);
}
