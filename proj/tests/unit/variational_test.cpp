#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "nehari/errors.hpp"
#include "nehari/mountain_pass.hpp"
#include "nehari/symmetry.hpp"
#include "nehari/variational.hpp"
#include "test_support.hpp"

using namespace nehari;

namespace {

const ProblemParams kP4{4.0, 1.0};

Field seed(const GridPtr& g, const char* text) { return sample(expr::parse(text), g).field; }

}  // namespace

TEST(Energy, ZeroField) {
  const auto g = support::square_grid(8);
  const Operator a = support::operator_for(g, "0");
  EXPECT_EQ(energy(a, kP4, Field(g)), 0.0);
  const Field gr = grad_H(a, kP4, Field(g));
  for (double v : gr.values()) EXPECT_EQ(v, 0.0);
}

TEST(Energy, ScalingLaw) {
  const auto g = support::square_grid(12);
  const Operator a = support::operator_for(g, "1+x^2");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.1, 3.0);
  for (int i = 0; i < 20; ++i) {
    const Field u = support::random_field(g, 100 + i);
    const ProblemParams pr{2.5 + i * 0.2, 0.5 + i * 0.1};
    const double t = d(rng);
    const double expected = 0.5 * t * t * h_norm_sq(a, u) -
                            std::pow(t, pr.p) * pr.lambda / pr.p * lp_integral(u, pr.p);
    EXPECT_NEAR(energy(a, pr, t * u), expected, 1e-10 * std::fabs(expected));
  }
}

TEST(Gradient, CentralDifferences) {
  const auto g = support::square_grid(12);
  const Operator a = support::operator_for(g, "-pi^2/4");
  for (int i = 0; i < 10; ++i) {
    const Field u = support::smooth_field(g, 10 + i);
    const Field v = support::random_field(g, 50 + i);
    const ProblemParams pr{i % 2 ? 3.0 : 4.0, 1.0};
    const double eps = 1e-6;
    const double fd = (energy(a, pr, u + eps * v) - energy(a, pr, u - eps * v)) / (2 * eps);
    const double an = h_inner(a, grad_H(a, pr, u), v);
    EXPECT_LT(std::fabs(fd - an), 1e-5 * std::max(std::fabs(an), 1e-3)) << i;
  }
}

TEST(Gradient, RadialPartVanishesOnNehariSet) {
  const auto g = support::square_grid(12);
  const Operator a = support::operator_for(g, "0");
  const Field u = nehari_project(a, kP4, support::smooth_field(g, 4));
  const Field gr = grad_H(a, kP4, u);
  EXPECT_LT(std::fabs(h_inner(a, gr, u)), 1e-9 * h_norm_sq(a, u));
  const Field w = support::smooth_field(g, 5);
  EXPECT_NEAR(h_inner(a, grad_H(a, kP4, w), w), h_norm_sq(a, w) - lp_integral(w, 4.0),
              1e-9 * h_norm_sq(a, w));
}

TEST(Gradient, EvaluatorMatchesOneShot) {
  const auto g = support::square_grid(12);
  const Operator a = support::operator_for(g, "2");
  GradientEvaluator ev(a, kP4);
  for (int i = 0; i < 3; ++i) {
    const Field u = support::smooth_field(g, 20 + i);
    const Field g1 = ev(u), g2 = grad_H(a, kP4, u);
    EXPECT_LT(std::sqrt(h_norm_sq(a, g1 - g2)), 1e-8 * std::sqrt(h_norm_sq(a, u)));
  }
}

TEST(Nehari, ClosedFormScale) {
  // ||u||_H^2 = 4 and int u^4 = 1 give t* = 2.
  const auto g = support::square_grid(8);
  const Operator a = support::operator_for(g, "0");
  Field u = support::smooth_field(g, 1, true);
  // Rescale u and lambda so that the two quantities take the prescribed values.
  u *= 2.0 / std::sqrt(h_norm_sq(a, u));
  const ProblemParams pr{4.0, 1.0 / lp_integral(u, 4.0)};
  const Field w = nehari_project(a, pr, u);
  EXPECT_NEAR(w[0] / u[0], 2.0, 1e-12);
}

TEST(Nehari, IdentityAndEnergy) {
  const auto g = support::square_grid(12);
  const Operator a = support::operator_for(g, "-pi^2/4");
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    const ProblemParams pr{p, 1.3};
    const Field w = nehari_project(a, pr, support::smooth_field(g, 7));
    const double n2 = h_norm_sq(a, w);
    EXPECT_NEAR(n2, pr.lambda * lp_integral(w, p), 1e-10 * n2);
    EXPECT_NEAR(energy(a, pr, w), (0.5 - 1.0 / p) * n2, 1e-10 * n2);
    const Field again = nehari_project(a, pr, w);
    EXPECT_LT(std::sqrt(h_norm_sq(a, again - w)), 1e-12 * std::sqrt(n2));
  }
}

TEST(Nehari, DirectionInvariance) {
  const auto g = support::square_grid(12);
  const Operator a = support::operator_for(g, "1");
  const Field u = support::smooth_field(g, 9);
  const Field w = nehari_project(a, kP4, u);
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    const Field wc = nehari_project(a, kP4, c * u);
    EXPECT_LT(std::sqrt(h_norm_sq(a, wc - w)), 1e-12 * std::sqrt(h_norm_sq(a, w))) << c;
  }
}

TEST(Nehari, ZeroField) {
  const auto g = support::square_grid(8);
  EXPECT_THROW(nehari_project(support::operator_for(g, "0"), kP4, Field(g)), ZeroField);
}

TEST(NodalNehari, IndependentScalingPutsBothPartsOnTheNehariSet) {
  const auto g = support::square_grid(16);
  const Operator a = support::operator_for(g, "-pi^2/4");
  const Field w = nodal_nehari_project(a, kP4, seed(g, "sin(pi*(x+1))*sin(2*pi*(y+1))"),
                                       NodalScaling::Independent);
  const Field wp = w.positive_part(), wm = w.negative_part();
  EXPECT_NEAR(h_norm_sq(a, wp), lp_integral(wp, 4.0), 1e-10 * h_norm_sq(a, wp));
  EXPECT_NEAR(h_norm_sq(a, wm), lp_integral(wm, 4.0), 1e-10 * h_norm_sq(a, wm));
}

TEST(NodalNehari, CoupledScalingSatisfiesTheSplitIdentity) {
  const auto g = support::square_grid(16);
  const Operator a = support::operator_for(g, "-pi^2/4");
  const Field w = nodal_nehari_project(a, kP4, seed(g, "sin(pi*(x+1))*sin(2*pi*(y+1))"));
  const Field wp = w.positive_part(), wm = w.negative_part();
  EXPECT_NEAR(h_inner(a, w, wp), lp_integral(wp, 4.0), 1e-10 * lp_integral(wp, 4.0));
  EXPECT_NEAR(h_inner(a, w, wm), lp_integral(wm, 4.0), 1e-10 * lp_integral(wm, 4.0));
  const double n2 = h_norm_sq(a, w);
  EXPECT_NEAR(energy(a, kP4, w), 0.25 * n2, 1e-10 * n2);
}

TEST(NodalNehari, OddFieldHasEqualScalings) {
  const auto g = support::square_grid(16);
  const Operator a = support::operator_for(g, "0");
  const Field u = seed(g, "x*(1-x^2)*(1-y^2)*(2+y^2)");
  const SymmetryTransform t = make_transform(g, TransformKind::ReflectY);
  for (NodalScaling s : {NodalScaling::Independent, NodalScaling::Coupled}) {
    const Field w = nodal_nehari_project(a, kP4, u, s);
    EXPECT_LT(std::sqrt(h_norm_sq(a, apply(t, w) + w)), 1e-12 * std::sqrt(h_norm_sq(a, w)));
  }
}

TEST(NodalNehari, OneSignedInput) {
  const auto g = support::square_grid(8);
  const Operator a = support::operator_for(g, "0");
  EXPECT_THROW(nodal_nehari_project(a, kP4, support::smooth_field(g, 1, true)), PartVanished);
}

TEST(Morse, ZeroFieldHasIndexZero) {
  const auto g = support::square_grid(8);
  EXPECT_EQ(morse_index(support::operator_for(g, "0"), kP4, Field(g)).index, 0);
}

namespace {

int dense_negative_count(const Operator& a, const Field& u) {
  const std::size_t n = a.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Field e(a.grid_ptr());
    e[j] = 1.0;
    const Field c = a.apply(e);
    for (std::size_t k = 0; k < n; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = c[k];
    m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) -= 3.0 * u[j] * u[j];
  }
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  int negatives = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) negatives += ev[k] < 0.0;
  return negatives;
}

}  // namespace

TEST(Morse, MatchesDenseInertia) {
  // 121 nodes take the dense path, 961 the block iteration.
  for (int n : {6, 16}) {
    const auto g = support::square_grid(n);
    const Operator a = support::operator_for(g, "1");
    for (int i = 0; i < 4; ++i) {
      // Large amplitudes make several directions unstable.
      Field u = support::smooth_field(g, 70 + i);
      u *= 3.0 + 2.0 * i;
      const int negatives = dense_negative_count(a, u);
      const int k = std::min<int>(static_cast<int>(g->size()), negatives + 4);
      EXPECT_EQ(morse_index(a, kP4, u, k).index, negatives) << n << " " << i;
    }
  }
}

TEST(Morse, ConvergedSolutionsOnTheSquare) {
  const auto g = support::square_grid(24);
  const Operator a = support::operator_for(g, "-pi^2/4");
  SolveConfig c;
  c.seed = expr::parse("(x-1)*(y-1)*(x+1)*(y+1)");
  const SolveResult gs = ground_state(a, c);
  EXPECT_EQ(gs.morse_index, 1);
  c.seed = expr::parse("sin(pi*(x+1))*sin(2*pi*(y+1))");
  const SolveResult lens = least_energy_nodal(a, c);
  EXPECT_EQ(lens.morse_index, 2);
  EXPECT_GT(lens.morse.gap, 1e-3);
}

TEST(Params, Validation) {
  EXPECT_THROW((ProblemParams{2.0, 1.0}.validate()), DomainError);
  EXPECT_THROW((ProblemParams{4.0, 0.0}.validate()), DomainError);
  EXPECT_NO_THROW((ProblemParams{2.01, 1e-3}.validate()));
}
