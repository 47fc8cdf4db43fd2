#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <thread>

#include "nehari/errors.hpp"
#include "nehari/expr.hpp"

namespace ex = nehari::expr;

namespace {

double eval(const char* text, double x = 0.0, double y = 0.0) { return ex::parse(text)(x, y); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Expr, SeedOfTheSquareGroundState) {
  EXPECT_EQ(eval("(x-1)*(y-1)*(x+1)*(y+1)", 0.0, 0.0), 1.0);
}

TEST(Expr, Identity) { EXPECT_EQ(eval("x", 0.5, 0.0), 0.5); }

TEST(Expr, NodalSeedByHand) {
  // sin(1.5 pi) sin(2.5 pi) = (-1)(1)
  EXPECT_NEAR(eval("sin(pi*(x+1))*sin(2*pi*(y+1))", 0.5, 0.25), -1.0, 1e-15);
}

TEST(Expr, Literal) {
  EXPECT_EQ(eval("3.5", 7.0, -2.0), 3.5);
  EXPECT_EQ(eval("3.5", -1.0, 0.25), 3.5);
}

TEST(Expr, UnitDistance) { EXPECT_EQ(eval("1/sqrt(x^2+y^2)", 1.0, 0.0), 1.0); }

TEST(Expr, RadialSeedAtOrigin) { EXPECT_EQ(eval("cos(pi*(x^2+y^2)^0.5/2)", 0.0, 0.0), 1.0); }

TEST(Expr, Precedence) {
  EXPECT_EQ(eval("2+3*4"), 14.0);
  EXPECT_EQ(eval("2^3^2"), 512.0);
  EXPECT_EQ(eval("-2^2"), -4.0);
  EXPECT_EQ(eval("2*-3"), -6.0);
  EXPECT_EQ(eval("8/4/2"), 1.0);
  EXPECT_EQ(eval("10-4-3"), 3.0);
  EXPECT_EQ(eval("2^-1"), 0.5);
}

TEST(Expr, Functions) {
  EXPECT_DOUBLE_EQ(eval("log(exp(2))"), 2.0);
  EXPECT_EQ(eval("abs(-3)"), 3.0);
  EXPECT_DOUBLE_EQ(eval("pi"), std::numbers::pi);
  EXPECT_DOUBLE_EQ(eval("1e-3*1E3"), 1.0);
}

TEST(Expr, SyntaxErrorsCarryOffsets) {
  try {
    ex::parse("1 + * 2");
    FAIL();
  } catch (const nehari::ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(ex::parse(""), nehari::ParseError);
  EXPECT_THROW(ex::parse("(x+1"), nehari::ParseError);
  EXPECT_THROW(ex::parse("2x"), nehari::ParseError);
  EXPECT_THROW(ex::parse("sin x"), nehari::ParseError);
  EXPECT_THROW(ex::parse("x # y"), nehari::ParseError);
}

TEST(Expr, UnknownIdentifier) {
  try {
    ex::parse("x + z");
    FAIL();
  } catch (const nehari::UnknownIdentifier& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(ex::parse("tan(x)"), nehari::UnknownIdentifier);
}

TEST(Expr, DomainErrorsInsteadOfNaN) {
  EXPECT_THROW(eval("sqrt(x)", -1.0), nehari::DomainError);
  EXPECT_THROW(eval("log(x)", -1.0), nehari::DomainError);
  EXPECT_THROW(eval("log(x)", 0.0), nehari::DomainError);
  EXPECT_THROW(eval("(-8)^(1/3)"), nehari::DomainError);
  EXPECT_THROW(eval("1/x", 0.0), nehari::DivisionByZero);
  EXPECT_THROW(eval("1/sqrt(x^2+y^2)"), nehari::DivisionByZero);
  EXPECT_THROW(eval("x^(-1)", 0.0), nehari::DivisionByZero);
}

TEST(Expr, PrintedTreeReparsesIdentically) {
  const char* sources[] = {"(x-1)*(y-1)*(x+1)*(y+1)",
                           "sin(pi*(x+1))*sin(2*pi*(y+1))",
                           "cos(pi*(x^2+y^2)^0.5/2)*cos(2*pi*(x^2+y^2)^0.5)*cos(pi*(x^2+y^2)^0.5)",
                           "-x^2^-y/3-abs(-y)+exp(-(x*y))",
                           "0.1+1e-7*x-2.5e3/(1+y^2)",
                           "17.5*(1+(x-1)/abs(x-1))"};
  for (const char* s : sources) {
    const ex::Expr e = ex::parse(s);
    const ex::Expr back = ex::parse(ex::to_string(e));
    EXPECT_TRUE(ex::structurally_equal(e.root(), back.root())) << s;
    EXPECT_EQ(ex::to_string(back), ex::to_string(e)) << s;
  }
}

TEST(Expr, PrintedTreeEvaluatesBitForBit) {
  const ex::Expr e = ex::parse(
      "cos(pi*(x^2+y^2)^0.5/2)*cos(2*pi*(x^2+y^2)^0.5)*cos(pi*(x^2+y^2)^0.5) + "
      "sin(pi*(x+1))*sin(2*pi*(y+1)) - exp(x/3)*abs(y)^1.5 + 0.1/3");
  const ex::Expr back = ex::parse(ex::to_string(e));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(rng), y = d(rng);
    ASSERT_TRUE(same_bits(e(x, y), back(x, y))) << x << "," << y;
  }
}

TEST(Expr, ConcurrentEvaluationIsReentrant) {
  const ex::Expr e = ex::parse("sin(pi*(x+1))*sin(2*pi*(y+1)) + sqrt(x^2+y^2)");
  std::vector<double> serial(400), parallel(400);
  for (int i = 0; i < 400; ++i) serial[i] = e(i * 0.01, -i * 0.003);
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t)
    ts.emplace_back([&, t] {
      for (int i = t; i < 400; i += 4) parallel[i] = e(i * 0.01, -i * 0.003);
    });
  for (auto& t : ts) t.join();
  for (int i = 0; i < 400; ++i) EXPECT_TRUE(same_bits(serial[i], parallel[i]));
}
