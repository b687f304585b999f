#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smsn/error.hpp"
#include "smsn/mixing.hpp"

namespace smsn {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<MixingDistribution> moment_grid() {
  std::vector<MixingDistribution> grid{Degenerate{}};
  for (int nu = 4; nu <= 100; ++nu) grid.emplace_back(InvSqrtChiSq{double(nu)});
  for (int p = 1; p <= 20; ++p) grid.emplace_back(SqrtGamma{p});
  for (int q = 4; q <= 50; ++q) grid.emplace_back(InvPowUniform{double(q)});
  return grid;
}

TEST(Moment, Examples) {
  EXPECT_EQ(moment(Degenerate{}, 3), 1.0);
  EXPECT_NEAR(moment(InvSqrtChiSq{4.0}, 2), 2.0, 1e-14);
  EXPECT_NEAR(moment(InvSqrtChiSq{4.0}, 1), std::sqrt(kPi / 2.0), 1e-14);
  EXPECT_NEAR(moment(InvPowUniform{5.0}, 1), 1.25, 1e-15);
  EXPECT_NEAR(moment(InvPowUniform{5.0}, 3), 2.5, 1e-15);
  // E(W) for W ~ Gamma(1, scale 8).
  EXPECT_NEAR(moment(SqrtGamma{1}, 2), 8.0, 1e-13);
}

TEST(Moment, DoubleExponentialClosedFormsAgree) {
  for (int p = 1; p <= 20; ++p) {
    for (int k = 1; k <= 4; ++k) {
      const double lib = moment(SqrtGamma{p}, k);
      EXPECT_NEAR(lib / oracle::sde_moment_alt(p, k), 1.0, 1e-12)
          << "p=" << p << " k=" << k;
    }
  }
  EXPECT_NEAR(oracle::sde_moment_alt(1, 2), 8.0, 1e-12);
}

TEST(Moment, Undefined) {
  try {
    moment(InvSqrtChiSq{4.0}, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::moment_undefined);
  }
  EXPECT_THROW(moment(InvPowUniform{3.0}, 3), Error);
  EXPECT_TRUE(moment_exists(InvSqrtChiSq{3.5}, 3));
  EXPECT_FALSE(moment_exists(InvPowUniform{2.0}, 2));
  EXPECT_TRUE(moment_exists(SqrtGamma{2}, 40));
  EXPECT_THROW(moment(Degenerate{}, 0), Error);
}

TEST(Moment, LargeParametersStayFinite) {
  EXPECT_NEAR(moment(InvSqrtChiSq{1e6}, 3), 1.0, 1e-5);
  EXPECT_TRUE(std::isfinite(moment(SqrtGamma{400}, 4)));
}

TEST(Moment, LogConvexity) {
  for (const auto& m : moment_grid()) {
    for (int k = 1; k <= 3; ++k) {
      if (!moment_exists(m, k + 1)) continue;
      const double lower = k == 1 ? 1.0 : moment(m, k - 1);
      const double mk = moment(m, k);
      EXPECT_GE(moment(m, k + 1) * lower, mk * mk * (1.0 - 1e-13))
          << family_name(m) << " k=" << k;
    }
  }
}

TEST(Moment, MonteCarloOracle) {
  struct Case {
    MixingDistribution m;
    int k;
  };
  const std::vector<Case> cases{
      {InvSqrtChiSq{4.0}, 1},  {InvSqrtChiSq{4.0}, 2},
      {InvSqrtChiSq{20.0}, 1}, {InvSqrtChiSq{20.0}, 2},
      {InvSqrtChiSq{20.0}, 3}, {SqrtGamma{1}, 1},
      {SqrtGamma{1}, 2},       {SqrtGamma{1}, 3},
      {SqrtGamma{4}, 2},       {InvPowUniform{5.0}, 1},
      {InvPowUniform{5.0}, 2}, {InvPowUniform{10.0}, 3},
  };
  RngStream rng(2024);
  for (const auto& c : cases) {
    const Vector s = sample_mixing(c.m, 1'000'000, rng);
    std::vector<double> powered(s.size());
    for (Index i = 0; i < s.size(); ++i) powered[i] = std::pow(s[i], c.k);
    const auto est = oracle::mean_and_error(powered);
    EXPECT_NEAR(est.mean, moment(c.m, c.k), 4.0 * est.std_error)
        << family_name(c.m) << " k=" << c.k;
  }
}

TEST(Coefficients, Degenerate) {
  const auto coef = coefficients(Degenerate{});
  EXPECT_NEAR(coef.a, 4.0 / kPi - 1.0, 1e-15);
  EXPECT_EQ(coef.b, 0.0);
  EXPECT_NEAR(coef.c, 2.0 / kPi, 1e-15);
}

TEST(Coefficients, SignBoundaries) {
  EXPECT_LT(coefficients(InvSqrtChiSq{8.0}).a, 0.0);
  EXPECT_GE(coefficients(InvSqrtChiSq{9.0}).a, 0.0);
  EXPECT_LT(coefficients(SqrtGamma{4}).a, 0.0);
  EXPECT_GE(coefficients(SqrtGamma{5}).a, 0.0);
}

TEST(Coefficients, GridInvariants) {
  for (const auto& m : moment_grid()) {
    const auto coef = coefficients(m);
    EXPECT_LE(coef.b, 0.0) << family_name(m);
    EXPECT_GT(coef.c, 0.0);
    EXPECT_LE(coef.c, 4.0 / kPi + 1e-15);
  }
}

TEST(Coefficients, SignOfAMatchesFamilyThresholds) {
  for (int nu = 4; nu <= 100; ++nu) {
    EXPECT_EQ(coefficients(InvSqrtChiSq{double(nu)}).a < 0.0, nu <= 8) << nu;
  }
  for (int p = 1; p <= 20; ++p) {
    EXPECT_EQ(coefficients(SqrtGamma{p}).a < 0.0, p <= 4) << p;
  }
}

TEST(MomentCondition, Examples) {
  const auto deg = check_moment_condition(Degenerate{});
  EXPECT_TRUE(deg.holds);
  EXPECT_NEAR(deg.lhs, 4.0 / kPi, 1e-15);

  const auto st4 = check_moment_condition(InvSqrtChiSq{4.0});
  EXPECT_TRUE(st4.holds);
  EXPECT_NEAR(st4.lhs, 2.0, 1e-12);
  EXPECT_NEAR(st4.rhs, 2.0, 1e-12);
  EXPECT_GE(st4.lhs - st4.rhs, -1e-12);

  const auto ssl4 = check_moment_condition(InvPowUniform{4.0});
  EXPECT_TRUE(ssl4.holds);
  // (q - 1)^2 / (q (q - 2)) at q = 4.
  EXPECT_NEAR(ssl4.rhs / (ssl4.lhs * kPi / 4.0), 9.0 / 8.0, 1e-14);
}

TEST(MomentCondition, HoldsOnGrid) {
  for (const auto& m : moment_grid()) {
    EXPECT_TRUE(check_moment_condition(m).holds) << family_name(m);
  }
}

TEST(MomentCondition, FailsOutsideGrid) {
  EXPECT_FALSE(check_moment_condition(InvPowUniform{3.1}).holds);
  EXPECT_FALSE(check_moment_condition(InvSqrtChiSq{3.5}).holds);
  EXPECT_THROW(check_moment_condition(InvSqrtChiSq{2.0}), Error);
}

TEST(SampleMixing, Degenerate) {
  RngStream rng(1);
  EXPECT_TRUE(sample_mixing(Degenerate{}, 5, rng).isApprox(Vector::Ones(5)));
}

TEST(SampleMixing, PositiveDraws) {
  RngStream rng(2);
  for (const MixingDistribution& m :
       {MixingDistribution{InvSqrtChiSq{4.0}}, MixingDistribution{SqrtGamma{3}},
        MixingDistribution{InvPowUniform{4.0}}}) {
    EXPECT_GT(sample_mixing(m, 10000, rng).minCoeff(), 0.0);
  }
}

TEST(MixingValidation, RejectsBadParameters) {
  EXPECT_THROW(validate(InvSqrtChiSq{0.0}), Error);
  EXPECT_THROW(validate(InvSqrtChiSq{-3.0}), Error);
  EXPECT_THROW(validate(SqrtGamma{0}), Error);
  EXPECT_THROW(validate(InvPowUniform{0.0}), Error);
  EXPECT_THROW(validate(InvPowUniform{std::nan("")}), Error);
  EXPECT_EQ(family_name(SqrtGamma{2}), "sde");
}

}  // namespace
}  // namespace smsn
