#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smsn/error.hpp"
#include "smsn/simulation.hpp"

namespace smsn {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SimulationConfig small_config() {
  SimulationConfig cfg;
  cfg.p = {2};
  cfg.n = {50};
  cfg.nu = {10.0};
  cfg.rho = {0.4};
  cfg.replications = 10;
  cfg.seed = 77;
  return cfg;
}

TEST(MseDirection, Examples) {
  const Vector e1 = vec({1, 0});
  const Vector e2 = vec({0, 1});
  EXPECT_EQ(mse_direction(e1, e1), 0.0);
  EXPECT_EQ(mse_direction(-e1, e1), 0.0);
  EXPECT_NEAR(mse_direction(e1, e2), 2.0, 1e-15);
  EXPECT_THROW(mse_direction(vec({1, 1}), e1), Error);
}

TEST(MseDirection, WithinZeroTwo) {
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    Vector a(4), b(4);
    for (Index j = 0; j < 4; ++j) {
      a[j] = rng.normal();
      b[j] = rng.normal();
    }
    const double m = mse_direction(a.normalized(), b.normalized());
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 2.0);
  }
}

TEST(Config, Validation) {
  auto cfg = small_config();
  EXPECT_NO_THROW(validate(cfg));
  cfg.nu = {3.0};
  EXPECT_THROW(validate(cfg), Error);
  cfg = small_config();
  cfg.rho = {1.0};
  EXPECT_THROW(validate(cfg), Error);
  cfg = small_config();
  cfg.n = {3};
  EXPECT_THROW(validate(cfg), Error);
  cfg = small_config();
  cfg.replications = 0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(Config, Parse) {
  const auto cfg = parse_simulation_config(R"({"p": [10, 2], "n": [20],
      "nu": [4, 100], "rho": [-0.8], "replications": 7, "seed": 5,
      "alpha": {"rule": "explicit", "values": [1, 2]},
      "omega": {"rule": "random_int", "low": 1, "high": 5, "per": "cell"},
      "estimator": {"restarts": 2, "refine": false}})");
  EXPECT_EQ(cfg.replications, 7);
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.alpha.kind, AlphaRule::Kind::Explicit);
  EXPECT_FALSE(cfg.omega.per_replication);
  EXPECT_EQ(cfg.estimator.restarts, 2);
  EXPECT_FALSE(cfg.estimator.refine);
  EXPECT_THROW(parse_simulation_config(R"({"p": [2], "n": "x"})"), Error);
  EXPECT_THROW(parse_simulation_config(R"({"p": [2], "n": [20], "nu": [2],
                                          "rho": [0]})"),
               Error);
}

TEST(Grid, SortedAndDeduplicated) {
  SimulationConfig cfg;
  cfg.p = {10, 2, 2};
  cfg.n = {500, 20};
  cfg.nu = {100, 4};
  cfg.rho = {0.4, -0.8};
  const auto cells = expand_grid(cfg);
  ASSERT_EQ(cells.size(), 16u);
  EXPECT_EQ(cells.front().p, 2);
  EXPECT_EQ(cells.front().n, 20);
  EXPECT_EQ(cells.front().nu, 4.0);
  EXPECT_EQ(cells.front().rho, -0.8);
  for (std::size_t i = 0; i < cells.size(); ++i) EXPECT_EQ(cells[i].index, i);
}

TEST(AlphaRule, OnesScaled) {
  const AlphaRule rule;
  const Vector a = rule.build(4);
  EXPECT_NEAR(a.norm(), 3.0, 1e-15);
  EXPECT_NEAR(a[0], a[3], 0.0);
}

TEST(Experiment, EmptyGrid) {
  SimulationConfig cfg;
  const auto report = run_experiment(cfg, 2);
  EXPECT_TRUE(report.cells.empty());
  EXPECT_EQ(report_csv(report),
            "p,n,nu,rho,replications,mse_gamma1,mse_direction,"
            "mean_gamma1_hat,gamma1_theory\n");
}

TEST(Experiment, TwoCellSmoke) {
  auto cfg = small_config();
  cfg.n = {30, 60};
  cfg.keep_replications = true;
  const auto report = run_experiment(cfg, 1);
  ASSERT_EQ(report.cells.size(), 2u);
  for (const auto& cell : report.cells) {
    EXPECT_EQ(cell.replications_configured, 10);
    EXPECT_LE(cell.replications_used, 10);
    EXPECT_GT(cell.replications_used, 0);
    EXPECT_GE(cell.mse_gamma1, 0.0);
    EXPECT_GE(cell.mse_direction, 0.0);
    EXPECT_LE(cell.mse_direction, 2.0);
    EXPECT_EQ(cell.replications.size(), 10u);
  }
  EXPECT_EQ(report.cells[0].cell.n, 30);
  const std::string cells = report_csv(report);
  EXPECT_EQ(std::count(cells.begin(), cells.end(), '\n'), 3);
  const std::string reps = replications_csv(report);
  EXPECT_EQ(std::count(reps.begin(), reps.end(), '\n'), 21);
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
  auto cfg = small_config();
  cfg.n = {20, 40};
  cfg.nu = {5.0, 50.0};
  const auto one = report_csv(run_experiment(cfg, 1));
  EXPECT_EQ(one, report_csv(run_experiment(cfg, 1)));
  EXPECT_EQ(one, report_csv(run_experiment(cfg, 3)));
  EXPECT_EQ(one, report_csv(run_experiment(cfg, 8)));
}

TEST(Experiment, SingleReplicationIsReproducible) {
  auto cfg = small_config();
  cfg.replications = 1;
  EXPECT_EQ(report_csv(run_experiment(cfg)), report_csv(run_experiment(cfg)));
}

TEST(Experiment, LargerSamplesReduceError) {
  SimulationConfig cfg;
  cfg.p = {2};
  cfg.n = {20, 500};
  cfg.nu = {1e6};
  cfg.rho = {-0.8};
  cfg.replications = 100;
  cfg.seed = 2;
  const auto report = run_experiment(cfg, 1);
  ASSERT_EQ(report.cells.size(), 2u);
  EXPECT_LT(report.cells[1].mse_gamma1, report.cells[0].mse_gamma1);
}

TEST(Experiment, ProgressCallback) {
  auto cfg = small_config();
  std::size_t last = 0, total = 0;
  run_experiment(cfg, 2, [&](std::size_t done, std::size_t all) {
    EXPECT_GE(done, last);
    last = done;
    total = all;
  });
  EXPECT_EQ(last, total);
  EXPECT_EQ(total, 10u);
}

// The maximal skewness depends on (Omega, alpha) only through
// alpha' Omega_bar alpha, so rescaling omega leaves it unchanged; rho does
// enter through Omega_bar.
TEST(Theory, InvariantToOmegaScaling) {
  const Vector alpha = AlphaRule{}.build(3);
  SmsnParams params;
  params.location = Vector::Zero(3);
  params.shape = alpha;
  params.mixing = InvSqrtChiSq{8.0};
  params.scale = toeplitz_corr(-0.3, 3);
  const double base = analytic_max_skewness(params);
  RngStream rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    Vector w(3);
    for (Index j = 0; j < 3; ++j) w[j] = 1.0 + std::floor(5.0 * rng.uniform());
    params.scale = w.asDiagonal() * toeplitz_corr(-0.3, 3) * w.asDiagonal();
    EXPECT_NEAR(analytic_max_skewness(params), base, 1e-12 * base);
  }
}

TEST(Threads, DefaultCountHonoursEnvironment) {
  ::setenv("SMSN_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3u);
  ::setenv("SMSN_THREADS", "0", 1);
  EXPECT_GE(default_thread_count(), 1u);
  ::unsetenv("SMSN_THREADS");
  EXPECT_GE(default_thread_count(), 1u);
}

}  // namespace
}  // namespace smsn
