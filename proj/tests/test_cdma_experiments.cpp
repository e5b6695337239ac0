#include <gtest/gtest.h>

#include <cstdlib>

#include "gabpfix/experiments.hpp"
#include "support/oracles.hpp"

using namespace gabpfix;

namespace {

Eigen::MatrixXd dense_rect(const RectMatrix& A) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(Eigen::Index(A.rows()), Eigen::Index(A.cols()));
  for (const auto& e : A.entries()) M(Eigen::Index(e.row), Eigen::Index(e.col)) = e.value;
  return M;
}

CdmaConfig config(std::size_t n, std::size_t k, std::uint64_t seed, double sigma2 = 1.0) {
  CdmaConfig c;
  c.n = n;
  c.k = k;
  c.seed = seed;
  c.sigma2 = sigma2;
  return c;
}

}  // namespace

TEST(Cdma, ShapesAndAlphabet) {
  auto p = gen_cdma(config(32, 8, 3));
  EXPECT_EQ(p.S.rows(), 32u);
  EXPECT_EQ(p.S.cols(), 8u);
  EXPECT_EQ(p.S.entries().size(), 32u * 8u);
  for (const auto& e : p.S.entries()) EXPECT_EQ(std::abs(e.value), 1.0);
  EXPECT_EQ(p.A.size(), 8u);
  EXPECT_EQ(p.y.size(), 8u);
  for (double b : p.symbols) EXPECT_EQ(std::abs(b), 1.0);
}

TEST(Cdma, MatrixIsCorrelationPlusNoise) {
  for (auto spreading : {Spreading::Binary, Spreading::NormalizedBinary}) {
    auto c = config(40, 10, 5, 0.7);
    c.spreading = spreading;
    auto p = gen_cdma(c);
    Eigen::MatrixXd S = dense_rect(p.S);
    Eigen::MatrixXd want = S.transpose() * S + 0.7 * Eigen::MatrixXd::Identity(10, 10);
    EXPECT_LT((oracle::dense(p.A) - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Cdma, SingleUserNormalizedSpreading) {
  auto c = config(64, 1, 0, 0.5);
  c.spreading = Spreading::NormalizedBinary;
  auto p = gen_cdma(c);
  EXPECT_NEAR(p.A(0, 0), 1.5, 1e-12);
  c.spreading = Spreading::Binary;
  EXPECT_EQ(gen_cdma(c).A(0, 0), 64.5);
}

TEST(Cdma, MatchedFilterOutputIsConsistent) {
  // y - A b = S^T noise - sigma2 b; with tiny noise y ~ S^T S b.
  auto p = gen_cdma(config(64, 16, 9, 1e-12));
  Eigen::VectorXd b = oracle::vec(p.symbols);
  Eigen::MatrixXd S = dense_rect(p.S);
  Eigen::VectorXd want = S.transpose() * S * b;
  EXPECT_LT((oracle::vec(p.y) - want).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Cdma, SeedDeterminism) {
  auto a = gen_cdma(config(64, 16, 11));
  auto b = gen_cdma(config(64, 16, 11));
  auto c = gen_cdma(config(64, 16, 12));
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.symbols, b.symbols);
  EXPECT_NE(a.y, c.y);
}

TEST(Cdma, ConfigValidation) {
  EXPECT_THROW(gen_cdma(config(4, 8, 0)), InvalidArgument);
  EXPECT_THROW(gen_cdma(config(4, 0, 0)), InvalidArgument);
  EXPECT_THROW(gen_cdma(config(4, 2, 0, 0.0)), InvalidArgument);
  EXPECT_EQ(parse_spreading("binary-normalized"), Spreading::NormalizedBinary);
  EXPECT_THROW(parse_spreading("gold"), InvalidArgument);
}

TEST(Cdma, DefaultSizeIsUsuallyNotWalkSummable) {
  int hard = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto p = gen_cdma(config(256, 64, seed));
    const auto ws = is_walk_summable(p.A);
    EXPECT_NEAR(ws.rho, oracle::rho_abs_r(p.A), 1e-7);
    hard += !ws.walk_summable;
  }
  EXPECT_GE(hard, 15);
}

TEST(Divergence, WalkSummableConfigConverges) {
  auto run = experiment_divergence(config(64, 2, 1, 50.0), {});
  EXPECT_TRUE(run.walk.walk_summable);
  EXPECT_EQ(run.result.status, GabpStatus::Converged);
  ASSERT_EQ(run.mean_trace.size(), run.result.iterations);
  EXPECT_EQ(run.mean_trace.back(), run.result.means);
}

TEST(Divergence, DefaultSizeDiverges) {
  GabpSettings s;
  s.max_iterations = 1000;
  auto run = experiment_divergence(config(256, 64, 7), s);
  EXPECT_FALSE(run.walk.walk_summable);
  EXPECT_EQ(run.result.status, GabpStatus::Diverged);
  ASSERT_EQ(run.mean_trace.size(), run.result.iterations);
  for (const auto& row : run.mean_trace) EXPECT_EQ(row.size(), 64u);
  auto again = experiment_divergence(config(256, 64, 7), s);
  EXPECT_EQ(again.result.residual_history, run.result.residual_history);
}

TEST(Fixed, DiagonalDominanceLoadingConverges) {
  auto run = experiment_fixed(config(256, 64, 0), {LoadingMode::DiagDominant, {}, {}, {}},
                              OuterSettings::with_outer_tol(1e-6));
  EXPECT_GT(run.rho_original, 1.0);
  EXPECT_EQ(run.report.status, OuterStatus::Converged);
  EXPECT_TRUE(run.verified);
  EXPECT_LT(run.max_error_vs_dense, kVerifyTol);
  EXPECT_LT(run.report.rho_loaded, 1.0);
}

TEST(Fixed, MoreLoadingMeansMoreOuterSteps) {
  const auto cfg = config(128, 32, 4);
  const auto s = OuterSettings::with_outer_tol(1e-6);
  auto light = experiment_fixed(cfg, {LoadingMode::Uniform, {}, {}, {}}, s);
  auto dd = experiment_fixed(cfg, {LoadingMode::DiagDominant, {}, {}, {}}, s);
  DenseVector heavy_gamma = dd.loading.diagonal;
  for (auto& g : heavy_gamma) g *= 10.0;
  auto heavy = experiment_fixed(cfg, {LoadingMode::Custom, {}, {}, heavy_gamma}, s);
  ASSERT_TRUE(light.verified);
  ASSERT_TRUE(dd.verified);
  ASSERT_TRUE(heavy.verified);
  EXPECT_LT(light.report.outer_iterations, dd.report.outer_iterations);
  EXPECT_LT(dd.report.outer_iterations, heavy.report.outer_iterations);
}

TEST(Fixed, SingleLoopReachesSameSolution) {
  auto s = OuterSettings::with_outer_tol(1e-6);
  const auto cfg = config(128, 32, 2);
  auto dbl = experiment_fixed(cfg, {LoadingMode::DiagDominant, {}, {}, {}}, s);
  auto single = experiment_fixed(cfg, {LoadingMode::DiagDominant, {}, {}, {}}, s, true);
  ASSERT_TRUE(single.verified);
  EXPECT_LT(oracle::max_abs_diff(single.report.solution, dbl.report.solution), 1e-5);
}

TEST(Sweep, GridValidation) {
  const auto cfg = config(32, 8, 0);
  SweepConfig bad;
  bad.gamma_grid = {};
  EXPECT_THROW(experiment_sweep(cfg, bad), InvalidArgument);
  bad.gamma_grid = {0.5, 0.5};
  EXPECT_THROW(experiment_sweep(cfg, bad), InvalidArgument);
  bad.gamma_grid = {0.0, 1.0};
  EXPECT_THROW(experiment_sweep(cfg, bad), InvalidArgument);
}

TEST(Sweep, DefaultGrid) {
  auto g = SweepConfig::default_grid();
  ASSERT_EQ(g.size(), 12u);
  EXPECT_DOUBLE_EQ(g.front(), 0.2);
  EXPECT_DOUBLE_EQ(g.back(), 3.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) EXPECT_NEAR(g[i] * g[i], g[i - 1] * g[i + 1], 1e-12);
}

TEST(Sweep, RowsFollowGridAndTrends) {
  SweepConfig sc;
  sc.gamma_grid = {0.5, 1.0, 2.0, 4.0};
  auto res = experiment_sweep(config(128, 48, 1), sc);
  ASSERT_EQ(res.rows.size(), 4u);
  EXPECT_NEAR(res.dd_level, dd_uniform_level(gen_cdma(config(128, 48, 1)).A), 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& r = res.rows[i];
    EXPECT_EQ(r.gamma_normalized, sc.gamma_grid[i]);
    EXPECT_DOUBLE_EQ(r.gamma, sc.gamma_grid[i] * res.dd_level);
    EXPECT_NEAR(r.rho_loaded, res.rho_original / (1.0 + r.gamma), 1e-7);
    ASSERT_EQ(r.status, OuterStatus::Converged);
    EXPECT_DOUBLE_EQ(r.avg_inner_iterations, double(r.total_iterations) / double(r.outer_iterations));
    if (i) {
      EXPECT_GE(r.outer_iterations, res.rows[i - 1].outer_iterations);
      EXPECT_LE(r.avg_inner_iterations, res.rows[i - 1].avg_inner_iterations);
    }
  }
}

TEST(Sweep, ThreadCountDoesNotChangeRows) {
  SweepConfig sc;
  sc.gamma_grid = {0.3, 0.6, 1.2, 2.4, 4.8};
  const auto cfg = config(96, 32, 6);
  sc.threads = 0;
  auto seq = experiment_sweep(cfg, sc);
  sc.threads = 3;
  auto par = experiment_sweep(cfg, sc);
  ASSERT_EQ(seq.rows.size(), par.rows.size());
  for (std::size_t i = 0; i < seq.rows.size(); ++i) {
    EXPECT_EQ(seq.rows[i].gamma, par.rows[i].gamma);
    EXPECT_EQ(seq.rows[i].rho_loaded, par.rows[i].rho_loaded);
    EXPECT_EQ(seq.rows[i].outer_iterations, par.rows[i].outer_iterations);
    EXPECT_EQ(seq.rows[i].total_iterations, par.rows[i].total_iterations);
  }
}

TEST(Sweep, WarmStartOnlyChangesInnerCounts) {
  SweepConfig sc;
  sc.gamma_grid = {1.0, 2.0};
  const auto cfg = config(96, 32, 8);
  auto cold = experiment_sweep(cfg, sc);
  sc.warm_start = true;
  auto warm = experiment_sweep(cfg, sc);
  for (std::size_t i = 0; i < 2; ++i) {
    ASSERT_EQ(warm.rows[i].status, OuterStatus::Converged);
    EXPECT_LT(warm.rows[i].total_iterations, cold.rows[i].total_iterations);
    EXPECT_NEAR(double(warm.rows[i].outer_iterations), double(cold.rows[i].outer_iterations), 1.0);
  }
}

TEST(Threads, FromEnvironment) {
  ::setenv("GABPFIX_THREADS", "4", 1);
  EXPECT_EQ(threads_from_env(), 4u);
  ::setenv("GABPFIX_THREADS", "zero", 1);
  EXPECT_EQ(threads_from_env(), 0u);
  ::setenv("GABPFIX_THREADS", "-2", 1);
  EXPECT_EQ(threads_from_env(), 0u);
  ::unsetenv("GABPFIX_THREADS");
  EXPECT_EQ(threads_from_env(), 0u);
}
