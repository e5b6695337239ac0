#ifndef GABPFIX_EXPERIMENTS_HPP
#define GABPFIX_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>
#include <vector>

#include "gabpfix/cdma.hpp"
#include "gabpfix/dense.hpp"
#include "gabpfix/gabp.hpp"
#include "gabpfix/loading.hpp"
#include "gabpfix/outer_solver.hpp"
#include "gabpfix/walk_summability.hpp"

namespace gabpfix {

/// Plain GaBP on a CDMA draw with the per-sweep mean estimates.
struct DivergenceRun {
  GabpResult result;
  WalkSummability walk;
  std::vector<DenseVector> mean_trace;  // one row per sweep
};

inline DivergenceRun experiment_divergence(const CdmaConfig& cfg, const GabpSettings& settings) {
  const auto p = gen_cdma(cfg);
  DivergenceRun run;
  run.walk = is_walk_summable(p.A);
  run.result = run_gabp(p.A, p.y, settings, nullptr,
                        [&](std::size_t, const MessageState& st) {
                          try {
                            run.mean_trace.push_back(infer(p.A, p.y, st, settings.pivot_floor).means);
                          } catch (const NumericalBreakdown&) {
                            run.mean_trace.emplace_back(p.A.size(),
                                                        std::numeric_limits<double>::quiet_NaN());
                          }
                        });
  return run;
}

struct FixedRun {
  FixedSolveReport report;
  LoadingSpec loading;
  double rho_original = 0.0;
  double max_error_vs_dense = 0.0;
  bool verified = false;  // max error <= verify_tol
};

inline constexpr double kVerifyTol = 1e-4;

/// Double-loop solve of a CDMA draw, checked against a dense direct solve.
inline FixedRun experiment_fixed(const CdmaConfig& cfg, const LoadingRequest& loading,
                                 const OuterSettings& settings, bool single_loop = false) {
  const auto p = gen_cdma(cfg);
  FixedRun run;
  run.rho_original = is_walk_summable(p.A, settings.spectral).rho;
  run.loading = resolve_loading(p.A, loading, settings.spectral);
  run.report = single_loop ? single_loop_solve(p.A, p.y, run.loading, settings)
                           : double_loop_solve(p.A, p.y, run.loading, settings);
  const auto exact = dense_solve(p.A, p.y);
  double err = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i)
    err = std::max(err, std::abs(run.report.solution[i] - exact[i]));
  run.max_error_vs_dense = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  run.verified = run.report.status == OuterStatus::Converged && run.max_error_vs_dense <= kVerifyTol;
  return run;
}

struct SweepConfig {
  /// Uniform loading levels relative to the diagonal-dominance level.
  std::vector<double> gamma_grid = default_grid();
  double inner_tol = 1e-6;
  double outer_tol = 1e-3;
  std::size_t max_inner = 10000;
  std::size_t max_outer = 10000;
  /// Off: every outer step starts GaBP from zero messages, so the inner
  /// column measures a full solve of the loaded model at that level.
  bool warm_start = false;
  /// 0 or 1 runs grid points sequentially.
  std::size_t threads = 0;

  /// 12 log-spaced points in [0.2, 3.0].
  static std::vector<double> default_grid() {
    std::vector<double> g(12);
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = 0.2 * std::pow(3.0 / 0.2, double(i) / double(g.size() - 1));
    return g;
  }

  void validate() const {
    if (gamma_grid.empty()) throw InvalidArgument("sweep grid is empty");
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
      if (!(gamma_grid[i] > 0.0)) throw InvalidArgument("sweep grid values must be positive");
      if (i && !(gamma_grid[i] > gamma_grid[i - 1]))
        throw InvalidArgument("sweep grid must be strictly increasing");
    }
  }
};

struct SweepRow {
  double gamma_normalized = 0.0;  // 1.0 = diagonal-dominance level
  double gamma = 0.0;             // uniform level on the unit-diagonal model
  double rho_loaded = 0.0;
  OuterStatus status = OuterStatus::MaxOuter;
  std::size_t outer_iterations = 0;
  double avg_inner_iterations = 0.0;
  std::size_t total_iterations = 0;
};

struct SweepResult {
  double rho_original = 0.0;
  double dd_level = 0.0;  // uniform gamma matching 1.0 on the grid
  std::vector<SweepRow> rows;
};

/// Reads GABPFIX_THREADS; unset or unparsable means sequential.
inline std::size_t threads_from_env() {
  const char* v = std::getenv("GABPFIX_THREADS");
  if (!v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  return (end != v && n > 0) ? static_cast<std::size_t>(n) : 0;
}

/// Double-loop solves over a grid of uniform loadings. Grid points may run
/// concurrently; rows are always returned in grid order.
inline SweepResult experiment_sweep(const CdmaConfig& cfg, const SweepConfig& sweep) {
  sweep.validate();
  const auto p = gen_cdma(cfg);
  SweepResult res;
  res.rho_original = is_walk_summable(p.A).rho;
  res.dd_level = dd_uniform_level(p.A);
  res.rows.resize(sweep.gamma_grid.size());

  OuterSettings settings;
  settings.outer_tol = sweep.outer_tol;
  settings.max_outer = sweep.max_outer;
  settings.inner.message_tol = sweep.inner_tol;
  settings.inner.max_iterations = sweep.max_inner;
  settings.require_walk_summable = false;
  settings.warm_start = sweep.warm_start;

  auto run_point = [&](std::size_t i) {
    SweepRow& row = res.rows[i];
    row.gamma_normalized = sweep.gamma_grid[i];
    row.gamma = row.gamma_normalized * res.dd_level;
    FixedSolveReport rep;
    try {
      rep = double_loop_solve(p.A, p.y, uniform_loading(p.A, row.gamma), settings);
    } catch (const Error&) {
      row.status = OuterStatus::InnerFailure;
      return;
    }
    row.rho_loaded = rep.rho_loaded;
    row.status = rep.status;
    row.outer_iterations = rep.outer_iterations;
    row.total_iterations = rep.total_inner_iterations();
    row.avg_inner_iterations =
        rep.outer_iterations ? double(row.total_iterations) / double(rep.outer_iterations) : 0.0;
  };

  const std::size_t workers = std::min(sweep.threads, res.rows.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < res.rows.size(); ++i) run_point(i);
    return res;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < res.rows.size(); i = next++) run_point(i);
    });
  pool.clear();
  return res;
}

}  // namespace gabpfix

#endif  // GABPFIX_EXPERIMENTS_HPP
