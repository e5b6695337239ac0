#ifndef GABPFIX_OUTER_SOLVER_HPP
#define GABPFIX_OUTER_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "gabpfix/gabp.hpp"
#include "gabpfix/loading.hpp"
#include "gabpfix/walk_summability.hpp"

namespace gabpfix {

/// Settings for the loaded-preconditioner iterations.
struct OuterSettings {
  double outer_tol = 1e-6;  // on ||J x - h||_inf
  std::size_t max_outer = 10000;
  GabpSettings inner{.max_iterations = 10000, .message_tol = 1e-7};
  double step_size = 0.5;  // single-loop damping s
  /// Refuse to run when J + Gamma is not walk-summable.
  bool require_walk_summable = true;
  /// Start each inner GaBP from the previous outer step's messages.
  bool warm_start = true;
  SpectralRadiusOptions spectral{};

  /// Inner tolerance defaults to min(1e-6, outer_tol / 10).
  static OuterSettings with_outer_tol(double outer_tol) {
    OuterSettings s;
    s.outer_tol = outer_tol;
    s.inner.message_tol = std::min(1e-6, outer_tol / 10.0);
    return s;
  }
};

enum class OuterStatus { Converged, MaxOuter, InnerFailure };

inline std::string_view to_string(OuterStatus s) {
  switch (s) {
    case OuterStatus::Converged: return "Converged";
    case OuterStatus::MaxOuter: return "MaxOuter";
    case OuterStatus::InnerFailure: return "InnerFailure";
  }
  return "Unknown";
}

struct FixedSolveReport {
  DenseVector solution;
  OuterStatus status = OuterStatus::MaxOuter;
  std::size_t outer_iterations = 0;
  std::vector<std::size_t> inner_iterations_per_step;
  std::vector<double> outer_residual_history;
  DenseVector gamma_used;
  double rho_loaded = 0.0;
  GabpStatus last_inner_status = GabpStatus::Converged;

  std::size_t total_inner_iterations() const {
    std::size_t s = 0;
    for (auto v : inner_iterations_per_step) s += v;
    return s;
  }
};

/// Per-outer-step callback: (outer index from 1, inner iterations, residual).
using OuterObserver = std::function<void(std::size_t, std::size_t, double)>;

namespace detail {

inline void validate_outer(const SparseSymMatrix& J, std::span<const double> h,
                           const LoadingSpec& loading, const OuterSettings& s) {
  require_size(h, J.size());
  require_size(loading.diagonal, J.size());
  if (!(s.outer_tol > 0.0)) throw InvalidArgument("outer_tol must be positive");
  for (std::size_t i = 0; i < J.size(); ++i)
    if (!(loading.diagonal[i] >= 0.0)) throw InvalidArgument("loading must be non-negative");
}

inline double loaded_rho(const SparseSymMatrix& loaded, const OuterSettings& s) {
  const auto ws = is_walk_summable(loaded, s.spectral);
  if (s.require_walk_summable && !ws.walk_summable) throw NotWalkSummableAfterLoading(ws.rho);
  return ws.rho;
}

}  // namespace detail

/// x^{t+1} = (J+Gamma)^{-1} (h + Gamma x^t) from x^0 = 0, with each inner
/// system solved by GaBP on the loaded matrix.
inline FixedSolveReport double_loop_solve(const SparseSymMatrix& J, std::span<const double> h,
                                          const LoadingSpec& loading,
                                          const OuterSettings& settings,
                                          const OuterObserver& observer = {}) {
  detail::validate_outer(J, h, loading, settings);
  const auto& gamma = loading.diagonal;
  const SparseSymMatrix loaded = J.with_added_diagonal(gamma);

  FixedSolveReport rep;
  rep.gamma_used = gamma;
  rep.rho_loaded = detail::loaded_rho(loaded, settings);
  rep.solution.assign(J.size(), 0.0);

  MessageState messages = init_messages(loaded);
  DenseVector h_t(J.size());
  for (std::size_t t = 1; t <= settings.max_outer; ++t) {
    for (std::size_t i = 0; i < J.size(); ++i) h_t[i] = h[i] + gamma[i] * rep.solution[i];
    auto inner = run_gabp(loaded, h_t, settings.inner,
                          settings.warm_start ? &messages : nullptr);
    rep.outer_iterations = t;
    rep.inner_iterations_per_step.push_back(inner.iterations);
    rep.last_inner_status = inner.status;
    if (inner.status != GabpStatus::Converged) {
      rep.status = OuterStatus::InnerFailure;
      return rep;
    }
    rep.solution = std::move(inner.means);
    messages = std::move(inner.messages);
    const double res = J.residual_inf(rep.solution, h);
    rep.outer_residual_history.push_back(res);
    if (observer) observer(t, inner.iterations, res);
    if (res <= settings.outer_tol) {
      rep.status = OuterStatus::Converged;
      return rep;
    }
  }
  rep.status = OuterStatus::MaxOuter;
  return rep;
}

/// One GaBP sweep per outer step with the damped right-hand side
/// h^{t+1} = (1-s) h^t + s (h + Gamma x^t), starting from h^0 = h.
inline FixedSolveReport single_loop_solve(const SparseSymMatrix& J, std::span<const double> h,
                                          const LoadingSpec& loading,
                                          const OuterSettings& settings,
                                          const OuterObserver& observer = {}) {
  detail::validate_outer(J, h, loading, settings);
  if (!(settings.step_size > 0.0 && settings.step_size < 1.0))
    throw InvalidArgument("step size must lie in (0, 1)");
  const auto& gamma = loading.diagonal;
  const double s = settings.step_size;
  const SparseSymMatrix loaded = J.with_added_diagonal(gamma);

  FixedSolveReport rep;
  rep.gamma_used = gamma;
  rep.rho_loaded = detail::loaded_rho(loaded, settings);
  rep.solution.assign(J.size(), 0.0);

  MessageState cur = init_messages(loaded), next;
  DenseVector h_t(h.begin(), h.end());
  const auto& inner = settings.inner;
  for (std::size_t t = 1; t <= settings.max_outer; ++t) {
    rep.outer_iterations = t;
    rep.inner_iterations_per_step.push_back(1);
    SweepStats stats;
    Marginals m;
    try {
      stats = sweep_into(loaded, h_t, cur, next, inner.pivot_floor);
      std::swap(cur, next);
      m = infer(loaded, h_t, cur, inner.pivot_floor);
    } catch (const NumericalBreakdown&) {
      rep.status = OuterStatus::InnerFailure;
      rep.last_inner_status = GabpStatus::NumericalBreakdown;
      return rep;
    }
    if ((stats.indefinite && inner.stop_on_indefinite) ||
        !(stats.max_magnitude <= inner.divergence_bound)) {
      rep.status = OuterStatus::InnerFailure;
      rep.last_inner_status = GabpStatus::Diverged;
      return rep;
    }
    rep.solution = std::move(m.means);
    const double res = J.residual_inf(rep.solution, h);
    rep.outer_residual_history.push_back(res);
    if (observer) observer(t, 1, res);
    if (res <= settings.outer_tol) {
      rep.status = OuterStatus::Converged;
      return rep;
    }
    if (!std::isfinite(res)) {
      rep.status = OuterStatus::InnerFailure;
      rep.last_inner_status = GabpStatus::Diverged;
      return rep;
    }
    for (std::size_t i = 0; i < J.size(); ++i)
      h_t[i] = (1.0 - s) * h_t[i] + s * (h[i] + gamma[i] * rep.solution[i]);
  }
  rep.status = OuterStatus::MaxOuter;
  return rep;
}

}  // namespace gabpfix

#endif  // GABPFIX_OUTER_SOLVER_HPP
