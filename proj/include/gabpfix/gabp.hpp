#ifndef GABPFIX_GABP_HPP
#define GABPFIX_GABP_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "gabpfix/sparse_sym_matrix.hpp"

namespace gabpfix {

/// Precision (alpha) and mean (beta) messages, one per directed edge.
///
/// Slot e belongs to the edge i->j where i is the row owning slot e in the
/// matrix adjacency and j = J.edge(e).col.
struct MessageState {
  DenseVector alpha;
  DenseVector beta;

  std::size_t size() const noexcept { return alpha.size(); }
  bool operator==(const MessageState&) const = default;
};

struct GabpSettings {
  std::size_t max_iterations = 1000;
  double message_tol = 1e-10;
  double divergence_bound = 1e12;
  double pivot_floor = 1e-12;
  /// Report Diverged as soon as a cavity precision alpha_{i\j} is negative.
  /// A negative cavity precision means the unwrapped computation tree is no
  /// longer positive definite, after which the alpha messages cannot settle.
  bool stop_on_indefinite = true;
};

enum class GabpStatus { Converged, MaxIterations, Diverged, NumericalBreakdown };

inline std::string_view to_string(GabpStatus s) {
  switch (s) {
    case GabpStatus::Converged: return "Converged";
    case GabpStatus::MaxIterations: return "MaxIterations";
    case GabpStatus::Diverged: return "Diverged";
    case GabpStatus::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "Unknown";
}

struct Marginals {
  DenseVector means;
  DenseVector variances;
};

struct GabpResult {
  DenseVector means;
  DenseVector variances;
  GabpStatus status = GabpStatus::MaxIterations;
  std::size_t iterations = 0;
  std::vector<double> residual_history;  // max message change per sweep
  MessageState messages;
};

inline MessageState init_messages(const SparseSymMatrix& J) {
  return {DenseVector(J.num_directed_edges(), 0.0),
          DenseVector(J.num_directed_edges(), 0.0)};
}

struct SweepStats {
  double max_change = 0.0;
  double max_magnitude = 0.0;
  bool indefinite = false;  // some cavity precision was negative
};

/// One synchronous sweep: every message in `next` is computed from `prev`.
///
/// Per node, the incoming sums are formed once in ascending neighbor order
/// and each cavity aggregate is that sum minus the message coming back from
/// the target, so a sweep costs O(edges).
inline SweepStats sweep_into(const SparseSymMatrix& J, std::span<const double> h,
                             const MessageState& prev, MessageState& next,
                             double pivot_floor = 1e-12) {
  const std::size_t edges = J.num_directed_edges();
  require_size(h, J.size());
  if (prev.alpha.size() != edges || prev.beta.size() != edges)
    throw DimensionMismatch(edges, prev.alpha.size());
  next.alpha.resize(edges);
  next.beta.resize(edges);

  SweepStats stats;
  for (std::size_t i = 0; i < J.size(); ++i) {
    const std::size_t first = J.edge_offset(i);
    const auto nbrs = J.neighbors(i);
    double a_sum = J.diagonal(i);
    double b_sum = h[i];
    for (std::size_t t = 0; t < nbrs.size(); ++t) {
      const std::size_t back = J.mirror(first + t);
      a_sum += prev.alpha[back];
      b_sum += prev.beta[back];
    }
    for (std::size_t t = 0; t < nbrs.size(); ++t) {
      const std::size_t e = first + t;
      const std::size_t back = J.mirror(e);
      const double a_cav = a_sum - prev.alpha[back];
      const double b_cav = b_sum - prev.beta[back];
      if (!(std::abs(a_cav) >= pivot_floor)) throw NumericalBreakdown(i, nbrs[t].col);
      if (a_cav < 0.0) stats.indefinite = true;
      const double w = nbrs[t].value;
      const double a_new = -w * w / a_cav;
      const double b_new = -w * b_cav / a_cav;
      stats.max_change = std::max({stats.max_change, std::abs(a_new - prev.alpha[e]),
                                   std::abs(b_new - prev.beta[e])});
      stats.max_magnitude = std::max({stats.max_magnitude, std::abs(a_new), std::abs(b_new)});
      if (!std::isfinite(a_new) || !std::isfinite(b_new))
        stats.max_magnitude = std::numeric_limits<double>::infinity();
      next.alpha[e] = a_new;
      next.beta[e] = b_new;
    }
  }
  return stats;
}

struct SweepStep {
  MessageState state;
  double max_change;
};

inline SweepStep sweep(const SparseSymMatrix& J, std::span<const double> h,
                         const MessageState& state, double pivot_floor = 1e-12) {
  SweepStep r;
  r.max_change = sweep_into(J, h, state, r.state, pivot_floor).max_change;
  return r;
}

/// K_i = (J_ii + sum_k alpha_ki)^{-1}, mu_i = K_i (h_i + sum_k beta_ki).
inline Marginals infer(const SparseSymMatrix& J, std::span<const double> h,
                       const MessageState& state, double pivot_floor = 1e-12) {
  require_size(h, J.size());
  if (state.alpha.size() != J.num_directed_edges())
    throw DimensionMismatch(J.num_directed_edges(), state.alpha.size());
  Marginals m{DenseVector(J.size()), DenseVector(J.size())};
  for (std::size_t i = 0; i < J.size(); ++i) {
    double a = J.diagonal(i);
    double b = h[i];
    const std::size_t first = J.edge_offset(i);
    for (std::size_t t = 0; t < J.degree(i); ++t) {
      const std::size_t back = J.mirror(first + t);
      a += state.alpha[back];
      b += state.beta[back];
    }
    if (!(std::abs(a) >= pivot_floor)) throw NumericalBreakdown(i);
    m.variances[i] = 1.0 / a;
    m.means[i] = b / a;
  }
  return m;
}

/// Called after every sweep with (sweep index starting at 1, new state).
using SweepObserver = std::function<void(std::size_t, const MessageState&)>;

/// Runs synchronous GaBP until the largest message change is within
/// message_tol, a message exceeds divergence_bound, a cavity precision turns
/// negative (when stop_on_indefinite), or the iteration cap is hit.
/// Starts from `warm_start` when given, otherwise from zero messages.
inline GabpResult run_gabp(const SparseSymMatrix& J, std::span<const double> h,
                           const GabpSettings& settings,
                           const MessageState* warm_start = nullptr,
                           const SweepObserver& observer = {}) {
  if (!(settings.message_tol > 0.0) || !(settings.divergence_bound > 0.0))
    throw InvalidArgument("GaBP tolerances must be positive");
  require_size(h, J.size());
  for (std::size_t i = 0; i < J.size(); ++i)
    if (!(J.diagonal(i) > 0.0)) throw NonPositiveDiagonal(i);

  GabpResult result;
  MessageState cur = warm_start ? *warm_start : init_messages(J);
  if (cur.alpha.size() != J.num_directed_edges())
    throw DimensionMismatch(J.num_directed_edges(), cur.alpha.size());
  MessageState next;
  result.status = GabpStatus::MaxIterations;

  for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
    SweepStats stats;
    try {
      stats = sweep_into(J, h, cur, next, settings.pivot_floor);
    } catch (const NumericalBreakdown&) {
      result.status = GabpStatus::NumericalBreakdown;
      result.iterations = it;
      break;
    }
    std::swap(cur, next);
    result.iterations = it;
    result.residual_history.push_back(stats.max_change);
    if (observer) observer(it, cur);
    if ((stats.indefinite && settings.stop_on_indefinite) ||
        !(stats.max_magnitude <= settings.divergence_bound)) {
      result.status = GabpStatus::Diverged;
      break;
    }
    if (stats.max_change <= settings.message_tol) {
      result.status = GabpStatus::Converged;
      break;
    }
  }

  try {
    auto m = infer(J, h, cur, settings.pivot_floor);
    result.means = std::move(m.means);
    result.variances = std::move(m.variances);
  } catch (const NumericalBreakdown&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.means.assign(J.size(), nan);
    result.variances.assign(J.size(), nan);
    if (result.status == GabpStatus::Converged) result.status = GabpStatus::NumericalBreakdown;
  }
  result.messages = std::move(cur);
  return result;
}

}  // namespace gabpfix

#endif  // GABPFIX_GABP_HPP
