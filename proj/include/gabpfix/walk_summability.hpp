#ifndef GABPFIX_WALK_SUMMABILITY_HPP
#define GABPFIX_WALK_SUMMABILITY_HPP

#include <cmath>

#include "gabpfix/normalize.hpp"
#include "gabpfix/spectral_radius.hpp"

namespace gabpfix {

struct WalkSummability {
  bool walk_summable;
  double rho;  // rho(|R|) of the unit-diagonal form
};

/// rho(|R|) < 1 on the normalized model. rho == 1 counts as not walk-summable.
inline WalkSummability is_walk_summable(const SparseSymMatrix& J,
                                        const SpectralRadiusOptions& opt = {}) {
  const auto R = partial_correlations(J, diagonal_scale(J));
  const double rho = spectral_radius_abs(R, opt);
  return {rho < 1.0, rho};
}

inline WalkSummability is_walk_summable(const SparseSymMatrix& J, double tol) {
  return is_walk_summable(J, SpectralRadiusOptions{tol});
}

/// Strict row diagonal dominance: |J_ii| > sum_{j != i} |J_ij| for all i.
inline bool is_diag_dominant(const SparseSymMatrix& J) {
  for (std::size_t i = 0; i < J.size(); ++i) {
    double off = 0.0;
    for (const auto& nb : J.neighbors(i)) off += std::abs(nb.value);
    if (!(std::abs(J.diagonal(i)) > off)) return false;
  }
  return true;
}

}  // namespace gabpfix

#endif  // GABPFIX_WALK_SUMMABILITY_HPP
