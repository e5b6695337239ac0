#ifndef GABPFIX_LOADING_HPP
#define GABPFIX_LOADING_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>

#include "gabpfix/dense.hpp"
#include "gabpfix/normalize.hpp"
#include "gabpfix/spectral_radius.hpp"
#include "gabpfix/walk_summability.hpp"

namespace gabpfix {

enum class LoadingMode { Uniform, DiagDominant, Custom };

inline std::string_view to_string(LoadingMode m) {
  switch (m) {
    case LoadingMode::Uniform: return "uniform";
    case LoadingMode::DiagDominant: return "dd";
    case LoadingMode::Custom: return "custom";
  }
  return "unknown";
}

inline constexpr double kDefaultUniformMargin = 0.05;
inline constexpr double kDefaultDdMargin = 0.01;

/// A resolved diagonal loading Gamma for one particular matrix.
///
/// `gamma` is the uniform level on the unit-diagonal model (Gamma = gamma * D
/// in the original scale); it is NaN for the other modes. `diagonal` holds
/// Gamma_ii in the original scale.
struct LoadingSpec {
  LoadingMode mode = LoadingMode::Uniform;
  double gamma = 0.0;
  double margin = 0.0;
  DenseVector diagonal;
};

/// What the caller asks for before the matrix is known.
struct LoadingRequest {
  LoadingMode mode = LoadingMode::Uniform;
  std::optional<double> margin;  // mode default when empty
  std::optional<double> gamma;   // Uniform: fixed normalized level instead of rho(|R|) - 1 + margin
  DenseVector custom;            // Custom: Gamma_ii, or a single value broadcast to all nodes
};

/// Gamma = gamma * diag(J), i.e. gamma * I on the unit-diagonal model.
inline LoadingSpec uniform_loading(const SparseSymMatrix& J, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidArgument("uniform loading must be non-negative");
  LoadingSpec s{LoadingMode::Uniform, gamma, 0.0, DenseVector(J.size())};
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (!(J.diagonal(i) > 0.0)) throw NonPositiveDiagonal(i);
    s.diagonal[i] = gamma * J.diagonal(i);
  }
  return s;
}

/// Smallest-plus-margin uniform loading that makes the model walk-summable:
/// gamma = max(0, rho(|R|) - 1 + margin), so rho(|R'|) = rho(|R|)/(1+gamma) < 1.
inline LoadingSpec compute_uniform_loading(const SparseSymMatrix& J,
                                           double margin = kDefaultUniformMargin,
                                           const SpectralRadiusOptions& opt = {}) {
  if (!(margin > 0.0)) throw InvalidArgument("loading margin must be positive");
  const double rho = is_walk_summable(J, opt).rho;
  auto s = uniform_loading(J, std::max(0.0, rho - 1.0 + margin));
  s.margin = margin;
  return s;
}

/// Gamma_ii = max(0, sum_{j!=i} |J_ij| - J_ii + margin), which makes J + Gamma
/// strictly diagonally dominant.
inline LoadingSpec compute_dd_loading(const SparseSymMatrix& J,
                                      double margin = kDefaultDdMargin) {
  if (!(margin > 0.0)) throw InvalidArgument("loading margin must be positive");
  LoadingSpec s{LoadingMode::DiagDominant, std::nan(""), margin, DenseVector(J.size())};
  for (std::size_t i = 0; i < J.size(); ++i) {
    double off = 0.0;
    for (const auto& nb : J.neighbors(i)) off += std::abs(nb.value);
    s.diagonal[i] = std::max(0.0, off - J.diagonal(i) + margin);
  }
  return s;
}

inline LoadingSpec custom_loading(const SparseSymMatrix& J, std::span<const double> gamma) {
  DenseVector d(J.size());
  if (gamma.size() == 1) {
    std::fill(d.begin(), d.end(), gamma[0]);
  } else {
    require_size(gamma, J.size());
    d.assign(gamma.begin(), gamma.end());
  }
  for (std::size_t i = 0; i < d.size(); ++i)
    if (!(d[i] >= 0.0) || !std::isfinite(d[i]))
      throw InvalidArgument("custom loading must be finite and non-negative (index " +
                            std::to_string(i) + ")");
  return {LoadingMode::Custom, std::nan(""), 0.0, std::move(d)};
}

/// Uniform normalized level at which J + gamma * D becomes (weakly) diagonally
/// dominant: max_i sum_j |R_ij| - 1, floored at zero.
inline double dd_uniform_level(const SparseSymMatrix& J) {
  const auto R = partial_correlations(J, diagonal_scale(J));
  double worst = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    double s = 0.0;
    for (const auto& nb : R.neighbors(i)) s += std::abs(nb.value);
    worst = std::max(worst, s);
  }
  return std::max(0.0, worst - 1.0);
}

inline LoadingSpec resolve_loading(const SparseSymMatrix& J, const LoadingRequest& req,
                                   const SpectralRadiusOptions& opt = {}) {
  switch (req.mode) {
    case LoadingMode::Uniform:
      if (req.gamma) return uniform_loading(J, *req.gamma);
      return compute_uniform_loading(J, req.margin.value_or(kDefaultUniformMargin), opt);
    case LoadingMode::DiagDominant:
      return compute_dd_loading(J, req.margin.value_or(kDefaultDdMargin));
    case LoadingMode::Custom:
      if (req.custom.empty()) throw InvalidArgument("custom loading needs Gamma values");
      return custom_loading(J, req.custom);
  }
  throw InvalidArgument("unknown loading mode");
}

inline constexpr std::size_t kDefaultDenseCap = 500;

/// Eigenvalues (ascending) of H = (J+Gamma)^{-1/2} Gamma (J+Gamma)^{-1/2},
/// computed as L^{-1} Gamma L^{-T} with J + Gamma = L L^T.
inline Eigen::VectorXd contraction_spectrum(const SparseSymMatrix& J,
                                            std::span<const double> gamma,
                                            std::size_t dense_cap = kDefaultDenseCap) {
  require_size(gamma, J.size());
  if (J.size() > dense_cap) throw DimensionTooLarge(J.size(), dense_cap);
  const auto n = static_cast<Eigen::Index>(J.size());
  const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(gamma.data(), n);
  Eigen::MatrixXd loaded = to_dense(J);
  loaded.diagonal() += g;
  Eigen::LLT<Eigen::MatrixXd> llt(loaded);
  if (llt.info() != Eigen::Success) throw InvalidArgument("J + Gamma is not positive definite");
  Eigen::MatrixXd G = g.asDiagonal();
  Eigen::MatrixXd X = llt.matrixL().solve(G);              // L^{-1} Gamma
  Eigen::MatrixXd H = llt.matrixL().solve(X.transpose());  // L^{-1} Gamma L^{-T}
  H = 0.5 * (H + H.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly).eigenvalues();
}

/// rho((J+Gamma)^{-1} Gamma): the asymptotic error reduction per outer step.
inline double contraction_factor(const SparseSymMatrix& J, std::span<const double> gamma,
                                 std::size_t dense_cap = kDefaultDenseCap) {
  if (J.size() == 0) return 0.0;
  const auto ev = contraction_spectrum(J, gamma, dense_cap);
  return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

}  // namespace gabpfix

#endif  // GABPFIX_LOADING_HPP
