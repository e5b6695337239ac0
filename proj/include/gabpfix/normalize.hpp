#ifndef GABPFIX_NORMALIZE_HPP
#define GABPFIX_NORMALIZE_HPP

#include <cmath>
#include <span>

#include "gabpfix/sparse_sym_matrix.hpp"

namespace gabpfix {

/// Unit-diagonal form D^{-1/2} J D^{-1/2} = I - R of an information matrix.
struct NormalizedModel {
  SparseSymMatrix partial_correlations;  // R, zero diagonal
  DenseVector h;                         // D^{-1/2} h
  DenseVector scale;                     // d_i = sqrt(J_ii)
};

inline DenseVector diagonal_scale(const SparseSymMatrix& J) {
  DenseVector d(J.size());
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (!(J.diagonal(i) > 0.0)) throw NonPositiveDiagonal(i);
    d[i] = std::sqrt(J.diagonal(i));
  }
  return d;
}

/// R = I - D^{-1/2} J D^{-1/2}. The edge set of R is the edge set of J.
inline SparseSymMatrix partial_correlations(const SparseSymMatrix& J,
                                            std::span<const double> scale) {
  require_size(scale, J.size());
  return J.transformed(DenseVector(J.size(), 0.0),
                       [&](std::size_t i, std::size_t j, double v) {
                         return -v / (scale[i] * scale[j]);
                       });
}

inline NormalizedModel normalize_unit_diagonal(const SparseSymMatrix& J,
                                               std::span<const double> h) {
  require_size(h, J.size());
  NormalizedModel m;
  m.scale = diagonal_scale(J);
  m.partial_correlations = partial_correlations(J, m.scale);
  m.h.resize(J.size());
  for (std::size_t i = 0; i < J.size(); ++i) m.h[i] = h[i] / m.scale[i];
  return m;
}

/// Maps a solution of (I - R) x = h_norm back to J x = h.
inline DenseVector recover_solution(std::span<const double> x_norm,
                                    std::span<const double> scale) {
  require_size(x_norm, scale.size());
  DenseVector x(x_norm.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = x_norm[i] / scale[i];
  return x;
}

}  // namespace gabpfix

#endif  // GABPFIX_NORMALIZE_HPP
