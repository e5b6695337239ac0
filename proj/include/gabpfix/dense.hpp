#ifndef GABPFIX_DENSE_HPP
#define GABPFIX_DENSE_HPP

// Small dense helpers for diagnostics and result verification. Never used on
// the GaBP solve path.

#include <Eigen/Dense>
#include <span>

#include "gabpfix/sparse_sym_matrix.hpp"

namespace gabpfix {

inline Eigen::MatrixXd to_dense(const SparseSymMatrix& J) {
  const auto n = static_cast<Eigen::Index>(J.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < J.size(); ++i) {
    M(i, i) = J.diagonal(i);
    for (const auto& nb : J.neighbors(i)) M(i, nb.col) = nb.value;
  }
  return M;
}

/// Direct solve of J x = h via LDL^T.
inline DenseVector dense_solve(const SparseSymMatrix& J, std::span<const double> h) {
  require_size(h, J.size());
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(h.data(), h.size());
  Eigen::VectorXd x = to_dense(J).ldlt().solve(rhs);
  return DenseVector(x.data(), x.data() + x.size());
}

}  // namespace gabpfix

#endif  // GABPFIX_DENSE_HPP
