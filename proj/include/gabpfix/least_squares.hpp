#ifndef GABPFIX_LEAST_SQUARES_HPP
#define GABPFIX_LEAST_SQUARES_HPP

#include <algorithm>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "gabpfix/outer_solver.hpp"
#include "gabpfix/sparse_sym_matrix.hpp"

namespace gabpfix {

/// Rectangular n x k matrix as a row-major coordinate list.
class RectMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  RectMatrix() = default;
  RectMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    for (const auto& e : entries_) {
      if (e.row >= rows_ || e.col >= cols_)
        throw InvalidArgument("rectangular entry out of range");
      if (!std::isfinite(e.value)) throw InvalidArgument("non-finite rectangular entry");
    }
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t t = 1; t < entries_.size(); ++t)
      if (entries_[t].row == entries_[t - 1].row && entries_[t].col == entries_[t - 1].col)
        throw InvalidArgument("duplicate rectangular entry");
  }

  /// Row-major dense data, zeros skipped.
  static RectMatrix from_dense(std::size_t rows, std::size_t cols, std::span<const double> data) {
    require_size(data, rows * cols);
    std::vector<Entry> e;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (data[r * cols + c] != 0.0) e.push_back({r, c, data[r * cols + c]});
    return RectMatrix(rows, cols, std::move(e));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const Entry> entries() const noexcept { return entries_; }

  DenseVector multiply(std::span<const double> x) const {
    require_size(x, cols_);
    DenseVector y(rows_, 0.0);
    for (const auto& e : entries_) y[e.row] += e.value * x[e.col];
    return y;
  }

  DenseVector transpose_multiply(std::span<const double> y) const {
    require_size(y, rows_);
    DenseVector x(cols_, 0.0);
    for (const auto& e : entries_) x[e.col] += e.value * y[e.row];
    return x;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Entry> entries_;
};

struct NormalSystem {
  SparseSymMatrix matrix;  // Jt^T Jt
  DenseVector rhs;         // Jt^T ht
};

/// Jt^T Jt and Jt^T ht. Fill-in is accepted; rank deficiency is not detected.
inline NormalSystem normal_equations(const RectMatrix& Jt, std::span<const double> ht) {
  if (Jt.rows() < Jt.cols()) throw InvalidArgument("least squares needs rows >= cols");
  require_size(ht, Jt.rows());
  std::map<std::pair<std::size_t, std::size_t>, double> acc;
  const auto entries = Jt.entries();
  for (std::size_t a = 0; a < entries.size();) {
    std::size_t b = a;
    while (b < entries.size() && entries[b].row == entries[a].row) ++b;
    for (std::size_t p = a; p < b; ++p)
      for (std::size_t q = p; q < b; ++q)
        acc[{entries[p].col, entries[q].col}] += entries[p].value * entries[q].value;
    a = b;
  }
  std::vector<SparseSymMatrix::Entry> out;
  out.reserve(acc.size());
  for (const auto& [key, v] : acc) out.push_back({key.first, key.second, v});
  return {SparseSymMatrix::from_entries(Jt.cols(), out), Jt.transpose_multiply(ht)};
}

/// Symmetric (k+n) system [[I, Jt^T], [Jt, -gamma I]] with rhs (0_k; ht).
/// With gamma = 0 its first k solution entries are the pseudo-inverse solution;
/// for n > k the matrix is singular and the minimum-norm solve is meant.
struct AugmentedSystem {
  SparseSymMatrix matrix;
  DenseVector rhs;
  std::size_t k = 0;
  std::size_t n = 0;
};

inline AugmentedSystem build_augmented(const RectMatrix& Jt, std::span<const double> ht,
                                       double gamma) {
  if (!(gamma >= 0.0)) throw InvalidArgument("augmented gamma must be non-negative");
  require_size(ht, Jt.rows());
  const std::size_t k = Jt.cols(), n = Jt.rows();
  std::vector<SparseSymMatrix::Entry> e;
  e.reserve(k + n + Jt.entries().size());
  for (std::size_t i = 0; i < k; ++i) e.push_back({i, i, 1.0});
  for (std::size_t r = 0; r < n; ++r) e.push_back({k + r, k + r, -gamma});
  for (const auto& t : Jt.entries()) e.push_back({t.col, k + t.row, t.value});
  AugmentedSystem sys{SparseSymMatrix::from_entries(k + n, e), DenseVector(k + n, 0.0), k, n};
  std::copy(ht.begin(), ht.end(), sys.rhs.begin() + static_cast<std::ptrdiff_t>(k));
  return sys;
}

/// x = (Jt^T Jt + gamma I)^{-1} Jt^T ht through the normal equations and the
/// double-loop solver. The loading is resolved against the regularized matrix.
inline FixedSolveReport regularized_lsq_solve(const RectMatrix& Jt, std::span<const double> ht,
                                              double gamma, const LoadingRequest& loading,
                                              const OuterSettings& settings) {
  if (!(gamma >= 0.0)) throw InvalidArgument("regularization gamma must be non-negative");
  auto ne = normal_equations(Jt, ht);
  if (gamma > 0.0) ne.matrix = ne.matrix.with_added_diagonal(DenseVector(Jt.cols(), gamma));
  const auto spec = resolve_loading(ne.matrix, loading, settings.spectral);
  return double_loop_solve(ne.matrix, ne.rhs, spec, settings);
}

}  // namespace gabpfix

#endif  // GABPFIX_LEAST_SQUARES_HPP
