#ifndef GABPFIX_SPARSE_SYM_MATRIX_HPP
#define GABPFIX_SPARSE_SYM_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gabpfix/error.hpp"

namespace gabpfix {

using DenseVector = std::vector<double>;

inline void require_size(std::span<const double> v, std::size_t n) {
  if (v.size() != n) throw DimensionMismatch(n, v.size());
}

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm_2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Symmetric sparse matrix over a model graph.
///
/// The diagonal is stored densely. Off-diagonal entries are kept in a
/// row-wise adjacency list that holds both (i,j) and its mirror (j,i), with
/// columns ascending within each row. Every stored off-diagonal slot is a
/// directed edge i->j of the graph, and `mirror(e)` gives the slot of j->i.
class SparseSymMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  struct Neighbor {
    std::size_t col;
    double value;
  };

  SparseSymMatrix() = default;

  /// Builds from a list of entries from either triangle. Each unordered pair
  /// {i,j} may appear at most once; off-diagonal zeros are dropped; missing
  /// diagonal entries are zero.
  static SparseSymMatrix from_entries(std::size_t n,
                                      std::span<const Entry> entries) {
    SparseSymMatrix m;
    m.diag_.assign(n, 0.0);
    std::vector<char> diag_seen(n, 0);
    std::vector<Entry> upper;
    upper.reserve(entries.size());
    for (const auto& e : entries) {
      if (e.row >= n || e.col >= n)
        throw InvalidArgument("entry (" + std::to_string(e.row) + "," +
                              std::to_string(e.col) + ") out of range for n=" +
                              std::to_string(n));
      if (!std::isfinite(e.value))
        throw InvalidArgument("non-finite value at (" + std::to_string(e.row) +
                              "," + std::to_string(e.col) + ")");
      if (e.row == e.col) {
        if (diag_seen[e.row]++)
          throw InvalidArgument("duplicate diagonal entry " +
                                std::to_string(e.row));
        m.diag_[e.row] = e.value;
        continue;
      }
      upper.push_back({std::min(e.row, e.col), std::max(e.row, e.col), e.value});
    }
    std::sort(upper.begin(), upper.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t t = 1; t < upper.size(); ++t) {
      if (upper[t].row == upper[t - 1].row && upper[t].col == upper[t - 1].col)
        throw InvalidArgument("duplicate entry (" + std::to_string(upper[t].row) +
                              "," + std::to_string(upper[t].col) + ")");
    }
    std::erase_if(upper, [](const Entry& e) { return e.value == 0.0; });
    m.build_adjacency(upper);
    return m;
  }

  static SparseSymMatrix from_entries(std::size_t n,
                                      std::initializer_list<Entry> entries) {
    return from_entries(n, std::span<const Entry>(entries.begin(), entries.size()));
  }

  static SparseSymMatrix identity(std::size_t n) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back({i, i, 1.0});
    return from_entries(n, e);
  }

  std::size_t size() const noexcept { return diag_.size(); }
  /// Number of directed edges, i.e. twice the number of off-diagonal pairs.
  std::size_t num_directed_edges() const noexcept { return adj_.size(); }

  double diagonal(std::size_t i) const { return diag_[i]; }
  std::span<const double> diagonal() const noexcept { return diag_; }

  std::span<const Neighbor> neighbors(std::size_t i) const {
    return std::span<const Neighbor>(adj_).subspan(row_ptr_[i],
                                                   row_ptr_[i + 1] - row_ptr_[i]);
  }
  std::size_t degree(std::size_t i) const { return row_ptr_[i + 1] - row_ptr_[i]; }
  /// Slot index of the first directed edge leaving node i.
  std::size_t edge_offset(std::size_t i) const { return row_ptr_[i]; }
  std::size_t mirror(std::size_t edge) const { return mirror_[edge]; }
  const Neighbor& edge(std::size_t e) const { return adj_[e]; }

  /// Value J_ij (zero when (i,j) is not in the graph).
  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return diag_[i];
    auto row = neighbors(i);
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Neighbor& nb, std::size_t c) { return nb.col < c; });
    return (it != row.end() && it->col == j) ? it->value : 0.0;
  }

  /// Upper-triangle entries (row <= col) including the full diagonal.
  std::vector<Entry> upper_entries() const {
    std::vector<Entry> out;
    out.reserve(size() + adj_.size() / 2);
    for (std::size_t i = 0; i < size(); ++i) {
      out.push_back({i, i, diag_[i]});
      for (const auto& nb : neighbors(i))
        if (nb.col > i) out.push_back({i, nb.col, nb.value});
    }
    return out;
  }

  DenseVector multiply(std::span<const double> x) const {
    require_size(x, size());
    DenseVector y(size());
    for (std::size_t i = 0; i < size(); ++i) {
      double s = diag_[i] * x[i];
      for (const auto& nb : neighbors(i)) s += nb.value * x[nb.col];
      y[i] = s;
    }
    return y;
  }

  /// ||J x - h||_inf
  double residual_inf(std::span<const double> x, std::span<const double> h) const {
    require_size(h, size());
    auto y = multiply(x);
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m = std::max(m, std::abs(y[i] - h[i]));
    return m;
  }

  /// J + diag(gamma).
  SparseSymMatrix with_added_diagonal(std::span<const double> gamma) const {
    require_size(gamma, size());
    SparseSymMatrix m = *this;
    for (std::size_t i = 0; i < size(); ++i) m.diag_[i] += gamma[i];
    return m;
  }

  /// Entrywise map over the stored off-diagonal values; the diagonal is
  /// replaced by `diag`. The sparsity pattern is kept even if values map to 0.
  template <typename OffDiagFn>
  SparseSymMatrix transformed(DenseVector diag, OffDiagFn&& fn) const {
    require_size(diag, size());
    SparseSymMatrix m = *this;
    m.diag_ = std::move(diag);
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e)
        m.adj_[e].value = fn(i, adj_[e].col, adj_[e].value);
    return m;
  }

 private:
  void build_adjacency(const std::vector<Entry>& upper) {
    const std::size_t n = diag_.size();
    std::vector<std::size_t> deg(n, 0);
    for (const auto& e : upper) {
      ++deg[e.row];
      ++deg[e.col];
    }
    row_ptr_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] = row_ptr_[i] + deg[i];
    adj_.assign(row_ptr_[n], Neighbor{0, 0.0});
    mirror_.assign(row_ptr_[n], 0);
    std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
    // Lower-triangle slots of row i come from entries (c, i) with c < i, and
    // `upper` is sorted by (row, col), so filling in this order keeps columns
    // ascending within each row.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pending(n);
    for (std::size_t t = 0; t < upper.size(); ++t) pending[upper[t].col].push_back({upper[t].row, t});
    std::vector<std::size_t> upper_slot(upper.size());
    for (std::size_t i = 0; i < n; ++i) {
      for (auto [r, t] : pending[i]) {
        std::size_t slot = fill[i]++;
        adj_[slot] = {r, upper[t].value};
        // (r -> i) was filled when row r was visited.
        mirror_[slot] = upper_slot[t];
        mirror_[upper_slot[t]] = slot;
      }
      for (std::size_t t = upper_lower_bound(upper, i); t < upper.size() && upper[t].row == i; ++t) {
        std::size_t slot = fill[i]++;
        adj_[slot] = {upper[t].col, upper[t].value};
        upper_slot[t] = slot;
      }
    }
  }

  static std::size_t upper_lower_bound(const std::vector<Entry>& upper, std::size_t row) {
    auto it = std::lower_bound(upper.begin(), upper.end(), row,
                               [](const Entry& e, std::size_t r) { return e.row < r; });
    return static_cast<std::size_t>(it - upper.begin());
  }

  DenseVector diag_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Neighbor> adj_;
  std::vector<std::size_t> mirror_;
};

}  // namespace gabpfix

#endif  // GABPFIX_SPARSE_SYM_MATRIX_HPP
