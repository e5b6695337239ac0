#ifndef GABPFIX_SPECTRAL_RADIUS_HPP
#define GABPFIX_SPECTRAL_RADIUS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "gabpfix/sparse_sym_matrix.hpp"

namespace gabpfix {

struct SpectralRadiusOptions {
  double tol = 1e-9;
  std::size_t max_iter = 10000;
};

namespace detail {

/// Connected components of the graph of A, nodes listed ascending.
inline std::vector<std::vector<std::size_t>> components(const SparseSymMatrix& A) {
  const std::size_t n = A.size();
  std::vector<std::size_t> label(n, n);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != n) continue;
    comps.emplace_back();
    label[s] = comps.size() - 1;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      comps.back().push_back(u);
      for (const auto& nb : A.neighbors(u)) {
        if (label[nb.col] == n) {
          label[nb.col] = label[s];
          stack.push_back(nb.col);
        }
      }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

/// Perron root of |A| restricted to one connected component.
///
/// Iterates x <- (|A| + I) x from x = 1. The shift makes the component
/// matrix primitive, so x converges to the positive Perron vector even on
/// bipartite graphs. For x > 0 the Collatz-Wielandt quotients
/// ((|A|+I)x)_i / x_i bracket rho + 1; iteration stops once the bracket is
/// relatively tighter than tol.
inline double component_perron_root(const SparseSymMatrix& A,
                                    const std::vector<std::size_t>& nodes,
                                    const std::vector<std::size_t>& local,
                                    const SpectralRadiusOptions& opt) {
  const std::size_t m = nodes.size();
  std::vector<double> x(m, 1.0), y(m);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    double num = 0.0, den = 0.0;
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      std::size_t i = nodes[a];
      double s = (1.0 + std::abs(A.diagonal(i))) * x[a];
      for (const auto& nb : A.neighbors(i)) s += std::abs(nb.value) * x[local[nb.col]];
      y[a] = s;
      double q = s / x[a];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      num += x[a] * s;
      den += x[a] * x[a];
    }
    if (hi - lo <= opt.tol * hi) {
      // Rayleigh quotient is second-order accurate; keep it inside the bracket.
      double rq = std::clamp(num / den, lo, hi);
      return std::max(0.0, rq - 1.0);
    }
    double scale = *std::max_element(y.begin(), y.end());
    for (std::size_t a = 0; a < m; ++a) x[a] = y[a] / scale;
  }
  throw NoConvergence("spectral radius estimate did not converge within " +
                          std::to_string(opt.max_iter) + " iterations",
                      0.5 * (lo + hi) - 1.0);
}

}  // namespace detail

/// rho(|A|), the spectral radius of the elementwise absolute value of a
/// symmetric matrix. Accurate to roughly tol * (rho + 1).
inline double spectral_radius_abs(const SparseSymMatrix& A,
                                  const SpectralRadiusOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw InvalidArgument("spectral radius tol must be positive");
  const auto comps = detail::components(A);
  std::vector<std::size_t> local(A.size());
  double rho = 0.0;
  for (const auto& c : comps) {
    if (c.size() == 1) {
      rho = std::max(rho, std::abs(A.diagonal(c[0])));
      continue;
    }
    for (std::size_t a = 0; a < c.size(); ++a) local[c[a]] = a;
    rho = std::max(rho, detail::component_perron_root(A, c, local, opt));
  }
  return rho;
}

inline double spectral_radius_abs(const SparseSymMatrix& A, double tol,
                                  std::size_t max_iter) {
  return spectral_radius_abs(A, SpectralRadiusOptions{tol, max_iter});
}

}  // namespace gabpfix

#endif  // GABPFIX_SPECTRAL_RADIUS_HPP
