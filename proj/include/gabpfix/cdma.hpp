#ifndef GABPFIX_CDMA_HPP
#define GABPFIX_CDMA_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "gabpfix/least_squares.hpp"
#include "gabpfix/sparse_sym_matrix.hpp"

namespace gabpfix {

enum class Spreading {
  Binary,            // chips +-1
  NormalizedBinary,  // chips +-1/sqrt(n), unit-norm columns
};

inline std::string_view to_string(Spreading s) {
  return s == Spreading::Binary ? "binary" : "binary-normalized";
}

inline Spreading parse_spreading(std::string_view s) {
  if (s == "binary") return Spreading::Binary;
  if (s == "binary-normalized") return Spreading::NormalizedBinary;
  throw InvalidArgument("unknown spreading '" + std::string(s) + "'");
}

struct CdmaConfig {
  std::size_t n = 256;  // chips per symbol
  std::size_t k = 64;   // users
  double sigma2 = 1.0;  // AWGN variance per chip
  std::uint64_t seed = 0;
  Spreading spreading = Spreading::Binary;

  void validate() const {
    if (k < 1 || n < k) throw InvalidArgument("CDMA config needs n >= k >= 1");
    if (!(sigma2 > 0.0)) throw InvalidArgument("CDMA sigma2 must be positive");
  }
};

/// A random-spreading CDMA draw and its linear MMSE system A x = y.
struct CdmaProblem {
  RectMatrix S;         // n x k spreading matrix
  SparseSymMatrix A;    // S^T S + sigma2 I
  DenseVector y;        // matched-filter output S^T (S b + noise)
  DenseVector symbols;  // transmitted +-1 symbols b
};

/// Chip signs take one engine draw each (row-major over S), then k symbol
/// signs, then n Gaussian noise samples.
inline CdmaProblem gen_cdma(const CdmaConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  auto sign = [&] { return (rng() >> 63) ? 1.0 : -1.0; };
  const double amp = cfg.spreading == Spreading::Binary ? 1.0 : 1.0 / std::sqrt(double(cfg.n));

  std::vector<double> dense(cfg.n * cfg.k);
  for (auto& v : dense) v = amp * sign();
  CdmaProblem p;
  p.S = RectMatrix::from_dense(cfg.n, cfg.k, dense);
  p.symbols.resize(cfg.k);
  for (auto& b : p.symbols) b = sign();

  std::normal_distribution<double> noise(0.0, std::sqrt(cfg.sigma2));
  DenseVector received = p.S.multiply(p.symbols);
  for (auto& r : received) r += noise(rng);
  p.y = p.S.transpose_multiply(received);

  auto ne = normal_equations(p.S, received);
  p.A = ne.matrix.with_added_diagonal(DenseVector(cfg.k, cfg.sigma2));
  return p;
}

}  // namespace gabpfix

#endif  // GABPFIX_CDMA_HPP
