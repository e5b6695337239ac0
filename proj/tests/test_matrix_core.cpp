#include <gtest/gtest.h>

#include "gabpfix/normalize.hpp"
#include "gabpfix/spectral_radius.hpp"
#include "gabpfix/walk_summability.hpp"
#include "support/oracles.hpp"

using namespace gabpfix;

namespace {

SparseSymMatrix two_by_two(double a, double b, double c) {
  return SparseSymMatrix::from_entries(2, {{0, 0, a}, {0, 1, b}, {1, 1, c}});
}

}  // namespace

TEST(SparseSymMatrix, MirrorsEntriesAndKeepsColumnsSorted) {
  auto J = SparseSymMatrix::from_entries(
      4, {{0, 0, 2}, {1, 1, 2}, {2, 2, 2}, {3, 3, 2}, {3, 0, 0.5}, {1, 2, -0.25}, {0, 2, 0.1}});
  EXPECT_EQ(J.num_directed_edges(), 6u);
  EXPECT_DOUBLE_EQ(J(0, 3), 0.5);
  EXPECT_DOUBLE_EQ(J(3, 0), 0.5);
  EXPECT_DOUBLE_EQ(J(2, 1), -0.25);
  EXPECT_DOUBLE_EQ(J(1, 3), 0.0);
  for (std::size_t i = 0; i < J.size(); ++i) {
    auto nb = J.neighbors(i);
    for (std::size_t t = 1; t < nb.size(); ++t) EXPECT_LT(nb[t - 1].col, nb[t].col);
    for (std::size_t t = 0; t < nb.size(); ++t) {
      const std::size_t e = J.edge_offset(i) + t;
      const std::size_t back = J.mirror(e);
      EXPECT_EQ(J.mirror(back), e);
      EXPECT_EQ(J.edge(back).col, i);
      EXPECT_DOUBLE_EQ(J.edge(back).value, nb[t].value);
    }
  }
}

TEST(SparseSymMatrix, RejectsDuplicatesNonFiniteAndOutOfRange) {
  EXPECT_THROW(SparseSymMatrix::from_entries(2, {{0, 1, 1.0}, {1, 0, 1.0}}), InvalidArgument);
  EXPECT_THROW(SparseSymMatrix::from_entries(2, {{0, 0, 1.0}, {0, 0, 2.0}}), InvalidArgument);
  EXPECT_THROW(SparseSymMatrix::from_entries(2, {{0, 1, NAN}}), InvalidArgument);
  EXPECT_THROW(SparseSymMatrix::from_entries(2, {{0, 2, 1.0}}), InvalidArgument);
}

TEST(SparseSymMatrix, DropsExplicitOffDiagonalZeros) {
  auto J = SparseSymMatrix::from_entries(2, {{0, 0, 1}, {0, 1, 0.0}, {1, 1, 1}});
  EXPECT_EQ(J.num_directed_edges(), 0u);
}

TEST(SparseSymMatrix, MultiplyMatchesDense) {
  oracle::Rng rng(3);
  auto J = oracle::random_pd(rng, 12, 0.3);
  auto x = oracle::random_vector(rng, 12);
  Eigen::VectorXd ref = oracle::dense(J) * oracle::vec(x);
  auto y = J.multiply(x);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(y[i], ref(i), 1e-13);
}

TEST(Normalize, IdentityIsUnchanged) {
  auto m = normalize_unit_diagonal(SparseSymMatrix::identity(3), DenseVector{1, 2, 3});
  EXPECT_EQ(m.partial_correlations.num_directed_edges(), 0u);
  EXPECT_EQ(m.h, (DenseVector{1, 2, 3}));
  EXPECT_EQ(m.scale, (DenseVector{1, 1, 1}));
}

TEST(Normalize, PureRescaling) {
  auto J = SparseSymMatrix::from_entries(2, {{0, 0, 4}, {1, 1, 4}});
  auto m = normalize_unit_diagonal(J, DenseVector{2, 2});
  EXPECT_EQ(m.h, (DenseVector{1, 1}));
  EXPECT_EQ(m.scale, (DenseVector{2, 2}));
}

TEST(Normalize, TwoByTwoPartialCorrelation) {
  auto J = two_by_two(4, 1, 1);
  auto m = normalize_unit_diagonal(J, DenseVector{1, 0});
  EXPECT_DOUBLE_EQ(m.partial_correlations(0, 1), -0.5);
  EXPECT_DOUBLE_EQ(m.partial_correlations(0, 0), 0.0);
  EXPECT_EQ(m.h, (DenseVector{0.5, 0.0}));
  EXPECT_EQ(m.scale, (DenseVector{2, 1}));
  // J_ij = d_i d_j (delta_ij - R_ij)
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_DOUBLE_EQ(m.scale[i] * m.scale[j] * ((i == j) - m.partial_correlations(i, j)), J(i, j));
}

TEST(Normalize, RejectsNonPositiveDiagonal) {
  auto J = two_by_two(1, 0.5, 0);
  try {
    normalize_unit_diagonal(J, DenseVector{1, 1});
    FAIL();
  } catch (const NonPositiveDiagonal& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_THROW(normalize_unit_diagonal(two_by_two(-1, 0, 1), DenseVector{1, 1}), NonPositiveDiagonal);
}

TEST(RecoverSolution, ComponentwiseDivision) {
  EXPECT_EQ(recover_solution(DenseVector{1, 1}, DenseVector{1, 1}), (DenseVector{1, 1}));
  EXPECT_EQ(recover_solution(DenseVector{2, 3}, DenseVector{2, 1}), (DenseVector{1, 3}));
  EXPECT_THROW(recover_solution(DenseVector{1}, DenseVector{1, 2}), DimensionMismatch);
}

TEST(RecoverSolution, NormalizedSolveRoundTrip) {
  auto J = two_by_two(4, 1, 1);
  DenseVector h{1, 0};
  auto m = normalize_unit_diagonal(J, h);
  // (I - R) x_norm = h_norm, solved densely
  auto JN = m.partial_correlations.transformed(DenseVector{1, 1},
                                               [](std::size_t, std::size_t, double r) { return -r; });
  auto x = recover_solution(oracle::solve(JN, m.h), m.scale);
  EXPECT_NEAR(x[0], 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(x[1], -1.0 / 3.0, 1e-10);
  auto direct = oracle::solve(J, h);
  EXPECT_NEAR(oracle::max_abs_diff(x, direct), 0.0, 1e-10);
}

TEST(Normalize, RoundTripOnRandomModels) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    auto J = oracle::random_pd(rng, n, 0.2);
    auto h = oracle::random_vector(rng, n);
    auto m = normalize_unit_diagonal(J, h);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(m.partial_correlations.diagonal(i), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double rebuilt = m.scale[i] * m.scale[j] * ((i == j) - m.partial_correlations(i, j));
        EXPECT_NEAR(rebuilt, J(i, j), 1e-12 * std::max(1.0, std::abs(J(i, j))));
      }
    }
  }
}

TEST(SpectralRadius, ZeroMatrix) {
  auto R = SparseSymMatrix::from_entries(4, {});
  EXPECT_EQ(spectral_radius_abs(R), 0.0);
}

TEST(SpectralRadius, TwoNodeIsTheCoupling) {
  auto R = two_by_two(0, 0.7, 0);
  EXPECT_NEAR(spectral_radius_abs(R), 0.7, 1e-9);
  auto Rn = two_by_two(0, -0.7, 0);
  EXPECT_NEAR(spectral_radius_abs(Rn), 0.7, 1e-9);
}

TEST(SpectralRadius, FrustratedCycle) {
  // Signs do not matter for |R|; circulant eigenvalues of |R| are {1.2, -0.6, -0.6}.
  auto R = SparseSymMatrix::from_entries(3, {{0, 1, -0.6}, {1, 2, 0.6}, {0, 2, -0.6}});
  EXPECT_NEAR(spectral_radius_abs(R), 1.2, 1e-9);
}

TEST(SpectralRadius, BipartitePathDoesNotOscillate) {
  // Path graphs have eigenvalues +-rho; the shifted iteration still converges.
  std::vector<SparseSymMatrix::Entry> e;
  for (std::size_t i = 0; i + 1 < 30; ++i) e.push_back({i, i + 1, 0.45});
  auto R = SparseSymMatrix::from_entries(30, e);
  EXPECT_NEAR(spectral_radius_abs(R), oracle::rho_abs(R), 1e-9);
}

TEST(SpectralRadius, DisconnectedComponentsTakeTheMaximum) {
  auto R = SparseSymMatrix::from_entries(5, {{0, 1, 0.3}, {2, 3, 0.9}, {3, 4, 0.1}});
  EXPECT_NEAR(spectral_radius_abs(R), oracle::rho_abs(R), 1e-10);
}

TEST(SpectralRadius, ReportsNoConvergence) {
  std::vector<SparseSymMatrix::Entry> e;
  for (std::size_t i = 0; i + 1 < 40; ++i) e.push_back({i, i + 1, 0.5});
  auto R = SparseSymMatrix::from_entries(40, e);
  EXPECT_THROW(spectral_radius_abs(R, 1e-12, 3), NoConvergence);
  EXPECT_THROW(spectral_radius_abs(R, 0.0, 10), InvalidArgument);
}

TEST(SpectralRadius, AgreesWithDenseEigensolve) {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 29;
    Eigen::MatrixXd M = oracle::random_pattern(rng, n, 0.1 + 0.5 * oracle::uniform(rng, 0, 1));
    M.diagonal().setZero();
    auto R = oracle::sparse(M);
    const double ref = oracle::rho_abs(R);
    EXPECT_NEAR(spectral_radius_abs(R), ref, 1e-8 * std::max(ref, 1e-300)) << "trial " << trial;
  }
}

TEST(WalkSummability, Identity) {
  auto ws = is_walk_summable(SparseSymMatrix::identity(3));
  EXPECT_TRUE(ws.walk_summable);
  EXPECT_EQ(ws.rho, 0.0);
}

TEST(WalkSummability, FrustratedCycleIsPdButNotWalkSummable) {
  auto J = oracle::frustrated_cycle();
  auto ev = oracle::eigenvalues(oracle::dense(J));
  EXPECT_NEAR(ev(0), 0.4, 1e-12);
  EXPECT_NEAR(ev(1), 0.4, 1e-12);
  EXPECT_NEAR(ev(2), 2.2, 1e-12);
  auto ws = is_walk_summable(J);
  EXPECT_FALSE(ws.walk_summable);
  EXPECT_NEAR(ws.rho, 1.2, 1e-9);
}

TEST(WalkSummability, BoundaryCountsAsNotWalkSummable) {
  // Two nodes with |r| = 1 is singular; rho = 1 exactly.
  auto J = two_by_two(1, 1, 1);
  auto ws = is_walk_summable(J);
  EXPECT_NEAR(ws.rho, 1.0, 1e-12);
  EXPECT_FALSE(ws.walk_summable);
}

TEST(WalkSummability, DiagonalDominanceImpliesWalkSummable) {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto J = oracle::random_dd(rng, 2 + rng() % 40, 0.3);
    ASSERT_TRUE(is_diag_dominant(J));
    EXPECT_TRUE(is_walk_summable(J).walk_summable);
  }
}

TEST(WalkSummability, ScaleInvariant) {
  oracle::Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    auto J = oracle::random_pd(rng, 2 + rng() % 30, 0.3);
    const double c = oracle::uniform(rng, 0.01, 100.0);
    auto entries = J.upper_entries();
    for (auto& e : entries) e.value *= c;
    auto scaled = SparseSymMatrix::from_entries(J.size(), entries);
    auto a = is_walk_summable(J), b = is_walk_summable(scaled);
    EXPECT_EQ(a.walk_summable, b.walk_summable);
    EXPECT_NEAR(a.rho, b.rho, 1e-8 * std::max(1.0, a.rho));
  }
}

TEST(DiagDominance, Examples) {
  EXPECT_TRUE(is_diag_dominant(SparseSymMatrix::identity(3)));
  EXPECT_TRUE(is_diag_dominant(two_by_two(1, 0.6, 1)));
  EXPECT_FALSE(is_diag_dominant(oracle::frustrated_cycle()));
  EXPECT_FALSE(is_diag_dominant(two_by_two(1, 1, 1)));  // strict
}
