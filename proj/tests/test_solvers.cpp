#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "adkrylov/dense.hpp"
#include "adkrylov/solvers.hpp"
#include "test_support.hpp"

using adkrylov::BreakdownKind;
using adkrylov::CsrMatrix;
using adkrylov::Dual;
using adkrylov::SolverConfig;
using adkrylov::SolverKind;
using adkrylov::Termination;

namespace {

constexpr SolverKind kAll[] = {SolverKind::gmres, SolverKind::bicgstab, SolverKind::tfqmr};

SolverConfig config(SolverKind k, std::size_t iters, double tol = 0.0, std::size_t m = 10) {
  SolverConfig c;
  c.kind = k;
  c.max_iterations = iters;
  c.residual_tolerance = tol;
  c.gmres_restart = m;
  return c;
}

template <class T = double>
adkrylov::SolveOutcome<T> run(const CsrMatrix<double>& a, const std::vector<T>& b, const SolverConfig& c,
                              const adkrylov::IterationObserver<T>& obs = {}) {
  const std::vector<T> x0(b.size(), T(0.0));
  return adkrylov::solve<T>(a, std::span<const T>(b), std::span<const T>(x0), c, obs);
}

class EverySolver : public ::testing::TestWithParam<SolverKind> {};

TEST_P(EverySolver, IdentitySolvesInOneIteration) {
  const auto a = CsrMatrix<double>::identity(4);
  const std::vector<double> b{1, -2, 3, 0.5};
  const auto out = run(a, b, config(GetParam(), 50, 1e-14));
  EXPECT_EQ(out.termination, Termination::tolerance_met) << adkrylov::summary(out);
  EXPECT_LE(out.iterations, 1u);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(out.x[i], b[i], 1e-15);
}

TEST_P(EverySolver, MatchesDenseOracleOnDominantSystem) {
  adkrylov::testing::Rng rng(21);
  const auto a = adkrylov::testing::random_matrix(rng, 20, 0.4, 20.0, -1.0, 1.0);
  const auto b = adkrylov::testing::random_vector(rng, 20);
  const auto out = run(a, b, config(GetParam(), 500, 1e-12));
  EXPECT_EQ(out.termination, Termination::tolerance_met) << adkrylov::summary(out);
  const auto ref = adkrylov::dense_solve_oracle(a, b);
  EXPECT_LT(adkrylov::testing::rel_diff(out.x, ref), 1e-6);
}

TEST_P(EverySolver, ToleranceMetImpliesTrueResidual) {
  adkrylov::testing::Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = rng.index(2, 25);
    const auto a = adkrylov::testing::random_matrix(rng, n, 0.3, rng.uniform(0.5, 5.0), -1.0, 1.0);
    const auto b = adkrylov::testing::random_vector(rng, n, -1.0, 1.0);
    const double tol = std::pow(10.0, -rng.uniform(2.0, 12.0));
    const auto out = run(a, b, config(GetParam(), 300, tol, rng.index(1, 12)));
    if (out.termination != Termination::tolerance_met) continue;
    auto ax = adkrylov::spmv(a, out.x);
    for (std::size_t i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
    EXPECT_LE(adkrylov::testing::norm(ax), tol * adkrylov::testing::norm(b));
    EXPECT_LE(out.residual_norm, tol * adkrylov::testing::norm(b));
  }
}

TEST_P(EverySolver, ObserverCallCount) {
  adkrylov::testing::Rng rng(23);
  const auto a = adkrylov::testing::random_matrix(rng, 30, 0.2, 0.2, -1.0, 1.0);
  const auto b = adkrylov::testing::random_vector(rng, 30);
  for (std::size_t every : {1u, 3u, 7u}) {
    auto c = config(GetParam(), 40);
    c.record_every = every;
    std::vector<std::size_t> seen;
    const auto out = run<double>(a, b, c, [&](const adkrylov::IterationState<double>& s) {
      seen.push_back(s.iteration);
    });
    const std::size_t n = out.iterations;
    ASSERT_GT(n, 0u);
    EXPECT_EQ(seen.size(), (n + every - 1) / every) << "every=" << every << " n=" << n;
    EXPECT_EQ(seen.back(), n);
    for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_LT(seen[i - 1], seen[i]);
  }
}

TEST_P(EverySolver, ZeroTangentDualIsBitIdenticalToPlainRun) {
  adkrylov::testing::Rng rng(24);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = rng.index(3, 20);
    const auto a = adkrylov::testing::random_matrix(rng, n, 0.4, 1.0, -1.0, 1.0);
    const auto b = adkrylov::testing::random_vector(rng, n);
    std::vector<Dual> bd(b.begin(), b.end());
    std::vector<std::vector<double>> plain, dual;
    const auto c = config(GetParam(), 60, 0.0, 7);
    const auto po = run<double>(a, b, c, [&](const auto& s) { plain.emplace_back(s.x.begin(), s.x.end()); });
    const auto dout = run<Dual>(a, bd, c, [&](const adkrylov::IterationState<Dual>& s) {
      dual.push_back(adkrylov::primal_part(s.x));
      for (const auto& v : s.x) EXPECT_EQ(v.tangent, 0.0);
    });
    ASSERT_EQ(plain.size(), dual.size());
    for (std::size_t k = 0; k < plain.size(); ++k)
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(std::bit_cast<std::uint64_t>(plain[k][i]),
                                                    std::bit_cast<std::uint64_t>(dual[k][i]));
    EXPECT_EQ(adkrylov::summary(po), adkrylov::summary(dout));
  }
}

TEST_P(EverySolver, NonFiniteEntryIsReportedWithFiniteIterate) {
  auto a = CsrMatrix<double>::from_triplets(
      2, 2, {{0, 0, 1.0}, {0, 1, std::numeric_limits<double>::infinity()}, {1, 1, 1.0}});
  const auto out = run(a, std::vector<double>{1, 1}, config(GetParam(), 20));
  EXPECT_EQ(out.termination, Termination::breakdown);
  EXPECT_EQ(out.breakdown, BreakdownKind::nonfinite_value);
  for (double v : out.x) EXPECT_TRUE(std::isfinite(v));
}

TEST_P(EverySolver, RejectsBadInput) {
  const auto a = CsrMatrix<double>::identity(3);
  EXPECT_THROW(run(a, std::vector<double>{1, 2}, config(GetParam(), 5)), adkrylov::DimensionError);
  const auto rect = CsrMatrix<double>::from_triplets(2, 3, {{0, 0, 1.0}});
  EXPECT_THROW(run(rect, std::vector<double>{1, 2}, config(GetParam(), 5)), adkrylov::DimensionError);
  auto c = config(GetParam(), 0);
  EXPECT_THROW(run(a, std::vector<double>{1, 2, 3}, c), std::invalid_argument);
}

TEST_P(EverySolver, ZeroRightHandSideGivesZero) {
  const auto a = CsrMatrix<double>::identity(3);
  const auto out = run(a, std::vector<double>{0, 0, 0}, config(GetParam(), 10, 1e-10));
  for (double v : out.x) EXPECT_EQ(v, 0.0);
  EXPECT_NE(out.termination, Termination::breakdown) << adkrylov::summary(out);
}

INSTANTIATE_TEST_SUITE_P(Solvers, EverySolver, ::testing::ValuesIn(kAll),
                         [](const auto& info) { return std::string(adkrylov::to_string(info.param)); });

TEST(Gmres, DiagonalConvergesWithinDimension) {
  const std::vector<double> d{1, 2, 3, 4, 5};
  const auto a = CsrMatrix<double>::diagonal(std::span<const double>(d));
  const auto out = run(a, std::vector<double>{1, 1, 1, 1, 1}, config(SolverKind::gmres, 50, 1e-10, 5));
  EXPECT_EQ(out.termination, Termination::tolerance_met);
  EXPECT_LE(out.iterations, 5u);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(out.x[i], 1.0 / d[i], 1e-9);
}

TEST(Gmres, SingularHessenbergIsABreakdown) {
  const auto a = CsrMatrix<double>::from_triplets(2, 2, {{1, 1, 1.0}});
  const auto out = run(a, std::vector<double>{1, 0}, config(SolverKind::gmres, 20));
  EXPECT_EQ(out.termination, Termination::breakdown);
  EXPECT_EQ(out.breakdown, BreakdownKind::h_singular);
  EXPECT_EQ(out.breakdown_iteration, 1u);
}

TEST(Bicgstab, RotationBreaksDownOnRho) {
  const auto a = CsrMatrix<double>::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, -1.0}});
  const auto out = run(a, std::vector<double>{1, 0}, config(SolverKind::bicgstab, 20));
  EXPECT_EQ(out.termination, Termination::breakdown);
  EXPECT_EQ(out.breakdown, BreakdownKind::rho_zero);
}

TEST(Tfqmr, RotationBreaksDownOnRho) {
  const auto a = CsrMatrix<double>::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, -1.0}});
  const auto out = run(a, std::vector<double>{1, 0}, config(SolverKind::tfqmr, 20));
  EXPECT_EQ(out.termination, Termination::breakdown);
  EXPECT_EQ(out.breakdown, BreakdownKind::rho_zero);
}

TEST(Solvers, BudgetExhaustedRunsFullBudget) {
  adkrylov::testing::Rng rng(25);
  const auto a = adkrylov::testing::random_matrix(rng, 40, 0.2, 0.0, -1.0, 1.0);
  const auto b = adkrylov::testing::random_vector(rng, 40);
  for (auto k : kAll) {
    const auto out = run(a, b, config(k, 7));
    if (out.termination == Termination::budget_exhausted) EXPECT_EQ(out.iterations, 7u);
  }
}

struct CountingPreconditioner {
  mutable int calls = 0;
  template <class T>
  void apply(std::span<const T> in, std::span<T> out) const {
    ++calls;
    std::copy(in.begin(), in.end(), out.begin());
  }
};

TEST(Preconditioner, IdentityExamples) {
  EXPECT_EQ(adkrylov::apply_identity_preconditioner(std::vector<double>{1, 2, 3}),
            (std::vector<double>{1, 2, 3}));
  const auto d = adkrylov::apply_identity_preconditioner(std::vector<Dual>{Dual(1, 2)});
  EXPECT_EQ(d[0].value, 1.0);
  EXPECT_EQ(d[0].tangent, 2.0);
}

TEST(Preconditioner, SuppliedObjectIsUsedAndIdentityChangesNothing) {
  adkrylov::testing::Rng rng(26);
  const auto a = adkrylov::testing::random_matrix(rng, 12, 0.4, 3.0, -1.0, 1.0);
  const auto b = adkrylov::testing::random_vector(rng, 12);
  const std::vector<double> x0(12, 0.0);
  for (auto k : kAll) {
    CountingPreconditioner p;
    const auto c = config(k, 15);
    const auto with = adkrylov::solve<double>(a, std::span<const double>(b), std::span<const double>(x0), c, {}, p);
    const auto without = adkrylov::solve<double>(a, std::span<const double>(b), std::span<const double>(x0), c);
    EXPECT_GT(p.calls, 0);
    EXPECT_EQ(with.x, without.x);
  }
}

}  // namespace
