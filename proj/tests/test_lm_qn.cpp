#include <trdh/lm_qn.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace trdh;

namespace {

Vector randn(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

std::vector<std::pair<Vector, Vector>> retained(const LimitedMemoryOp& op) {
  std::vector<std::pair<Vector, Vector>> out;
  for (const auto& p : op.pairs()) out.emplace_back(p.s, p.y);
  return out;
}

Matrix dense_oracle(const LimitedMemoryOp& op) {
  return op.kind() == HessianKind::LBFGS ? oracle::dense_bfgs(op.scale(), retained(op), op.dim())
                                         : oracle::dense_sr1(op.scale(), retained(op), op.dim());
}

// Pairs from a random symmetric matrix: y = M s (+ curvature for LBFGS).
LimitedMemoryOp random_op(std::mt19937_64& rng, HessianKind kind, Index n, int count) {
  Matrix M = Matrix::NullaryExpr(n, n, [&]() { return std::normal_distribution<double>()(rng); });
  M = 0.5 * (M + M.transpose());
  if (kind == HessianKind::LBFGS) M += (M.eigenvalues().real().minCoeff() < 0 ? 1.0 : 0.0) *
                                       (1.0 - M.eigenvalues().real().minCoeff()) *
                                       Matrix::Identity(n, n);
  LimitedMemoryOp op(n, kind);
  for (int k = 0; k < count; ++k) {
    const Vector s = randn(rng, n);
    op.update({s, M * s});
  }
  return op;
}

}  // namespace

TEST(LimitedMemory, EmptyIsScaledIdentity) {
  for (auto kind : {HessianKind::LSR1, HessianKind::LBFGS}) {
    LimitedMemoryOp op(4, kind, {.initial_scale = 2.5});
    const Vector v{{1.0, -2.0, 3.0, 0.5}};
    EXPECT_EQ(op.apply(v), 2.5 * v);
    EXPECT_EQ(op.extract_diagonal(), Vector::Constant(4, 2.5));
  }
}

TEST(LimitedMemory, BfgsIdentityPairPreservesIdentity) {
  LimitedMemoryOp op(5, HessianKind::LBFGS);
  Vector e1 = Vector::Zero(5);
  e1(0) = 1.0;
  ASSERT_TRUE(op.update({e1, e1}));
  EXPECT_LT((op.apply(e1) - e1).norm(), 1e-15);
  const Matrix B = dense_oracle(op);
  EXPECT_LT((B - Matrix::Identity(5, 5)).norm(), 1e-15);
}

TEST(LimitedMemory, BfgsRejectsNegativeCurvature) {
  LimitedMemoryOp op(2, HessianKind::LBFGS);
  EXPECT_FALSE(op.update({Vector{{1.0, 0.0}}, Vector{{-1.0, 0.0}}}));
  EXPECT_TRUE(op.pairs().empty());
}

TEST(LimitedMemory, Sr1RejectsConsistentPair) {
  LimitedMemoryOp op(3, HessianKind::LSR1);
  const Vector s{{1.0, 2.0, 3.0}};
  EXPECT_FALSE(op.update({s, op.apply(s)}));
  EXPECT_TRUE(op.pairs().empty());
}

TEST(LimitedMemory, EvictsOldestBeyondMemory) {
  std::mt19937_64 rng(1);
  LimitedMemoryOp op(6, HessianKind::LBFGS);
  std::vector<Vector> ss;
  for (int k = 0; k < 6; ++k) {
    const Vector s = randn(rng, 6);
    ss.push_back(s);
    ASSERT_TRUE(op.update({s, 2.0 * s}));
  }
  ASSERT_EQ(op.pairs().size(), 5u);
  EXPECT_EQ(op.pairs().front().s, ss[1]);
  EXPECT_EQ(op.pairs().back().s, ss[5]);
}

TEST(LimitedMemory, MatchesDenseRecursiveOracle) {
  std::mt19937_64 rng(2024);
  for (auto kind : {HessianKind::LSR1, HessianKind::LBFGS}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = 2 + trial % 49;
      const LimitedMemoryOp op = random_op(rng, kind, n, 1 + trial % 9);
      const Matrix B = dense_oracle(op);
      for (int k = 0; k < 3; ++k) {
        const Vector v = randn(rng, n);
        const Vector Bv = B * v;
        ASSERT_LE((op.apply(v) - Bv).norm(), 1e-10 * Bv.norm()) << to_string(kind) << " n=" << n;
      }
      const Vector dB = B.diagonal();
      ASSERT_LE((op.extract_diagonal() - dB).norm(), 1e-10 * dB.norm());
    }
  }
}

TEST(LimitedMemory, DiagonalEqualsBasisApplications) {
  std::mt19937_64 rng(5);
  for (auto kind : {HessianKind::LSR1, HessianKind::LBFGS}) {
    const LimitedMemoryOp op = random_op(rng, kind, 10, 3);
    const Vector d = op.extract_diagonal();
    for (Index i = 0; i < 10; ++i) {
      Vector e = Vector::Zero(10);
      e(i) = 1.0;
      EXPECT_EQ(d(i), op.apply(e)(i));
    }
  }
}

TEST(LimitedMemory, UpdateChangesDiagonalWhereStepActs) {
  LimitedMemoryOp op(4, HessianKind::LSR1);
  const Vector before = op.extract_diagonal();
  ASSERT_TRUE(op.update({Vector{{1.0, 0.0, 0.0, 0.0}}, Vector{{3.0, 0.0, 0.0, 0.0}}}));
  const Vector after = op.extract_diagonal();
  EXPECT_DOUBLE_EQ(after(0), 3.0);
  EXPECT_EQ(after.tail(3), before.tail(3));
}

TEST(LimitedMemory, ApplyIsLinear) {
  std::mt19937_64 rng(8);
  for (auto kind : {HessianKind::LSR1, HessianKind::LBFGS}) {
    const LimitedMemoryOp op = random_op(rng, kind, 15, 7);
    for (int t = 0; t < 20; ++t) {
      const Vector u = randn(rng, 15), v = randn(rng, 15);
      const double a = 1.7, b = -0.3;
      const Vector lhs = op.apply(a * u + b * v);
      const Vector rhs = a * op.apply(u) + b * op.apply(v);
      EXPECT_LE((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
    }
  }
}

TEST(LimitedMemory, BfgsIsPositiveDefinite) {
  std::mt19937_64 rng(12);
  const LimitedMemoryOp op = random_op(rng, HessianKind::LBFGS, 20, 8);
  for (int t = 0; t < 50; ++t) {
    const Vector v = randn(rng, 20);
    EXPECT_GT(v.dot(op.apply(v)), 0.0);
  }
}

TEST(LimitedMemory, NormEstimates) {
  std::mt19937_64 rng(13);
  for (auto kind : {HessianKind::LSR1, HessianKind::LBFGS}) {
    const LimitedMemoryOp op = random_op(rng, kind, 12, 5);
    const Matrix B = dense_oracle(op);
    const double exact = B.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_GE(op.norm_bound(), exact * (1.0 - 1e-12));
    EXPECT_LE(op.norm_power(200), exact * (1.0 + 1e-9));
    EXPECT_GE(op.norm_power(200), 0.5 * exact);
  }
}
