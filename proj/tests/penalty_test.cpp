#include <random>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "oracles.hpp"
#include "splinefit/error.hpp"
#include "splinefit/penalty.hpp"

using namespace splinefit;

TEST(Difference, FirstOrder) {
  Eigen::MatrixXd expected(2, 3);
  expected << -1, 1, 0, 0, -1, 1;
  EXPECT_EQ(difference_matrix(3, 1), expected);
}

TEST(Difference, SecondOrder) {
  Eigen::MatrixXd expected(1, 3);
  expected << 1, -2, 1;
  EXPECT_EQ(difference_matrix(3, 2), expected);
  Eigen::MatrixXd d5 = difference_matrix(5, 2);
  EXPECT_EQ(d5.rows(), 3);
  EXPECT_EQ(d5.row(2), (Eigen::RowVectorXd(5) << 0, 0, 1, -2, 1).finished());
}

TEST(Difference, ThirdOrderCoefficientsAreBinomial) {
  const auto D = difference_matrix(6, 3);
  EXPECT_EQ(D.row(0), (Eigen::RowVectorXd(6) << -1, 3, -3, 1, 0, 0).finished());
}

TEST(Difference, OrderZeroIsIdentity) {
  EXPECT_EQ(difference_matrix(4, 0), Eigen::MatrixXd::Identity(4, 4));
  const auto K = build_penalty(PenaltySpec::difference(0), 4, 2);
  EXPECT_EQ(K.values, Eigen::MatrixXd::Identity(4, 4));
}

TEST(Difference, FirstOrderPenalty) {
  Eigen::MatrixXd expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  EXPECT_EQ(difference_penalty(3, 1).values, expected);
}

TEST(Difference, QuadraticFormMatchesExplicitDifferences) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int d = 1; d <= 20; ++d) {
    for (int r = 0; r <= 4 && r < d; ++r) {
      const auto K = difference_penalty(d, r);
      for (int s = 0; s < 100; ++s) {
        Eigen::VectorXd g(d);
        for (int j = 0; j < d; ++j) g[j] = normal(rng);
        const double expected = oracle::sum_squared_differences(g, r);
        EXPECT_NEAR(g.dot(K.values * g), expected, 1e-12 * std::max(1.0, expected));
      }
    }
  }
}

TEST(Difference, NullSpaceDimensionEqualsOrder) {
  for (int d = 6; d <= 20; d += 7) {
    for (int r = 0; r <= 4; ++r) {
      const auto K = difference_penalty(d, r).values;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
      const auto& ev = eig.eigenvalues();
      const int zeros = static_cast<int>((ev.array().abs() < 1e-9 * std::max(1.0, ev.maxCoeff())).count());
      EXPECT_EQ(zeros, r) << "d=" << d << " r=" << r;
      EXPECT_GE(ev.minCoeff(), -1e-10);
      EXPECT_EQ(K, K.transpose());
    }
  }
}

TEST(Difference, NullSpaceContainsPolynomials) {
  const int d = 12;
  for (int r = 1; r <= 4; ++r) {
    const auto K = difference_penalty(d, r).values;
    for (int p = 0; p < r; ++p) {
      Eigen::VectorXd g(d);
      for (int j = 0; j < d; ++j) g[j] = std::pow(j, p);
      EXPECT_LT((K * g).norm(), 1e-8 * g.norm());
    }
  }
}

TEST(Difference, RootReproducesPenalty) {
  for (int r = 0; r <= 3; ++r) {
    const auto K = difference_penalty(9, r);
    EXPECT_LT((K.root.transpose() * K.root - K.values).norm(), 1e-12);
  }
  const auto tp = tp_penalty(7, 2);
  EXPECT_LT((tp.root.transpose() * tp.root - tp.values).norm(), 1e-15);
}

TEST(Difference, OrderTooLarge) {
  try {
    difference_matrix(3, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrderTooLarge);
  }
}

TEST(TruncatedPowerRidge, Diagonal) {
  const auto K = tp_penalty(5, 1).values;
  Eigen::VectorXd expected(5);
  expected << 0, 0, 1, 1, 1;
  EXPECT_EQ(K, Eigen::MatrixXd(expected.asDiagonal()));
}

TEST(TruncatedPowerRidge, NoTruncatedTerms) {
  try {
    tp_penalty(3, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionTooSmall);
  }
}

TEST(Penalty, NoneIsZero) {
  EXPECT_EQ(build_penalty(PenaltySpec::none(), 4, 1).values, Eigen::MatrixXd::Zero(4, 4));
}
