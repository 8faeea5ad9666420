#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "splinefit/error.hpp"
#include "splinefit/fit.hpp"
#include "splinefit/inference.hpp"
#include "splinefit/normal.hpp"

using namespace splinefit;

namespace {

DataSet noisy_sine(int n, std::uint64_t seed, double sigma = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(0.0, sigma);
  std::vector<double> z(n), y(n);
  for (int i = 0; i < n; ++i) {
    z[i] = i / double(n - 1);
    y[i] = std::sin(2 * std::numbers::pi * z[i]) + e(rng);
  }
  return DataSet(z, y);
}

FittedModel pspline(const DataSet& data, int knots = 15, double lambda = 0.5) {
  FitConfig c;
  c.basis = make_basis(Family::BSpline, 3, data.z(), knots);
  c.penalty = PenaltySpec::difference(2);
  return fit_fixed(c, data, lambda);
}

std::vector<double> interior_points(int r) {
  std::vector<double> p(r);
  for (int j = 0; j < r; ++j) p[j] = (j + 0.5) / r;
  return p;
}

}  // namespace

// Reference quantiles computed with scipy.stats.norm.ppf.
TEST(Normal, QuantileReferenceValues) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.99875), 3.023341439739154, 1e-12);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-10);
  EXPECT_NEAR(normal_quantile(0.9999999), 5.199337582290661, 1e-10);
  EXPECT_NEAR(normal_quantile(0.02), -2.053748910631823, 1e-12);
  EXPECT_NEAR(normal_quantile(0.98), 2.053748910631823, 1e-12);
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(Normal, CdfInvertsQuantile) {
  for (double p = 0.001; p < 1.0; p += 0.0137) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14);
}

TEST(Predict, InSampleEqualsFitted) {
  const auto data = noisy_sine(60, 1);
  const auto m = pspline(data);
  const std::vector<double> pts(data.z().data(), data.z().data() + data.size());
  EXPECT_LT((predict(m, pts) - m.fitted).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Predict, ConstantResponse) {
  std::vector<double> z(40), y(40, 3.25);
  for (int i = 0; i < 40; ++i) z[i] = std::sqrt(i);
  const DataSet data(z, y);
  const std::vector<double> pts{0.0, 0.77, 2.5, std::sqrt(39.0)};
  for (double lambda : {0.0, 0.3, 1e5}) {
    for (int r : {1, 2, 3}) {
      FitConfig c;
      c.basis = make_basis(Family::BSpline, 3, data.z(), 7);
      c.penalty = PenaltySpec::difference(r);
      const auto p = predict(fit_fixed(c, data, lambda), pts);
      EXPECT_LT((p.array() - 3.25).abs().maxCoeff(), 1e-8);
    }
    FitConfig tp;
    tp.basis = make_basis(Family::TruncatedPower, 2, data.z(), 4);
    tp.penalty = PenaltySpec::tp_ridge();
    EXPECT_LT((predict(fit_fixed(tp, data, lambda), pts).array() - 3.25).abs().maxCoeff(), 1e-8);
  }
}

TEST(Predict, LinearInterpolationOnDenseLine) {
  std::vector<double> z(200), y(200);
  for (int i = 0; i < 200; ++i) {
    z[i] = i * 0.05;
    y[i] = 2.0 - 0.7 * z[i];
  }
  const DataSet data(z, y);
  for (int degree = 1; degree <= 3; ++degree) {
    FitConfig c;
    c.basis = make_basis(Family::BSpline, degree, data.z(), 12);
    c.penalty = PenaltySpec::none();
    const auto m = fit_fixed(c, data, 0.0);
    const std::vector<double> mid{0.025, 4.975, 9.925};
    const auto p = predict(m, mid);
    for (std::size_t k = 0; k < mid.size(); ++k) EXPECT_NEAR(p[k], 2.0 - 0.7 * mid[k], 1e-6);
  }
}

TEST(Predict, OutOfDomainCarriesIndex) {
  const auto m = pspline(noisy_sine(30, 2));
  const std::vector<double> pts{0.5, 0.2, 1.5};
  try {
    predict(m, pts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 2u);
  }
}

TEST(Bands, PointwiseQuantileAndShape) {
  const auto m = pspline(noisy_sine(80, 3));
  PredictionRequest req;
  req.points = interior_points(10);
  const auto band = pointwise_band(m, req);
  EXPECT_NEAR(band.quantile, 1.959964, 1e-6);
  const auto vf = variance_factors(m, req.points);
  for (std::size_t j = 0; j < band.points.size(); ++j) {
    const auto& p = band.points[j];
    EXPECT_LE(p.lower, p.estimate);
    EXPECT_LE(p.estimate, p.upper);
    EXPECT_NEAR(p.half_width, band.quantile * std::sqrt(m.sigma2 * vf[j]), 1e-12);
    EXPECT_NEAR(p.upper - p.estimate, p.half_width, 1e-12);
  }
}

TEST(Bands, VarianceFactorMatchesCovarianceDiagonal) {
  const auto m = pspline(noisy_sine(80, 4));
  const auto pts = interior_points(7);
  const auto cov = prediction_covariance(m, pts);
  const auto vf = variance_factors(m, pts);
  for (int j = 0; j < 7; ++j) EXPECT_NEAR(cov(j, j), m.sigma2 * vf[j], 1e-12 * std::max(1.0, cov(j, j)));
  EXPECT_LT((cov - cov.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Bands, VarianceFactorIsSmootherRowNorm) {
  // s(z) = Z (Z'Z + lambda K)^{-1} b(z): check s(z)'s(z) against the explicit row.
  const auto data = noisy_sine(50, 5);
  FitConfig c;
  c.basis = make_basis(Family::BSpline, 2, data.z(), 8);
  c.penalty = PenaltySpec::difference(1);
  const auto m = fit_fixed(c, data, 2.0);
  const auto Z = design_matrix(data.z(), c.basis).values;
  const auto K = difference_penalty(c.basis.dimension(), 1).values;
  const Eigen::MatrixXd M = Z.transpose() * Z + 2.0 * K;
  const double z0 = 0.41;
  const Eigen::VectorXd s = Z * M.fullPivLu().solve(basis_vector(z0, c.basis));
  const std::vector<double> pts{z0};
  EXPECT_NEAR(variance_factors(m, pts)[0], s.squaredNorm(), 1e-12);
}

TEST(Bands, NearPerfectFitHasNarrowBand) {
  std::vector<double> z(50), y(50);
  for (int i = 0; i < 50; ++i) {
    z[i] = i / 49.0;
    y[i] = 1.0 + z[i] + ((i % 2) ? 1e-9 : -1e-9);
  }
  const auto m = pspline(DataSet(z, y), 8, 1.0);
  PredictionRequest req;
  req.points = interior_points(5);
  for (const auto& p : pointwise_band(m, req).points) EXPECT_LT(p.half_width, 1e-8);
}

TEST(Bands, BonferroniSinglePointEqualsPointwise) {
  const auto m = pspline(noisy_sine(60, 6));
  PredictionRequest req;
  req.points = {0.37};
  const auto a = pointwise_band(m, req);
  const auto b = bonferroni_band(m, req);
  EXPECT_EQ(a.quantile, b.quantile);
  EXPECT_EQ(a.points[0].half_width, b.points[0].half_width);
}

TEST(Bands, BonferroniQuantileGrowsWithPoints) {
  const auto m = pspline(noisy_sine(60, 7));
  PredictionRequest req;
  req.points = interior_points(20);
  EXPECT_NEAR(bonferroni_band(m, req).quantile, 3.023341439739154, 1e-10);
  double previous = 0.0;
  for (int r : {1, 2, 5, 10, 40}) {
    req.points = std::vector<double>(r, 0.5);
    const double hw = bonferroni_band(m, req).points[0].half_width;
    EXPECT_GT(hw, previous);
    previous = hw;
  }
}

TEST(Bands, SimulatedSinglePointConverges) {
  Eigen::MatrixXd cov(1, 1);
  cov << 2.5;
  EXPECT_NEAR(simulate_max_quantile(cov, 0.05, 100000, 42), 1.959964, 0.03);
}

TEST(Bands, Nesting) {
  const auto m = pspline(noisy_sine(100, 8));
  PredictionRequest req;
  req.points = interior_points(20);
  req.draws = 20000;
  const auto pw = pointwise_band(m, req);
  const auto bf = bonferroni_band(m, req);
  const auto sim = simulated_band(m, req);
  EXPECT_GE(sim.quantile, pw.quantile - 0.05);
  EXPECT_LE(sim.quantile, bf.quantile + 0.05);
  for (std::size_t j = 0; j < req.points.size(); ++j) {
    EXPECT_NEAR(sim.points[j].half_width / pw.points[j].half_width, sim.quantile / pw.quantile, 1e-12);
  }
}

TEST(Bands, SimulatedReproducible) {
  const auto m = pspline(noisy_sine(70, 9));
  PredictionRequest req;
  req.points = interior_points(12);
  req.band = BandKind::Simulated;
  req.seed = 7;
  const auto a = confidence_band(m, req);
  const auto b = confidence_band(m, req);
  EXPECT_EQ(a.quantile, b.quantile);
  req.seed = 8;
  EXPECT_NE(confidence_band(m, req).quantile, a.quantile);
}

TEST(Bands, SimulatedNeedsEnoughDraws) {
  const auto m = pspline(noisy_sine(70, 10));
  PredictionRequest req;
  req.points = interior_points(3);
  req.draws = 999;
  try {
    simulated_band(m, req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Bands, DegenerateCovariance) {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
  cov(1, 1) = 0.0;
  try {
    simulate_max_quantile(cov, 0.05, 1000, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateCovariance);
  }
}

TEST(Bands, PointwiseCoverage) {
  // Smaller version of the acceptance check: 200 replicates at one interior point.
  std::mt19937_64 rng(99);
  std::normal_distribution<double> e(0.0, 1.0);
  const auto truth = [](double z) { return 2.0 * std::sin(2 * std::numbers::pi * z); };
  int covered = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> z(100), y(100);
    for (int i = 0; i < 100; ++i) {
      z[i] = i / 99.0;
      y[i] = truth(z[i]) + e(rng);
    }
    const DataSet data(z, y);
    FitConfig c;
    c.basis = make_basis(Family::BSpline, 3, data.z(), 10);
    c.penalty = PenaltySpec::difference(2);
    const auto m = select_lambda(c, data, Criterion::GCV);
    PredictionRequest req;
    req.points = {0.4};
    const auto p = pointwise_band(m, req).points[0];
    if (p.lower <= truth(0.4) && truth(0.4) <= p.upper) ++covered;
  }
  EXPECT_GE(covered, static_cast<int>(0.88 * reps));
  EXPECT_LE(covered, static_cast<int>(0.995 * reps));
}
