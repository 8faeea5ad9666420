#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "splinefit/fit.hpp"

namespace splinefit {

enum class BandKind { Pointwise, Bonferroni, Simulated };

std::string_view to_string(BandKind kind);

struct PredictionRequest {
  std::vector<double> points;
  double alpha = 0.05;
  BandKind band = BandKind::Pointwise;
  int draws = 10000;  // Simulated only, at least 1000
  std::uint64_t seed = 42;
};

struct BandPoint {
  double z;
  double estimate;
  double half_width;
  double lower;
  double upper;
};

struct BandResult {
  BandKind kind = BandKind::Pointwise;
  double alpha = 0.05;
  // z_{1-a/2}, z_{1-a/(2r)} or the simulated quantile of the max statistic.
  double quantile = 0.0;
  std::vector<BandPoint> points;
  // Simulated only: magnitude of the most negative eigenvalue clipped from the
  // correlation matrix before sampling.
  double clipped = 0.0;
};

// f(z) = b(z)' gamma; throws OutOfDomain (with the point index) outside [lo, hi].
Eigen::VectorXd predict(const FittedModel& model, std::span<const double> points);

// s(z)'s(z) for each point, so Var f(z) = sigma^2 s(z)'s(z).
Eigen::VectorXd variance_factors(const FittedModel& model, std::span<const double> points);

// sigma^2 S_r S_r' for the requested points.
Eigen::MatrixXd prediction_covariance(const FittedModel& model, std::span<const double> points);

BandResult pointwise_band(const FittedModel& model, const PredictionRequest& request);
BandResult bonferroni_band(const FittedModel& model, const PredictionRequest& request);
BandResult simulated_band(const FittedModel& model, const PredictionRequest& request);
BandResult confidence_band(const FittedModel& model, const PredictionRequest& request);

// Quantile of max_j |e_j| for e ~ N(0, correlation); exposed for testing.
double simulate_max_quantile(const Eigen::MatrixXd& covariance, double alpha, int draws, std::uint64_t seed,
                             double* clipped = nullptr);

void write_band_csv(std::ostream& out, const BandResult& band);

}  // namespace splinefit
