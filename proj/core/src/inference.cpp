#include "splinefit/inference.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "splinefit/normal.hpp"
#include "splinefit/random.hpp"

namespace splinefit {

namespace {

Eigen::MatrixXd basis_rows(const FittedModel& model, std::span<const double> points) {
  const int d = model.basis.dimension();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(points.size()), d);
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (!model.basis.knots.contains(points[j])) {
      throw Error(ErrorCode::OutOfDomain,
                  "point " + std::to_string(j) + ": z = " + format_double(points[j]) + " outside [" +
                      format_double(model.basis.knots.lo()) + ", " + format_double(model.basis.knots.hi()) + "]",
                  j);
    }
    rows.row(static_cast<Eigen::Index>(j)) = basis_vector(points[j], model.basis).transpose();
  }
  return rows;
}

void check_request(const FittedModel& model, const PredictionRequest& request) {
  if (!(request.alpha > 0.0 && request.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  if (request.points.empty()) throw Error(ErrorCode::InvalidArgument, "no prediction points");
  if (!std::isfinite(model.sigma2)) {
    throw Error(ErrorCode::EdfExceedsN, "model has no residual degrees of freedom for sigma^2");
  }
}

BandResult scaled_band(const FittedModel& model, const PredictionRequest& request, BandKind kind,
                       double quantile) {
  const Eigen::MatrixXd rows = basis_rows(model, request.points);
  const Eigen::VectorXd estimate = rows * model.gamma;
  const Eigen::VectorXd factors = (rows * model.coef_kernel).cwiseProduct(rows).rowwise().sum();
  const double sigma = std::sqrt(model.sigma2);

  BandResult out;
  out.kind = kind;
  out.alpha = request.alpha;
  out.quantile = quantile;
  out.points.reserve(request.points.size());
  for (std::size_t j = 0; j < request.points.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    const double half = quantile * sigma * std::sqrt(std::max(factors[k], 0.0));
    out.points.push_back({request.points[j], estimate[k], half, estimate[k] - half, estimate[k] + half});
  }
  return out;
}

}  // namespace

std::string_view to_string(BandKind kind) {
  switch (kind) {
    case BandKind::Pointwise: return "pointwise";
    case BandKind::Bonferroni: return "bonferroni";
    case BandKind::Simulated: return "simulated";
  }
  return "unknown";
}

Eigen::VectorXd predict(const FittedModel& model, std::span<const double> points) {
  return basis_rows(model, points) * model.gamma;
}

Eigen::VectorXd variance_factors(const FittedModel& model, std::span<const double> points) {
  const Eigen::MatrixXd rows = basis_rows(model, points);
  return (rows * model.coef_kernel).cwiseProduct(rows).rowwise().sum();
}

Eigen::MatrixXd prediction_covariance(const FittedModel& model, std::span<const double> points) {
  const Eigen::MatrixXd rows = basis_rows(model, points);
  return model.sigma2 * rows * model.coef_kernel * rows.transpose();
}

BandResult pointwise_band(const FittedModel& model, const PredictionRequest& request) {
  check_request(model, request);
  return scaled_band(model, request, BandKind::Pointwise, normal_quantile(1.0 - request.alpha / 2.0));
}

BandResult bonferroni_band(const FittedModel& model, const PredictionRequest& request) {
  check_request(model, request);
  const double r = static_cast<double>(request.points.size());
  return scaled_band(model, request, BandKind::Bonferroni, normal_quantile(1.0 - request.alpha / (2.0 * r)));
}

double simulate_max_quantile(const Eigen::MatrixXd& covariance, double alpha, int draws, std::uint64_t seed,
                             double* clipped) {
  if (draws < 1000) throw Error(ErrorCode::InvalidArgument, "simulated bands need at least 1000 draws");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  const Eigen::Index r = covariance.rows();
  Eigen::VectorXd sd(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    if (!(covariance(j, j) > 0.0)) {
      throw Error(ErrorCode::DegenerateCovariance, "prediction variance is not positive at point " + std::to_string(j),
                  static_cast<std::size_t>(j));
    }
    sd[j] = std::sqrt(covariance(j, j));
  }
  Eigen::MatrixXd correlation = sd.cwiseInverse().asDiagonal() * covariance * sd.cwiseInverse().asDiagonal();
  correlation = 0.5 * (correlation + correlation.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation);
  Eigen::VectorXd values = eig.eigenvalues();
  const double most_negative = std::min(0.0, values.minCoeff());
  if (clipped) *clipped = -most_negative;
  values = values.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root = eig.eigenvectors() * values.asDiagonal();

  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> maxima(static_cast<std::size_t>(draws));
  Eigen::VectorXd xi(r);
  for (auto& m : maxima) {
    for (Eigen::Index j = 0; j < r; ++j) xi[j] = normal(rng);
    m = (root * xi).cwiseAbs().maxCoeff();
  }
  const auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * draws)) - 1;
  std::nth_element(maxima.begin(), maxima.begin() + static_cast<std::ptrdiff_t>(k), maxima.end());
  return maxima[k];
}

BandResult simulated_band(const FittedModel& model, const PredictionRequest& request) {
  check_request(model, request);
  const Eigen::MatrixXd covariance = prediction_covariance(model, request.points);
  double clipped = 0.0;
  const double m = simulate_max_quantile(covariance, request.alpha, request.draws, request.seed, &clipped);
  BandResult out = scaled_band(model, request, BandKind::Simulated, m);
  out.clipped = clipped;
  return out;
}

BandResult confidence_band(const FittedModel& model, const PredictionRequest& request) {
  switch (request.band) {
    case BandKind::Pointwise: return pointwise_band(model, request);
    case BandKind::Bonferroni: return bonferroni_band(model, request);
    case BandKind::Simulated: return simulated_band(model, request);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown band kind");
}

void write_band_csv(std::ostream& out, const BandResult& band) {
  out << "z,estimate,lower,upper,half_width,kind,alpha\n";
  const std::string kind(to_string(band.kind));
  const std::string alpha = format_double(band.alpha);
  for (const auto& p : band.points) {
    out << format_double(p.z) << ',' << format_double(p.estimate) << ',' << format_double(p.lower) << ','
        << format_double(p.upper) << ',' << format_double(p.half_width) << ',' << kind << ',' << alpha << '\n';
  }
}

}  // namespace splinefit
