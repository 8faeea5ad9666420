#include "splinefit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace splinefit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kJitterScale = 1e-10;
constexpr double kLeverageCeiling = 1.0 - 1e-12;

double rcond_threshold(Eigen::Index d) {
  return static_cast<double>(std::max<Eigen::Index>(d, 1)) * std::numeric_limits<double>::epsilon();
}

Eigen::VectorXd diagonal_scaling(const Eigen::VectorXd& diag) {
  Eigen::VectorXd scale(diag.size());
  for (Eigen::Index j = 0; j < diag.size(); ++j) scale[j] = diag[j] > 0.0 ? 1.0 / std::sqrt(diag[j]) : 1.0;
  return scale;
}

bool factor_normal(const Eigen::MatrixXd& scaled, Eigen::MatrixXd& lower, double& rcond) {
  Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) return false;
  rcond = llt.rcond();
  if (!llt.matrixLLT().allFinite()) return false;
  if (!(rcond > rcond_threshold(scaled.rows()))) return false;
  lower = llt.matrixL();
  return true;
}

bool factor_augmented(const Eigen::MatrixXd& stacked, Eigen::MatrixXd& lower, double& rcond) {
  const Eigen::Index d = stacked.cols();
  if (stacked.rows() < d) return false;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const Eigen::VectorXd diag = r.diagonal().cwiseAbs();
  const double hi = diag.maxCoeff();
  const double lo = diag.minCoeff();
  if (!(hi > 0.0) || !std::isfinite(hi)) return false;
  rcond = (lo / hi) * (lo / hi);
  if (!(rcond > rcond_threshold(d))) return false;
  // R'R is the scaled system; keep L = R' with a positive diagonal.
  lower = r.transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (lower(j, j) < 0.0) lower.col(j) = -lower.col(j);
  }
  return true;
}

std::string singular_message(double lambda) {
  return "Z'Z + lambda K is singular at lambda = " + format_double(lambda) + " after jitter";
}

struct Assembled {
  Eigen::MatrixXd Z;
  PenaltyMatrix K;
};

Assembled assemble(const FitConfig& config, const DataSet& data) {
  Assembled a{design_matrix(data.z(), config.basis).values, {}};
  a.K = build_penalty(config.penalty, config.basis.dimension(), config.basis.degree);
  return a;
}

FittedModel fit_assembled(const FitConfig& config, const Assembled& a, const DataSet& data, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be finite and non-negative");
  }
  const PlsSystem system(a.Z, a.K, lambda, config.solver);
  const Eigen::MatrixXd influence = system.solve(a.Z.transpose());

  FittedModel m;
  m.basis = config.basis;
  m.penalty = config.penalty;
  m.lambda = lambda;
  m.z = data.z();
  m.y = data.y();
  m.gamma = influence * m.y;
  m.fitted = a.Z * m.gamma;
  m.hat_diag = (a.Z.array() * influence.transpose().array()).rowwise().sum();
  m.edf = edf(m.hat_diag);
  const Eigen::MatrixXd S = a.Z * influence;
  m.edf_exact = 2.0 * S.trace() - S.squaredNorm();
  m.criteria = evaluate_criteria(m.y, m.fitted, m.hat_diag);
  const double denom = static_cast<double>(m.n()) - m.edf;
  m.sigma2 = denom > 1e-9 * static_cast<double>(m.n()) ? m.criteria.rss / denom : kNaN;
  m.coef_kernel = influence * influence.transpose();
  m.solve = system.info();
  return m;
}

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "lambda grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0) || !std::isfinite(grid[k])) {
      throw Error(ErrorCode::InvalidArgument, "lambda grid values must be finite and non-negative", k);
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "lambda grid must be strictly increasing", k);
    }
  }
}

}  // namespace

std::string_view to_string(Solver solver) {
  return solver == Solver::NormalEquations ? "normal" : "augmented";
}

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::LOOCV: return "loocv";
    case Criterion::GCV: return "gcv";
    case Criterion::AIC: return "aic";
  }
  return "unknown";
}

PlsSystem::PlsSystem(const Eigen::MatrixXd& Z, const PenaltyMatrix& K, double lambda, Solver solver) {
  const Eigen::Index d = Z.cols();
  if (K.values.rows() != d || K.values.cols() != d || K.root.cols() != d) {
    throw Error(ErrorCode::LengthMismatch, "penalty dimension does not match the design matrix");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be finite and non-negative");
  }
  info_.solver = solver;

  if (solver == Solver::NormalEquations) {
    const Eigen::MatrixXd system = Z.transpose() * Z + lambda * K.values;
    if (!system.allFinite()) throw Error(ErrorCode::SingularSystem, "Z'Z + lambda K has non-finite entries");
    scale_ = diagonal_scaling(system.diagonal());
    Eigen::MatrixXd scaled = scale_.asDiagonal() * system * scale_.asDiagonal();
    if (!factor_normal(scaled, lower_, info_.rcond)) {
      info_.jittered = true;
      info_.jitter = kJitterScale * scaled.trace() / static_cast<double>(d);
      scaled.diagonal().array() += info_.jitter;
      if (!factor_normal(scaled, lower_, info_.rcond)) throw Error(ErrorCode::SingularSystem, singular_message(lambda));
    }
  } else {
    Eigen::MatrixXd stacked(Z.rows() + K.root.rows(), d);
    stacked << Z, std::sqrt(lambda) * K.root;
    if (!stacked.allFinite()) throw Error(ErrorCode::SingularSystem, "design or penalty has non-finite entries");
    scale_ = diagonal_scaling(stacked.colwise().squaredNorm().transpose());
    stacked = stacked * scale_.asDiagonal();
    if (!factor_augmented(stacked, lower_, info_.rcond)) {
      info_.jittered = true;
      info_.jitter = kJitterScale * stacked.squaredNorm() / static_cast<double>(d);
      Eigen::MatrixXd padded(stacked.rows() + d, d);
      padded << stacked, std::sqrt(info_.jitter) * Eigen::MatrixXd::Identity(d, d);
      if (!factor_augmented(padded, lower_, info_.rcond)) throw Error(ErrorCode::SingularSystem, singular_message(lambda));
    }
  }
}

Eigen::MatrixXd PlsSystem::solve(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd x = scale_.asDiagonal() * rhs;
  lower_.triangularView<Eigen::Lower>().solveInPlace(x);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return scale_.asDiagonal() * x;
}

PlsSolution solve_pls(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const PenaltyMatrix& K, double lambda,
                      Solver solver) {
  if (Z.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "design rows do not match the response length");
  const PlsSystem system(Z, K, lambda, solver);
  PlsSolution out;
  out.influence = system.solve(Z.transpose());
  out.gamma = out.influence * y;
  out.info = system.info();
  return out;
}

Eigen::MatrixXd smoothing_matrix(const Eigen::MatrixXd& Z, const PenaltyMatrix& K, double lambda, Solver solver) {
  const PlsSystem system(Z, K, lambda, solver);
  return Z * system.solve(Z.transpose());
}

double edf(const Eigen::VectorXd& hat_diag) { return hat_diag.sum(); }

double edf_from_matrix(const Eigen::MatrixXd& S) { return S.trace(); }

double residual_sum_of_squares(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted) {
  if (y.size() != fitted.size()) throw Error(ErrorCode::LengthMismatch, "response and fitted lengths differ");
  return (y - fitted).squaredNorm();
}

double sigma2_hat(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, double edf_value) {
  const double n = static_cast<double>(y.size());
  if (!(n - edf_value > 1e-9 * n)) {
    throw Error(ErrorCode::EdfExceedsN, "edf " + format_double(edf_value) + " leaves no residual degrees of freedom");
  }
  return residual_sum_of_squares(y, fitted) / (n - edf_value);
}

double loocv(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, const Eigen::VectorXd& hat_diag) {
  if (y.size() != fitted.size() || y.size() != hat_diag.size()) {
    throw Error(ErrorCode::LengthMismatch, "loocv inputs differ in length");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(hat_diag[i] < kLeverageCeiling)) {
      throw Error(ErrorCode::LeverageOne, "observation " + std::to_string(i) + " has leverage " +
                                              format_double(hat_diag[i]), static_cast<std::size_t>(i));
    }
    const double r = (y[i] - fitted[i]) / (1.0 - hat_diag[i]);
    sum += r * r;
  }
  return sum / static_cast<double>(y.size());
}

double gcv(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, double edf_value) {
  const double n = static_cast<double>(y.size());
  if (!(n - edf_value > 1e-9 * n)) {
    throw Error(ErrorCode::EdfExceedsN, "edf " + format_double(edf_value) + " leaves no residual degrees of freedom");
  }
  return n * residual_sum_of_squares(y, fitted) / ((n - edf_value) * (n - edf_value));
}

double aic(double sigma2, double edf_value, std::size_t n) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::ZeroVariance, "sigma^2 estimate is not positive");
  return static_cast<double>(n) * std::log(sigma2) + 2.0 * (edf_value + 1.0);
}

double bic(double sigma2, double edf_value, std::size_t n) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::ZeroVariance, "sigma^2 estimate is not positive");
  const double nn = static_cast<double>(n);
  return nn * std::log(sigma2) + std::log(nn) * (edf_value + 1.0);
}

CriteriaBundle evaluate_criteria(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                                 const Eigen::VectorXd& hat_diag) {
  CriteriaBundle c;
  const std::size_t n = static_cast<std::size_t>(y.size());
  const double e = edf(hat_diag);
  c.rss = residual_sum_of_squares(y, fitted);

  const double sum_sq = y.squaredNorm();
  const double centered = (y.array() - y.mean()).matrix().squaredNorm();
  c.r2 = sum_sq > 0.0 ? 1.0 - c.rss / sum_sq : kNaN;
  c.r2_centered = centered > 0.0 ? 1.0 - c.rss / centered : kNaN;

  auto note = [&c](ErrorCode code) {
    if (std::find(c.undefined.begin(), c.undefined.end(), code) == c.undefined.end()) c.undefined.push_back(code);
  };

  try {
    c.cvmspe = loocv(y, fitted, hat_diag);
    c.press = c.cvmspe * static_cast<double>(n);
  } catch (const Error& err) {
    note(err.code());
    c.cvmspe = c.press = kNaN;
  }

  try {
    c.gcv = gcv(y, fitted, e);
    const double s2 = sigma2_hat(y, fitted, e);
    c.aic = aic(s2, e, n);
    c.bic = bic(s2, e, n);
  } catch (const Error& err) {
    note(err.code());
    if (err.code() == ErrorCode::EdfExceedsN) c.gcv = kNaN;
    c.aic = c.bic = kNaN;
  }
  return c;
}

double criterion_value(const CriteriaBundle& criteria, Criterion criterion) {
  switch (criterion) {
    case Criterion::LOOCV: return criteria.cvmspe;
    case Criterion::GCV: return criteria.gcv;
    case Criterion::AIC: return criteria.aic;
  }
  return kNaN;
}

std::vector<double> log_lambda_grid(double lo, double hi, int count, bool include_zero) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw Error(ErrorCode::InvalidArgument, "log grid needs 0 < lo < hi and at least two points");
  }
  std::vector<double> grid;
  if (include_zero) grid.push_back(0.0);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < count; ++k) grid.push_back(std::pow(10.0, a + (b - a) * k / (count - 1)));
  return grid;
}

std::vector<double> default_lambda_grid() { return log_lambda_grid(1e-4, 1e4, 41, true); }

FittedModel fit_fixed(const FitConfig& config, const DataSet& data, double lambda) {
  return fit_assembled(config, assemble(config, data), data, lambda);
}

FittedModel select_lambda(const FitConfig& config, const DataSet& data, Criterion criterion) {
  validate_grid(config.lambda_grid);
  const Assembled a = assemble(config, data);
  const double tie_floor = 1e-12 * data.y().squaredNorm() / static_cast<double>(data.size());

  std::vector<LambdaTrial> trace;
  std::optional<FittedModel> best;
  double best_value = 0.0;
  for (const double lambda : config.lambda_grid) {
    LambdaTrial trial;
    trial.lambda = lambda;
    trial.value = kNaN;
    try {
      FittedModel m = fit_assembled(config, a, data, lambda);
      trial.edf = m.edf;
      trial.value = criterion_value(m.criteria, criterion);
      if (std::isnan(trial.value)) {
        trial.error = m.criteria.undefined.empty() ? ErrorCode::InvalidArgument : m.criteria.undefined.front();
      } else {
        const double tol = 1e-9 * std::max(std::abs(trial.value), std::abs(best_value)) + tie_floor;
        // Ascending grid: a value within tol of the running minimum moves the
        // choice to the larger lambda.
        if (!best || trial.value <= best_value + tol) {
          best_value = best ? std::min(best_value, trial.value) : trial.value;
          best = std::move(m);
        }
      }
    } catch (const Error& err) {
      trial.error = err.code();
    }
    trace.push_back(trial);
  }

  if (!best) {
    std::string codes;
    for (const auto& t : trace) {
      if (t.error && codes.find(error_name(*t.error)) == std::string::npos) {
        codes += (codes.empty() ? "" : ", ") + std::string(error_name(*t.error));
      }
    }
    throw Error(ErrorCode::NoSuccessfulFits, "every lambda failed (" + codes + ")");
  }
  best->selected_by = criterion;
  best->trace = std::move(trace);
  return *std::move(best);
}

FittedModel fit(const FitConfig& config, const DataSet& data) {
  if (const auto* criterion = std::get_if<Criterion>(&config.lambda)) {
    return select_lambda(config, data, *criterion);
  }
  FittedModel m = fit_fixed(config, data, std::get<double>(config.lambda));
  m.trace.push_back({m.lambda, m.edf, kNaN, std::nullopt});
  return m;
}

}  // namespace splinefit
