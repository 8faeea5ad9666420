#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "splinefit/basis.hpp"
#include "splinefit/dataset.hpp"
#include "splinefit/error.hpp"
#include "splinefit/penalty.hpp"

namespace splinefit {

// NormalEquations factors Z'Z + lambda K by Cholesky after symmetric diagonal
// scaling. Augmented runs Householder QR on [Z; sqrt(lambda) E] with K = E'E.
enum class Solver { NormalEquations, Augmented };

enum class Criterion { LOOCV, GCV, AIC };

std::string_view to_string(Solver solver);
std::string_view to_string(Criterion criterion);

struct SolveInfo {
  Solver solver = Solver::NormalEquations;
  bool jittered = false;
  double jitter = 0.0;  // added to the scaled diagonal
  double rcond = 0.0;   // reciprocal condition estimate of the scaled system
};

// One factorization of Z'Z + lambda K, reused for coefficients, hat values and
// prediction variances.
class PlsSystem {
 public:
  // Throws SingularSystem if the system stays singular after one jitter retry.
  PlsSystem(const Eigen::MatrixXd& Z, const PenaltyMatrix& K, double lambda,
            Solver solver = Solver::NormalEquations);

  // (Z'Z + lambda K)^{-1} rhs
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  const SolveInfo& info() const noexcept { return info_; }
  int dimension() const noexcept { return static_cast<int>(scale_.size()); }

 private:
  Eigen::VectorXd scale_;
  Eigen::MatrixXd lower_;  // L with L L' = scaled system
  SolveInfo info_;
};

struct PlsSolution {
  Eigen::VectorXd gamma;
  Eigen::MatrixXd influence;  // (Z'Z + lambda K)^{-1} Z', d x n; fitted = Z * influence * y
  SolveInfo info;
};

PlsSolution solve_pls(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const PenaltyMatrix& K,
                      double lambda, Solver solver = Solver::NormalEquations);

// S = Z (Z'Z + lambda K)^{-1} Z'
Eigen::MatrixXd smoothing_matrix(const Eigen::MatrixXd& Z, const PenaltyMatrix& K, double lambda,
                                 Solver solver = Solver::NormalEquations);

double edf(const Eigen::VectorXd& hat_diag);
double edf_from_matrix(const Eigen::MatrixXd& S);

double residual_sum_of_squares(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted);

// RSS / (n - edf); throws EdfExceedsN when n <= edf.
double sigma2_hat(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, double edf);

// Mean squared leave-one-out residual from the hat diagonal; throws LeverageOne.
double loocv(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, const Eigen::VectorXd& hat_diag);

// n RSS / (n - edf)^2
double gcv(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, double edf);

// n log(sigma2) + 2 (edf + 1); throws ZeroVariance when sigma2 <= 0.
double aic(double sigma2, double edf, std::size_t n);
// n log(sigma2) + log(n) (edf + 1)
double bic(double sigma2, double edf, std::size_t n);

struct CriteriaBundle {
  double aic = 0.0;
  double bic = 0.0;
  double r2 = 0.0;           // 1 - RSS / sum(y^2)
  double r2_centered = 0.0;  // 1 - RSS / sum((y - mean)^2)
  double press = 0.0;
  double cvmspe = 0.0;       // press / n
  double gcv = 0.0;
  double rss = 0.0;
  // Criteria that are undefined for this fit are NaN, with the reason listed here.
  std::vector<ErrorCode> undefined;
};

CriteriaBundle evaluate_criteria(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                                 const Eigen::VectorXd& hat_diag);

double criterion_value(const CriteriaBundle& criteria, Criterion criterion);

// 0 followed by 41 log-spaced values from 1e-4 to 1e4.
std::vector<double> default_lambda_grid();
std::vector<double> log_lambda_grid(double lo, double hi, int count, bool include_zero);

struct FitConfig {
  BasisSpec basis;
  PenaltySpec penalty;
  std::variant<double, Criterion> lambda = 0.0;
  std::vector<double> lambda_grid = default_lambda_grid();
  Solver solver = Solver::NormalEquations;
};

struct LambdaTrial {
  double lambda = 0.0;
  double edf = 0.0;
  double value = 0.0;  // selection criterion, NaN when undefined
  std::optional<ErrorCode> error;
};

struct FittedModel {
  BasisSpec basis;
  PenaltySpec penalty;
  double lambda = 0.0;
  std::optional<Criterion> selected_by;
  std::vector<LambdaTrial> trace;

  Eigen::VectorXd z;  // training covariate
  Eigen::VectorXd y;  // training response
  Eigen::VectorXd gamma;
  Eigen::VectorXd fitted;
  Eigen::VectorXd hat_diag;
  double edf = 0.0;
  double edf_exact = 0.0;  // tr(2S - SS')
  double sigma2 = 0.0;     // NaN when n <= edf
  CriteriaBundle criteria;

  // V = (Z'Z + lambda K)^{-1} Z'Z (Z'Z + lambda K)^{-1}, so s(z)'s(z) = b(z)' V b(z).
  Eigen::MatrixXd coef_kernel;
  SolveInfo solve;

  std::size_t n() const noexcept { return static_cast<std::size_t>(y.size()); }
  Eigen::VectorXd residuals() const { return y - fitted; }
};

FittedModel fit_fixed(const FitConfig& config, const DataSet& data, double lambda);

// Fits every grid value and keeps the minimizer of the criterion; ties go to
// the larger lambda.
FittedModel select_lambda(const FitConfig& config, const DataSet& data, Criterion criterion);

// Dispatches on config.lambda.
FittedModel fit(const FitConfig& config, const DataSet& data);

}  // namespace splinefit
