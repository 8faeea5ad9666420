#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splinefit/basis.hpp"
#include "splinefit/dataset.hpp"
#include "splinefit/fit.hpp"

namespace splinefit {

// PSpline is a B-spline basis with a difference penalty and a selected lambda.
enum class ModelFamily { TruncatedPower, BSpline, PSpline };

std::string_view to_string(ModelFamily family);
std::optional<ModelFamily> parse_model_family(std::string_view text);

struct GridSpec {
  ModelFamily family = ModelFamily::PSpline;
  std::vector<int> degrees;
  std::vector<int> knot_counts;
  std::vector<int> diff_orders;      // PSpline only; 0 is a ridge on all coefficients
  bool orders_below_degree = false;  // PSpline: skip cells with order >= degree
  bool nested_knots = false;         // knot counts must refine each other (K+1 divides K'+1)
  double fraction = 0.8;
  std::uint64_t seed = 42;
  SplitMode split_mode = SplitMode::Random;
  Criterion select = Criterion::GCV;
  std::vector<double> lambda_grid = default_lambda_grid();
  KnotPlacement placement = KnotPlacement::Equidistant;
  Solver solver = Solver::NormalEquations;
};

// "tp-table2", "bspline-table3" or "pspline-table4"; throws InvalidArgument otherwise.
GridSpec preset_grid(std::string_view name);
std::vector<std::string> preset_names();

struct GridRow {
  ModelFamily family = ModelFamily::PSpline;
  int degree = 0;
  int knots = 0;
  std::optional<int> diff_order;
  double params = 0.0;  // basis dimension, or edf for penalized fits
  double lambda = 0.0;
  double edf = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double r2 = 0.0;
  double press = 0.0;
  double cvmspe = 0.0;    // training data
  double mse_test = 0.0;  // held-out points inside the training domain
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_test_excluded = 0;
  std::string status = "ok";  // error name when the cell failed
  std::string notes;          // ';'-separated names of undefined criteria

  bool ok() const noexcept { return status == "ok"; }
};

struct GridReport {
  std::vector<GridRow> rows;  // sorted by (degree, knots, order)
};

enum class ReportCriterion { AIC, BIC, R2, PRESS, CVMSPE, MSETest };

std::string_view to_string(ReportCriterion criterion);
std::optional<ReportCriterion> parse_report_criterion(std::string_view text);

// Training criteria never read the test part of the split.
GridReport run_grid(const GridSpec& spec, const DataSet& data);
GridReport run_grid(const GridSpec& spec, const SplitDataSet& split);

GridReport merge_reports(std::span<const GridReport> reports);

// Best successful row for one criterion (largest R2, smallest otherwise).
std::optional<std::size_t> argbest(const GridReport& report, ReportCriterion criterion);

// Lexicographic minimum over the priority list; ties go to fewer parameters,
// then the smaller degree. Throws NoSuccessfulFits.
std::size_t best_model(const GridReport& report, std::span<const ReportCriterion> priority);
std::size_t best_model(const GridReport& report);  // [cvmspe, mse_test, aic]

}  // namespace splinefit
