#include "splinefit/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "splinefit/error.hpp"
#include "splinefit/inference.hpp"

namespace splinefit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> sorted_unique(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

void check_nested(const std::vector<int>& knots) {
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if ((knots[k] + 1) % (knots[k - 1] + 1) != 0) {
      throw Error(ErrorCode::InvalidArgument, "knot counts " + std::to_string(knots[k - 1]) + " and " +
                                                  std::to_string(knots[k]) + " are not nested", k);
    }
  }
}

struct Cell {
  int degree;
  int knots;
  std::optional<int> order;
};

std::vector<Cell> enumerate_cells(const GridSpec& spec) {
  const auto degrees = sorted_unique(spec.degrees);
  const auto knots = sorted_unique(spec.knot_counts);
  const auto orders = sorted_unique(spec.diff_orders);
  if (degrees.empty() || knots.empty() || (spec.family == ModelFamily::PSpline && orders.empty())) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least one degree, knot count and (for P-splines) order");
  }
  if (degrees.front() < 0 || knots.front() < 0 || (!orders.empty() && orders.front() < 0)) {
    throw Error(ErrorCode::InvalidArgument, "grid values must be non-negative");
  }
  if (spec.nested_knots) check_nested(knots);

  std::vector<Cell> cells;
  for (const int degree : degrees) {
    for (const int k : knots) {
      if (spec.family != ModelFamily::PSpline) {
        cells.push_back({degree, k, std::nullopt});
        continue;
      }
      for (const int r : orders) {
        if (spec.orders_below_degree && r >= degree) continue;
        cells.push_back({degree, k, r});
      }
    }
  }
  if (cells.empty()) throw Error(ErrorCode::InvalidArgument, "grid has no cells");
  return cells;
}

GridRow run_cell(const GridSpec& spec, const Cell& cell, const SplitDataSet& split) {
  GridRow row;
  row.family = spec.family;
  row.degree = cell.degree;
  row.knots = cell.knots;
  row.diff_order = cell.order;
  row.n_train = split.train.size();
  row.n_test = split.test.size();
  row.params = row.lambda = row.edf = kNaN;
  row.aic = row.bic = row.r2 = row.press = row.cvmspe = row.mse_test = kNaN;

  try {
    FitConfig config;
    const Family basis_family =
        spec.family == ModelFamily::TruncatedPower ? Family::TruncatedPower : Family::BSpline;
    config.basis = make_basis(basis_family, cell.degree, split.train.z(), cell.knots, spec.placement);
    config.solver = spec.solver;
    if (spec.family == ModelFamily::PSpline) {
      config.penalty = PenaltySpec::difference(*cell.order);
      config.lambda = spec.select;
      config.lambda_grid = spec.lambda_grid;
    } else {
      config.penalty = PenaltySpec::none();
      config.lambda = 0.0;
    }
    const FittedModel model = fit(config, split.train);

    row.params = spec.family == ModelFamily::PSpline ? model.edf : config.basis.dimension();
    row.lambda = model.lambda;
    row.edf = model.edf;
    row.aic = model.criteria.aic;
    row.bic = model.criteria.bic;
    row.r2 = model.criteria.r2;
    row.press = model.criteria.press;
    row.cvmspe = model.criteria.cvmspe;
    for (const ErrorCode code : model.criteria.undefined) {
      row.notes += (row.notes.empty() ? "" : ";") + std::string(error_name(code));
    }

    std::vector<double> inside;
    std::vector<double> response;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      const double z = split.test.z()[static_cast<Eigen::Index>(i)];
      if (config.basis.knots.contains(z)) {
        inside.push_back(z);
        response.push_back(split.test.y()[static_cast<Eigen::Index>(i)]);
      }
    }
    row.n_test_excluded = split.test.size() - inside.size();
    if (!inside.empty()) {
      const Eigen::VectorXd predicted = predict(model, inside);
      const Eigen::Map<const Eigen::VectorXd> observed(response.data(), static_cast<Eigen::Index>(response.size()));
      row.mse_test = (observed - predicted).squaredNorm() / static_cast<double>(inside.size());
    }
  } catch (const Error& err) {
    row.status = std::string(err.name());
  }
  return row;
}

double oriented(const GridRow& row, ReportCriterion criterion) {
  double v = kNaN;
  switch (criterion) {
    case ReportCriterion::AIC: v = row.aic; break;
    case ReportCriterion::BIC: v = row.bic; break;
    case ReportCriterion::R2: v = -row.r2; break;
    case ReportCriterion::PRESS: v = row.press; break;
    case ReportCriterion::CVMSPE: v = row.cvmspe; break;
    case ReportCriterion::MSETest: v = row.mse_test; break;
  }
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::TruncatedPower: return "tp";
    case ModelFamily::BSpline: return "bspline";
    case ModelFamily::PSpline: return "pspline";
  }
  return "unknown";
}

std::optional<ModelFamily> parse_model_family(std::string_view text) {
  if (text == "tp") return ModelFamily::TruncatedPower;
  if (text == "bspline") return ModelFamily::BSpline;
  if (text == "pspline") return ModelFamily::PSpline;
  return std::nullopt;
}

std::string_view to_string(ReportCriterion criterion) {
  switch (criterion) {
    case ReportCriterion::AIC: return "aic";
    case ReportCriterion::BIC: return "bic";
    case ReportCriterion::R2: return "r2";
    case ReportCriterion::PRESS: return "press";
    case ReportCriterion::CVMSPE: return "cvmspe";
    case ReportCriterion::MSETest: return "mse_test";
  }
  return "unknown";
}

std::optional<ReportCriterion> parse_report_criterion(std::string_view text) {
  for (const auto c : {ReportCriterion::AIC, ReportCriterion::BIC, ReportCriterion::R2, ReportCriterion::PRESS,
                       ReportCriterion::CVMSPE, ReportCriterion::MSETest}) {
    if (text == to_string(c)) return c;
  }
  if (text == "mse") return ReportCriterion::MSETest;
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"tp-table2", "bspline-table3", "pspline-table4"}; }

GridSpec preset_grid(std::string_view name) {
  GridSpec spec;
  if (name == "tp-table2" || name == "bspline-table3") {
    spec.family = name == "tp-table2" ? ModelFamily::TruncatedPower : ModelFamily::BSpline;
    spec.degrees = {1, 2, 3, 4};
    spec.knot_counts = {1, 6, 11, 16, 21, 26, 31, 36, 41, 46};
  } else if (name == "pspline-table4") {
    spec.family = ModelFamily::PSpline;
    spec.degrees = {2, 3, 4, 5};
    spec.knot_counts = {50, 80, 100};
    spec.diff_orders = {0, 1, 2, 3, 4};
    spec.orders_below_degree = true;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown preset '" + std::string(name) + "'");
  }
  return spec;
}

GridReport run_grid(const GridSpec& spec, const SplitDataSet& split) {
  const auto cells = enumerate_cells(spec);
  GridReport report;
  report.rows.reserve(cells.size());
  for (const auto& cell : cells) report.rows.push_back(run_cell(spec, cell, split));
  return report;
}

GridReport run_grid(const GridSpec& spec, const DataSet& data) {
  enumerate_cells(spec);
  return run_grid(spec, split(data, spec.fraction, spec.seed, spec.split_mode));
}

GridReport merge_reports(std::span<const GridReport> reports) {
  GridReport out;
  for (const auto& r : reports) out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
  return out;
}

std::optional<std::size_t> argbest(const GridReport& report, ReportCriterion criterion) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    if (!row.ok() || !std::isfinite(oriented(row, criterion))) continue;
    if (!best || oriented(row, criterion) < oriented(report.rows[*best], criterion)) best = i;
  }
  return best;
}

std::size_t best_model(const GridReport& report, std::span<const ReportCriterion> priority) {
  std::optional<std::size_t> best;
  auto less = [&](const GridRow& a, const GridRow& b) {
    for (const auto c : priority) {
      const double va = oriented(a, c);
      const double vb = oriented(b, c);
      if (va != vb) return va < vb;
    }
    if (a.params != b.params) return a.params < b.params;
    return a.degree < b.degree;
  };
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (!report.rows[i].ok()) continue;
    if (!best || less(report.rows[i], report.rows[*best])) best = i;
  }
  if (!best) throw Error(ErrorCode::NoSuccessfulFits, "report has no successful rows");
  return *best;
}

std::size_t best_model(const GridReport& report) {
  static constexpr ReportCriterion kDefault[] = {ReportCriterion::CVMSPE, ReportCriterion::MSETest,
                                                 ReportCriterion::AIC};
  return best_model(report, kDefault);
}

}  // namespace splinefit
