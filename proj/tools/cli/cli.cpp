#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "splinefit/splinefit.hpp"

namespace splinefit::cli {

namespace {

struct InputOptions {
  std::string path;
  std::string x_col;
  std::string y_col;
  char delimiter = ',';
  std::string rescale = "none";
};

struct ModelOptions {
  std::string family = "pspline";
  int degree = 3;
  int knots = 20;
  std::string placement = "equidistant";
  std::string penalty = "auto";
  int diff_order = 2;
  std::optional<double> lambda;
  std::string select = "gcv";
  double lambda_min = 1e-4;
  double lambda_max = 1e4;
  int lambda_count = 41;
  std::string solver = "normal";
};

struct CommonOptions {
  unsigned long long seed = 42;
  bool quiet = false;
};

struct FitCommand {
  std::string model_out = "model.json";
  std::string curve_out = "curve.csv";
  int curve_points = 500;
};

struct PredictCommand {
  std::vector<double> at;
  std::string points_from;
  std::string out = "-";
};

struct BandCommand {
  std::string kind = "pointwise";
  double alpha = 0.05;
  int points = 50;
  std::string points_from;
  int draws = 10000;
  std::string out = "band.csv";
};

struct GridCommand {
  std::string preset;
  std::string family = "pspline";
  std::vector<int> degrees;
  std::vector<int> knots;
  std::vector<int> diff_orders;
  bool orders_below_degree = false;
  bool nested_knots = false;
  double fraction = 0.8;
  std::string split_mode = "random";
  std::string select = "gcv";
  double lambda_min = 1e-4;
  double lambda_max = 1e4;
  int lambda_count = 41;
  std::string placement = "equidistant";
  std::string solver = "normal";
  std::string out_prefix = "grid";
  std::vector<std::string> formats{"csv", "json", "markdown"};
  bool no_manifest = false;
  bool print = false;
};

struct DiagnoseCommand {
  int window = 9;
  std::string out = "residuals.csv";
};

struct State {
  InputOptions input;
  ModelOptions model;
  CommonOptions common;
  FitCommand fit;
  PredictCommand predict;
  BandCommand band;
  GridCommand grid;
  DiagnoseCommand diagnose;
  // Options of the grid subcommand that were given explicitly override a preset.
  std::vector<const CLI::Option*> grid_overrides;
};

const std::vector<std::string> kFamilies{"tp", "bspline", "pspline"};
const std::vector<std::string> kPlacements{"equidistant", "quantile"};
const std::vector<std::string> kCriteria{"gcv", "loocv", "aic"};
const std::vector<std::string> kSolvers{"normal", "augmented"};

// Maps covariate values between the user's units and the fitted units.
struct Transform {
  double offset = 0.0;
  double scale = 1.0;
  double forward(double z) const { return (z - offset) / scale; }
  double back(double u) const { return offset + scale * u; }
};

struct LoadedData {
  DataSet data;
  Transform transform;
};

void add_input_options(CLI::App& app, InputOptions& o) {
  app.add_option("input", o.path, "CSV file with a header row")->required();
  app.add_option("--x-col", o.x_col, "covariate column name (default: first column)");
  app.add_option("--y-col", o.y_col, "response column name (default: second column)");
  app.add_option("--delimiter", o.delimiter, "field delimiter")->capture_default_str();
  app.add_option("--rescale", o.rescale, "map the covariate onto [0, 1] before fitting")
      ->check(CLI::IsMember({"none", "unit"}))
      ->capture_default_str();
}

void add_model_options(CLI::App& app, ModelOptions& o) {
  app.add_option("--family", o.family, "tp, bspline (unpenalized by default) or pspline")
      ->check(CLI::IsMember(kFamilies))
      ->capture_default_str();
  app.add_option("--degree", o.degree, "spline degree")->check(CLI::Range(0, 30))->capture_default_str();
  app.add_option("--knots", o.knots, "number of interior knots")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--placement", o.placement, "interior knot placement")
      ->check(CLI::IsMember(kPlacements))
      ->capture_default_str();
  app.add_option("--penalty", o.penalty,
                 "auto (difference for pspline, none otherwise), none, tp-ridge or difference")
      ->check(CLI::IsMember({"auto", "none", "tp-ridge", "difference"}))
      ->capture_default_str();
  app.add_option("--diff-order", o.diff_order, "difference order of the penalty; 0 is a ridge")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--lambda", o.lambda, "fixed smoothing parameter (default: selected by --select)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--select", o.select, "criterion for choosing lambda on the grid")
      ->check(CLI::IsMember(kCriteria))
      ->capture_default_str();
  app.add_option("--lambda-min", o.lambda_min, "smallest positive grid lambda")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--lambda-max", o.lambda_max, "largest grid lambda")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--lambda-count", o.lambda_count, "number of log-spaced grid values (lambda = 0 is always added)")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  app.add_option("--solver", o.solver, "normal equations or augmented QR")
      ->check(CLI::IsMember(kSolvers))
      ->capture_default_str();
}

void add_common_options(CLI::App& app, CommonOptions& o) {
  app.add_option("--seed", o.seed, "master seed for splits and simulation (default: SPLINEFIT_SEED, else 42)");
  app.add_flag("-q,--quiet", o.quiet, "suppress the summary on stdout");
}

std::unique_ptr<CLI::App> build_app(State& s) {
  auto app = std::make_unique<CLI::App>("Penalized spline regression: fit, predict, confidence bands, model grids.",
                                        "splinefit");
  app->require_subcommand(1);
  app->set_help_all_flag("--help-all", "help for every subcommand");

  auto* fit = app->add_subcommand("fit", "fit one model; write model json and a fitted-curve csv");
  add_input_options(*fit, s.input);
  add_model_options(*fit, s.model);
  add_common_options(*fit, s.common);
  fit->add_option("--model-out", s.fit.model_out, "model json path")->capture_default_str();
  fit->add_option("--curve-out", s.fit.curve_out, "curve csv path (columns z,fitted)")->capture_default_str();
  fit->add_option("--curve-points", s.fit.curve_points, "points on the curve grid")
      ->check(CLI::Range(2, 10000000))
      ->capture_default_str();

  auto* predict = app->add_subcommand("predict", "fit, then evaluate the curve at given points");
  add_input_options(*predict, s.input);
  add_model_options(*predict, s.model);
  add_common_options(*predict, s.common);
  predict->add_option("--at", s.predict.at, "comma-separated evaluation points (default: none)")->delimiter(',');
  predict->add_option("--points-from", s.predict.points_from, "csv of points, column z or else the first (default: none)");
  predict->add_option("--out", s.predict.out, "output csv path, - for stdout")->capture_default_str();

  auto* band = app->add_subcommand("band", "fit, then write a confidence band");
  add_input_options(*band, s.input);
  add_model_options(*band, s.model);
  add_common_options(*band, s.common);
  band->add_option("--kind", s.band.kind, "pointwise, bonferroni or simulated")
      ->check(CLI::IsMember({"pointwise", "bonferroni", "simulated"}))
      ->capture_default_str();
  band->add_option("--alpha", s.band.alpha, "one minus the confidence level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  band->add_option("--points", s.band.points, "equispaced points across the data range")
      ->check(CLI::Range(1, 10000000))
      ->capture_default_str();
  band->add_option("--points-from", s.band.points_from, "csv of points, column z or else the first (default: none)");
  band->add_option("--draws", s.band.draws, "Monte Carlo draws for the simulated band")
      ->check(CLI::Range(1000, 100000000))
      ->capture_default_str();
  band->add_option("--out", s.band.out, "band csv path, - for stdout")->capture_default_str();

  auto* grid = app->add_subcommand("grid", "sweep a model grid on a train/test split and write reports");
  add_common_options(*grid, s.common);
  grid->add_option("input", s.input.path, "CSV file with a header row")->required();
  grid->add_option("--x-col", s.input.x_col, "covariate column name (default: first column)");
  grid->add_option("--y-col", s.input.y_col, "response column name (default: second column)");
  grid->add_option("--delimiter", s.input.delimiter, "field delimiter")->capture_default_str();
  grid->add_option("--rescale", s.input.rescale, "map the covariate onto [0, 1] before splitting")
      ->check(CLI::IsMember({"none", "unit"}))
      ->capture_default_str();
  grid->add_option("--preset", s.grid.preset, "tp-table2, bspline-table3 or pspline-table4 (default: none)")
      ->check(CLI::IsMember(preset_names()));
  auto track = [&](CLI::Option* opt) {
    s.grid_overrides.push_back(opt);
    return opt;
  };
  track(grid->add_option("--family", s.grid.family, "tp, bspline or pspline")
            ->check(CLI::IsMember(kFamilies))
            ->capture_default_str());
  track(grid->add_option("--degrees", s.grid.degrees, "comma-separated degrees (default: none)")->delimiter(','));
  track(grid->add_option("--knots", s.grid.knots, "comma-separated interior knot counts (default: none)")
            ->delimiter(','));
  track(grid->add_option("--diff-orders", s.grid.diff_orders, "comma-separated difference orders (default: none)")
            ->delimiter(','));
  track(grid->add_flag("--orders-below-degree", s.grid.orders_below_degree,
                       "keep only difference orders below the degree"));
  track(grid->add_flag("--nested-knots", s.grid.nested_knots, "require refining knot sets (K+1 divides K'+1)"));
  track(grid->add_option("--fraction", s.grid.fraction, "training fraction of the split")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str());
  track(grid->add_option("--split-mode", s.grid.split_mode, "random, or head for the first rows")
            ->check(CLI::IsMember({"random", "head"}))
            ->capture_default_str());
  track(grid->add_option("--select", s.grid.select, "lambda criterion for P-spline cells")
            ->check(CLI::IsMember(kCriteria))
            ->capture_default_str());
  track(grid->add_option("--lambda-min", s.grid.lambda_min, "smallest positive grid lambda")
            ->check(CLI::PositiveNumber)
            ->capture_default_str());
  track(grid->add_option("--lambda-max", s.grid.lambda_max, "largest grid lambda")
            ->check(CLI::PositiveNumber)
            ->capture_default_str());
  track(grid->add_option("--lambda-count", s.grid.lambda_count, "number of log-spaced grid values")
            ->check(CLI::Range(1, 100000))
            ->capture_default_str());
  track(grid->add_option("--placement", s.grid.placement, "interior knot placement")
            ->check(CLI::IsMember(kPlacements))
            ->capture_default_str());
  track(grid->add_option("--solver", s.grid.solver, "normal equations or augmented QR")
            ->check(CLI::IsMember(kSolvers))
            ->capture_default_str());
  grid->add_option("--out-prefix", s.grid.out_prefix, "report path prefix; extensions are appended")
      ->capture_default_str();
  grid->add_option("--formats", s.grid.formats, "comma-separated report formats")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "markdown", "md"}))
      ->capture_default_str();
  grid->add_flag("--no-manifest", s.grid.no_manifest, "skip the <prefix>.manifest.json provenance file");
  grid->add_flag("--print", s.grid.print, "also print the markdown table to stdout");

  auto* diagnose = app->add_subcommand("diagnose", "fit, then write residuals against fitted values");
  add_input_options(*diagnose, s.input);
  add_model_options(*diagnose, s.model);
  add_common_options(*diagnose, s.common);
  diagnose->add_option("--window", s.diagnose.window, "odd moving-average window for the smoothed residual")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  diagnose->add_option("--out", s.diagnose.out, "residual csv path, - for stdout")->capture_default_str();
  return app;
}

std::optional<Criterion> parse_criterion(std::string_view text) {
  if (text == "gcv") return Criterion::GCV;
  if (text == "loocv") return Criterion::LOOCV;
  if (text == "aic") return Criterion::AIC;
  return std::nullopt;
}

Solver parse_solver(std::string_view text) { return text == "augmented" ? Solver::Augmented : Solver::NormalEquations; }

KnotPlacement parse_placement(std::string_view text) {
  return text == "quantile" ? KnotPlacement::Quantile : KnotPlacement::Equidistant;
}

LoadedData load(const InputOptions& o) {
  LoadedData out{load_csv(o.path, o.x_col, o.y_col, CsvOptions{o.delimiter}), {}};
  if (o.rescale == "unit") {
    out.transform = {out.data.z_min(), out.data.z_max() - out.data.z_min()};
    out.data = out.data.rescaled_unit();
  }
  return out;
}

FitConfig make_config(const ModelOptions& o, const DataSet& data) {
  const auto family = *parse_model_family(o.family);
  FitConfig config;
  config.basis = make_basis(family == ModelFamily::TruncatedPower ? Family::TruncatedPower : Family::BSpline,
                            o.degree, data.z(), o.knots, parse_placement(o.placement));
  std::string penalty = o.penalty;
  if (penalty == "auto") penalty = family == ModelFamily::PSpline ? "difference" : "none";
  if (penalty == "difference" && family == ModelFamily::TruncatedPower) {
    throw Error(ErrorCode::InvalidArgument, "difference penalties apply to B-spline coefficients; use tp-ridge");
  }
  if (penalty == "tp-ridge" && family != ModelFamily::TruncatedPower) {
    throw Error(ErrorCode::InvalidArgument, "tp-ridge applies to the truncated power family only");
  }
  config.solver = parse_solver(o.solver);
  if (penalty == "none") {
    if (o.lambda && *o.lambda != 0.0) throw Error(ErrorCode::InvalidArgument, "--lambda needs a penalty");
    config.penalty = PenaltySpec::none();
    config.lambda = 0.0;
    return config;
  }
  config.penalty = penalty == "tp-ridge" ? PenaltySpec::tp_ridge() : PenaltySpec::difference(o.diff_order);
  if (o.lambda_min > o.lambda_max) throw Error(ErrorCode::InvalidArgument, "--lambda-min exceeds --lambda-max");
  config.lambda_grid = log_lambda_grid(o.lambda_min, o.lambda_max, o.lambda_count, true);
  if (o.lambda) {
    config.lambda = *o.lambda;
  } else {
    config.lambda = *parse_criterion(o.select);
  }
  return config;
}

std::vector<double> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::EmptyFile, "'" + path + "' is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::size_t column = 0;
  {
    std::istringstream fields(header);
    std::string name;
    for (std::size_t k = 0; std::getline(fields, name, ','); ++k) {
      if (name == "z") column = k;
    }
  }
  std::vector<double> points;
  std::string line;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    for (std::size_t k = 0; k <= column; ++k) {
      if (!std::getline(fields, cell, ',')) {
        throw Error(ErrorCode::ParseError, path + ": row " + std::to_string(row) + " is too short", row);
      }
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument("bad");
      points.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, path + ": row " + std::to_string(row) + ": '" + cell + "'", row);
    }
  }
  if (points.empty()) throw Error(ErrorCode::EmptyFile, "'" + path + "' has no points");
  return points;
}

// Writes to a file, or to `out` when path is "-".
template <typename Writer>
void write_output(const std::string& path, std::ostream& out, Writer&& writer) {
  if (path == "-") {
    writer(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  writer(file);
  file.flush();
  if (!file) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

std::vector<double> to_model_units(const std::vector<double>& points, const Transform& t) {
  std::vector<double> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) out[k] = t.forward(points[k]);
  return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
  v.back() = hi;
  return v;
}

void summarize(const FittedModel& m, std::ostream& out) {
  out << "family=" << to_string(m.basis.family) << " degree=" << m.basis.degree
      << " knots=" << m.basis.knots.interior_count() << " penalty=" << describe(m.penalty)
      << " lambda=" << format_double(m.lambda) << " edf=" << format_double(m.edf)
      << " gcv=" << format_double(m.criteria.gcv) << " cvmspe=" << format_double(m.criteria.cvmspe) << '\n';
}

nlohmann::json model_document(const FittedModel& m, const Transform& t, const InputOptions& in) {
  auto j = model_to_json(m);
  j["input"] = {{"path", in.path}, {"rescale", in.rescale}, {"offset", t.offset}, {"scale", t.scale}};
  return j;
}

int cmd_fit(const State& s, std::ostream& out) {
  const auto loaded = load(s.input);
  const auto model = fit(make_config(s.model, loaded.data), loaded.data);
  write_output(s.fit.model_out, out, [&](std::ostream& o) {
    o << model_document(model, loaded.transform, s.input).dump(2) << '\n';
  });
  const auto grid = linspace(model.basis.knots.lo(), model.basis.knots.hi(), s.fit.curve_points);
  const auto values = predict(model, grid);
  write_output(s.fit.curve_out, out, [&](std::ostream& o) {
    o << "z,fitted\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
      o << format_double(loaded.transform.back(grid[k])) << ',' << format_double(values[static_cast<Eigen::Index>(k)])
        << '\n';
    }
  });
  if (!s.common.quiet) summarize(model, out);
  return kOk;
}

int cmd_predict(const State& s, std::ostream& out) {
  const auto loaded = load(s.input);
  std::vector<double> points = s.predict.at;
  if (!s.predict.points_from.empty()) {
    const auto more = read_points(s.predict.points_from);
    points.insert(points.end(), more.begin(), more.end());
  }
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "give --at or --points-from");
  const auto model = fit(make_config(s.model, loaded.data), loaded.data);
  const auto values = predict(model, to_model_units(points, loaded.transform));
  write_output(s.predict.out, out, [&](std::ostream& o) {
    o << "z,estimate\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
      o << format_double(points[k]) << ',' << format_double(values[static_cast<Eigen::Index>(k)]) << '\n';
    }
  });
  return kOk;
}

int cmd_band(const State& s, std::ostream& out) {
  const auto loaded = load(s.input);
  const auto model = fit(make_config(s.model, loaded.data), loaded.data);
  PredictionRequest request;
  if (!s.band.points_from.empty()) {
    request.points = to_model_units(read_points(s.band.points_from), loaded.transform);
  } else {
    request.points = linspace(model.basis.knots.lo(), model.basis.knots.hi(), s.band.points);
  }
  request.alpha = s.band.alpha;
  request.band = s.band.kind == "simulated" ? BandKind::Simulated
                 : s.band.kind == "bonferroni" ? BandKind::Bonferroni
                                               : BandKind::Pointwise;
  request.draws = s.band.draws;
  request.seed = derive_seed(s.common.seed, SeedStream::Band);
  auto band = confidence_band(model, request);
  for (auto& p : band.points) p.z = loaded.transform.back(p.z);
  write_output(s.band.out, out, [&](std::ostream& o) { write_band_csv(o, band); });
  if (!s.common.quiet && s.band.out != "-") {
    out << "kind=" << to_string(band.kind) << " quantile=" << format_double(band.quantile)
        << " points=" << band.points.size() << '\n';
  }
  return kOk;
}

GridSpec make_grid_spec(const State& s) {
  const auto& g = s.grid;
  GridSpec spec = g.preset.empty() ? GridSpec{} : preset_grid(g.preset);
  const auto given = [&](const std::string& name) {
    for (const auto* opt : s.grid_overrides) {
      if (opt->check_lname(name.substr(2)) && opt->count() > 0) return true;
    }
    return false;
  };
  const bool custom = g.preset.empty();
  if (custom || given("--family")) spec.family = *parse_model_family(g.family);
  if (custom || given("--degrees")) spec.degrees = g.degrees;
  if (custom || given("--knots")) spec.knot_counts = g.knots;
  if (custom || given("--diff-orders")) spec.diff_orders = g.diff_orders;
  if (custom && spec.family == ModelFamily::PSpline && spec.diff_orders.empty()) spec.diff_orders = {2};
  if (custom || given("--orders-below-degree")) spec.orders_below_degree = g.orders_below_degree;
  if (custom || given("--nested-knots")) spec.nested_knots = g.nested_knots;
  if (custom || given("--fraction")) spec.fraction = g.fraction;
  if (custom || given("--split-mode")) spec.split_mode = g.split_mode == "head" ? SplitMode::Head : SplitMode::Random;
  if (custom || given("--select")) spec.select = *parse_criterion(g.select);
  if (custom || given("--lambda-min") || given("--lambda-max") || given("--lambda-count")) {
    if (g.lambda_min > g.lambda_max) throw Error(ErrorCode::InvalidArgument, "--lambda-min exceeds --lambda-max");
    spec.lambda_grid = log_lambda_grid(g.lambda_min, g.lambda_max, g.lambda_count, true);
  }
  if (custom || given("--placement")) spec.placement = parse_placement(g.placement);
  if (custom || given("--solver")) spec.solver = parse_solver(g.solver);
  spec.seed = derive_seed(s.common.seed, SeedStream::Split);
  return spec;
}

int cmd_grid(const State& s, std::ostream& out) {
  const auto loaded = load(s.input);
  const GridSpec spec = make_grid_spec(s);
  const auto report = run_grid(spec, loaded.data);
  std::vector<ReportFormat> formats;
  for (const auto& f : s.grid.formats) {
    const auto parsed = *parse_report_format(f);
    if (std::find(formats.begin(), formats.end(), parsed) == formats.end()) formats.push_back(parsed);
  }
  for (const auto format : formats) {
    write_output(s.grid.out_prefix + std::string(extension(format)), out,
                 [&](std::ostream& o) { emit_report(report, format, o); });
  }
  if (!s.grid.no_manifest) {
    auto manifest = grid_manifest(spec, loaded.data, s.grid.preset);
    manifest["master_seed"] = s.common.seed;
    manifest["seed_scheme"] = "splitmix64(master + stream), split stream 0, band stream 1";
    manifest["input"] = {{"path", s.input.path}, {"rescale", s.input.rescale}};
    write_output(s.grid.out_prefix + ".manifest.json", out, [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
  }
  if (s.grid.print) emit_report(report, ReportFormat::Markdown, out);
  if (!s.common.quiet) {
    std::size_t failed = 0;
    for (const auto& r : report.rows) failed += r.ok() ? 0 : 1;
    out << "rows=" << report.rows.size() << " failed=" << failed;
    try {
      const auto best = report.rows[best_model(report)];
      out << " best=" << to_string(best.family) << "(degree " << best.degree << ", knots " << best.knots;
      if (best.diff_order) out << ", order " << *best.diff_order;
      out << ")";
    } catch (const Error&) {
    }
    out << '\n';
  }
  return kOk;
}

int cmd_diagnose(const State& s, std::ostream& out) {
  const auto loaded = load(s.input);
  const auto model = fit(make_config(s.model, loaded.data), loaded.data);
  const Eigen::VectorXd residuals = model.residuals();
  const auto rows = residual_diagnostic(std::span<const double>(model.fitted.data(), model.n()),
                                        std::span<const double>(residuals.data(), model.n()), s.diagnose.window);
  write_output(s.diagnose.out, out, [&](std::ostream& o) { write_residual_csv(o, rows); });
  return kOk;
}

int dispatch(CLI::App& app, const State& s, std::ostream& out) {
  const auto* sub = app.get_subcommands().front();
  const auto& name = sub->get_name();
  if (name == "fit") return cmd_fit(s, out);
  if (name == "predict") return cmd_predict(s, out);
  if (name == "band") return cmd_band(s, out);
  if (name == "grid") return cmd_grid(s, out);
  return cmd_diagnose(s, out);
}

std::string longest_name(const CLI::Option& opt) {
  if (opt.get_positional()) return opt.get_name(true);
  if (!opt.get_lnames().empty()) return "--" + opt.get_lnames().front();
  return "-" + opt.get_snames().front();
}

}  // namespace

unsigned long long default_seed() {
  if (const char* env = std::getenv("SPLINEFIT_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return 42;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  State state;
  state.common.seed = default_seed();
  auto app = build_app(state);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app->exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app->exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    app->exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    err << "run with --help for the option list\n";
    return kUsage;
  }
  try {
    return dispatch(*app, state, out);
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (e.index()) err << " [index " << *e.index() << "]";
    err << '\n';
    return is_usage_error(e.code()) ? kUsage : kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"splinefit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::vector<std::string> subcommand_names() {
  State state;
  auto app = build_app(state);
  std::vector<std::string> names;
  for (const auto* sub : app->get_subcommands({})) names.push_back(sub->get_name());
  return names;
}

std::vector<OptionInfo> option_table() {
  State state;
  auto app = build_app(state);
  std::vector<OptionInfo> table;
  for (const auto* sub : app->get_subcommands({})) {
    for (const auto* opt : sub->get_options()) {
      const auto& ln = opt->get_lnames();
      if (ln == std::vector<std::string>{"help"} || ln == std::vector<std::string>{"help-all"}) continue;
      table.push_back({sub->get_name(), longest_name(*opt), opt->get_description(), opt->get_default_str(),
                       opt->get_expected_max() == 0, opt->get_positional()});
    }
  }
  return table;
}

std::string help_text(std::string_view subcommand) {
  State state;
  auto app = build_app(state);
  if (subcommand.empty()) return app->help();
  return app->get_subcommand(std::string(subcommand))->help();
}

}  // namespace splinefit::cli
