#include "splinefit/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "splinefit/error.hpp"

namespace splinefit {

namespace {

constexpr const char* kColumns[] = {"family", "degree",   "knots",  "diff_order",   "params",   "lambda",
                                    "edf",    "aic",      "bic",    "r2",           "press",    "cvmspe_train",
                                    "mse_test", "n_train", "n_test", "n_test_excluded", "status", "notes"};
constexpr std::size_t kColumnCount = std::size(kColumns);

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string fixed2(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double parse_number(const std::string& text, std::size_t row) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, "report row " + std::to_string(row) + ": '" + text + "'", row);
  }
  return v;
}

std::size_t parse_count(const std::string& text, std::size_t row) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, "report row " + std::to_string(row) + ": '" + text + "'", row);
  }
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_csv_report(const GridReport& report, std::ostream& out) {
  for (std::size_t c = 0; c < kColumnCount; ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& r : report.rows) {
    out << to_string(r.family) << ',' << r.degree << ',' << r.knots << ',';
    if (r.diff_order) out << *r.diff_order;
    out << ',' << format_double(r.params) << ',' << format_double(r.lambda) << ',' << format_double(r.edf) << ','
        << format_double(r.aic) << ',' << format_double(r.bic) << ',' << format_double(r.r2) << ','
        << format_double(r.press) << ',' << format_double(r.cvmspe) << ',' << format_double(r.mse_test) << ','
        << r.n_train << ',' << r.n_test << ',' << r.n_test_excluded << ',' << r.status << ',' << r.notes << '\n';
  }
}

void write_markdown_report(const GridReport& report, std::ostream& out) {
  out << "| model | degree | knots | diff. order | params | AIC | BIC | R2 | PRESS | CVMSPE (train) | MSE (test) | status |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    const bool penalized = r.family == ModelFamily::PSpline;
    std::string params = penalized ? fixed2(r.params)
                                   : (std::isnan(r.params) ? "NA" : std::to_string(static_cast<long>(r.params)));
    out << "| " << to_string(r.family) << " | " << r.degree << " | " << r.knots << " | "
        << (r.diff_order ? std::to_string(*r.diff_order) : "-") << " | " << params << " | " << fixed2(r.aic) << " | "
        << fixed2(r.bic) << " | " << fixed2(r.r2) << " | " << fixed2(r.press) << " | " << fixed2(r.cvmspe) << " | "
        << fixed2(r.mse_test) << " | " << r.status << " |\n";
  }
}

std::string hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

std::string_view extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv: return ".csv";
    case ReportFormat::Json: return ".json";
    case ReportFormat::Markdown: return ".md";
  }
  return "";
}

nlohmann::json report_to_json(const GridReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"family", to_string(r.family)},
                    {"degree", r.degree},
                    {"knots", r.knots},
                    {"diff_order", r.diff_order ? nlohmann::json(*r.diff_order) : nlohmann::json(nullptr)},
                    {"params", number(r.params)},
                    {"lambda", number(r.lambda)},
                    {"edf", number(r.edf)},
                    {"aic", number(r.aic)},
                    {"bic", number(r.bic)},
                    {"r2", number(r.r2)},
                    {"press", number(r.press)},
                    {"cvmspe_train", number(r.cvmspe)},
                    {"mse_test", number(r.mse_test)},
                    {"n_train", r.n_train},
                    {"n_test", r.n_test},
                    {"n_test_excluded", r.n_test_excluded},
                    {"status", r.status},
                    {"notes", r.notes}});
  }
  nlohmann::json best = nlohmann::json::object();
  for (const auto c : {ReportCriterion::AIC, ReportCriterion::BIC, ReportCriterion::R2, ReportCriterion::PRESS,
                       ReportCriterion::CVMSPE, ReportCriterion::MSETest}) {
    const auto idx = argbest(report, c);
    best[std::string(to_string(c))] = idx ? nlohmann::json(*idx) : nlohmann::json(nullptr);
  }
  nlohmann::json overall = nullptr;
  try {
    overall = best_model(report);
  } catch (const Error&) {
  }
  return {{"schema", "splinefit.grid_report/1"},
          {"columns", kColumns},
          {"rows", rows},
          {"best", best},
          {"best_overall", overall}};
}

void emit_report(const GridReport& report, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::Csv: write_csv_report(report, out); break;
    case ReportFormat::Json: out << report_to_json(report).dump(2) << '\n'; break;
    case ReportFormat::Markdown: write_markdown_report(report, out); break;
  }
  if (!out) throw Error(ErrorCode::IoError, "failed to write report");
}

GridReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyFile, "report has no header");
  const auto header = split_line(line);
  if (header.size() != kColumnCount) throw Error(ErrorCode::MissingColumn, "unexpected report header");
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (header[c] != kColumns[c]) throw Error(ErrorCode::MissingColumn, "unexpected column '" + header[c] + "'");
  }

  GridReport report;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row_no;
    const auto f = split_line(line);
    if (f.size() != kColumnCount) throw Error(ErrorCode::ParseError, "report row " + std::to_string(row_no), row_no);
    GridRow r;
    const auto family = parse_model_family(f[0]);
    if (!family) throw Error(ErrorCode::ParseError, "report row " + std::to_string(row_no) + ": family", row_no);
    r.family = *family;
    r.degree = static_cast<int>(parse_count(f[1], row_no));
    r.knots = static_cast<int>(parse_count(f[2], row_no));
    if (!f[3].empty()) r.diff_order = static_cast<int>(parse_count(f[3], row_no));
    r.params = parse_number(f[4], row_no);
    r.lambda = parse_number(f[5], row_no);
    r.edf = parse_number(f[6], row_no);
    r.aic = parse_number(f[7], row_no);
    r.bic = parse_number(f[8], row_no);
    r.r2 = parse_number(f[9], row_no);
    r.press = parse_number(f[10], row_no);
    r.cvmspe = parse_number(f[11], row_no);
    r.mse_test = parse_number(f[12], row_no);
    r.n_train = parse_count(f[13], row_no);
    r.n_test = parse_count(f[14], row_no);
    r.n_test_excluded = parse_count(f[15], row_no);
    r.status = f[16];
    r.notes = f[17];
    report.rows.push_back(std::move(r));
  }
  return report;
}

nlohmann::json grid_manifest(const GridSpec& spec, const DataSet& data, std::string_view preset) {
  return {{"schema", "splinefit.manifest/1"},
          {"preset", preset.empty() ? nlohmann::json(nullptr) : nlohmann::json(preset)},
          {"family", to_string(spec.family)},
          {"degrees", spec.degrees},
          {"knot_counts", spec.knot_counts},
          {"diff_orders", spec.diff_orders},
          {"orders_below_degree", spec.orders_below_degree},
          {"nested_knots", spec.nested_knots},
          {"fraction", spec.fraction},
          {"seed", spec.seed},
          {"split_mode", spec.split_mode == SplitMode::Random ? "random" : "head"},
          {"select", to_string(spec.select)},
          {"lambda_grid", spec.lambda_grid},
          {"placement", to_string(spec.placement)},
          {"solver", to_string(spec.solver)},
          {"data", {{"n", data.size()}, {"checksum_fnv1a64", hex(checksum(data))}}}};
}

}  // namespace splinefit
