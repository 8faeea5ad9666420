#include "splinefit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <cstring>

#include "splinefit/error.hpp"
#include "splinefit/random.hpp"

namespace splinefit {

namespace {

void validate(const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  if (z.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "covariate has " + std::to_string(z.size()) +
                                               " values, response has " + std::to_string(y.size()));
  }
  if (z.size() == 0) throw Error(ErrorCode::DegenerateDomain, "data set is empty");
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(i + 1),
                  static_cast<std::size_t>(i + 1));
    }
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

bool parse_real(std::string_view text, double& value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::size_t find_column(const std::vector<std::string_view>& header, std::string_view name,
                        std::size_t fallback) {
  if (name.empty()) {
    if (fallback >= header.size()) {
      throw Error(ErrorCode::MissingColumn, "header has fewer than " + std::to_string(fallback + 1) + " columns");
    }
    return fallback;
  }
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, "column '" + std::string(name) + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

DataSet::DataSet(Eigen::VectorXd z, Eigen::VectorXd y) : z_(std::move(z)), y_(std::move(y)) {
  validate(z_, y_);
}

DataSet::DataSet(const std::vector<double>& z, const std::vector<double>& y)
    : DataSet(Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())),
              Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()))) {}

double DataSet::z_min() const { return z_.minCoeff(); }
double DataSet::z_max() const { return z_.maxCoeff(); }

DataSet DataSet::subset(std::span<const std::size_t> indices) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(indices.size()));
  Eigen::VectorXd y(z.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= size()) throw Error(ErrorCode::InvalidArgument, "subset index out of range", indices[k]);
    z[static_cast<Eigen::Index>(k)] = z_[static_cast<Eigen::Index>(indices[k])];
    y[static_cast<Eigen::Index>(k)] = y_[static_cast<Eigen::Index>(indices[k])];
  }
  return DataSet(std::move(z), std::move(y));
}

DataSet DataSet::sorted() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return z_[static_cast<Eigen::Index>(a)] < z_[static_cast<Eigen::Index>(b)];
  });
  return subset(order);
}

DataSet DataSet::rescaled_unit() const {
  const double lo = z_min();
  const double hi = z_max();
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateDomain, "cannot rescale a constant covariate");
  Eigen::VectorXd z = (z_.array() - lo) / (hi - lo);
  return DataSet(std::move(z), y_);
}

DataSet read_csv(std::istream& in, std::string_view x_col, std::string_view y_col,
                 const CsvOptions& options) {
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorCode::EmptyFile, "no header row");

  const std::string header_line = line;
  const auto header = split_fields(header_line, options.delimiter);
  const std::size_t xi = find_column(header, x_col, 0);
  const std::size_t yi = find_column(header, y_col, 1);
  const std::string x_name(header[xi]);
  const std::string y_name(header[yi]);

  std::vector<double> z;
  std::vector<double> y;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_fields(line, options.delimiter);
    double zv = 0.0;
    double yv = 0.0;
    if (xi >= fields.size() || !parse_real(fields[xi], zv)) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ", column " + x_name, row);
    }
    if (yi >= fields.size() || !parse_real(fields[yi], yv)) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ", column " + y_name, row);
    }
    if (!std::isfinite(zv) || !std::isfinite(yv)) {
      throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(row), row);
    }
    z.push_back(zv);
    y.push_back(yv);
  }
  if (z.empty()) throw Error(ErrorCode::EmptyFile, "no data rows");
  if (z.size() < 2) throw Error(ErrorCode::DegenerateDomain, "at least two observations are required");
  return DataSet(z, y);
}

DataSet load_csv(const std::filesystem::path& path, std::string_view x_col, std::string_view y_col,
                 const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_csv(in, x_col, y_col, options);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const DataSet& data, std::string_view x_name, std::string_view y_name,
               const CsvOptions& options) {
  out << x_name << options.delimiter << y_name << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out << format_double(data.z()[k]) << options.delimiter << format_double(data.y()[k]) << '\n';
  }
}

SplitDataSet split(const DataSet& data, double fraction, std::uint64_t seed, SplitMode mode) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split fraction must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw Error(ErrorCode::DegenerateSplit, "fraction " + format_double(fraction) + " of " +
                                                std::to_string(n) + " rows leaves an empty part");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (mode == SplitMode::Random) {
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(rng, i + 1));
      std::swap(order[i], order[j]);
    }
  }

  SplitDataSet out;
  out.train_index.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_index.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(out.train_index.begin(), out.train_index.end());
  std::sort(out.test_index.begin(), out.test_index.end());
  out.train = data.subset(out.train_index);
  out.test = data.subset(out.test_index);
  out.seed = seed;
  out.fraction = fraction;
  return out;
}

std::vector<ResidualRow> residual_diagnostic(std::span<const double> fitted,
                                             std::span<const double> residuals, int window) {
  if (fitted.size() != residuals.size()) {
    throw Error(ErrorCode::LengthMismatch, "fitted and residual vectors differ in length");
  }
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "smoothing window must be odd and at least 1");
  }
  const std::size_t n = fitted.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitted[a] < fitted[b]; });

  std::vector<ResidualRow> rows(n);
  for (std::size_t k = 0; k < n; ++k) {
    rows[k].fitted = fitted[order[k]];
    rows[k].residual = residuals[order[k]];
  }
  const auto half = static_cast<std::size_t>(window / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(n - 1, k + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += rows[j].residual;
    rows[k].smoothed = sum / static_cast<double>(hi - lo + 1);
  }
  return rows;
}

void write_residual_csv(std::ostream& out, std::span<const ResidualRow> rows) {
  out << "fitted,residual,smoothed\n";
  for (const auto& r : rows) {
    out << format_double(r.fitted) << ',' << format_double(r.residual) << ',' << format_double(r.smoothed)
        << '\n';
  }
}

std::uint64_t checksum(const DataSet& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    mix(data.z()[static_cast<Eigen::Index>(i)]);
    mix(data.y()[static_cast<Eigen::Index>(i)]);
  }
  return h;
}

}  // namespace splinefit
