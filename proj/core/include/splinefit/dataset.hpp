#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace splinefit {

// Univariate regression sample: covariate z and response y, in input order.
class DataSet {
 public:
  DataSet() = default;
  // Throws LengthMismatch, NonFiniteValue, or DegenerateDomain when empty.
  DataSet(Eigen::VectorXd z, Eigen::VectorXd y);
  DataSet(const std::vector<double>& z, const std::vector<double>& y);

  const Eigen::VectorXd& z() const noexcept { return z_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(z_.size()); }

  double z_min() const;
  double z_max() const;

  DataSet subset(std::span<const std::size_t> indices) const;
  // Stable sort by covariate value.
  DataSet sorted() const;
  // Affine map of z onto [0, 1].
  DataSet rescaled_unit() const;

 private:
  Eigen::VectorXd z_;
  Eigen::VectorXd y_;
};

struct CsvOptions {
  char delimiter = ',';
};

// Column names may be empty, meaning the first (x) or second (y) column.
DataSet read_csv(std::istream& in, std::string_view x_col, std::string_view y_col,
                 const CsvOptions& options = {});
DataSet load_csv(const std::filesystem::path& path, std::string_view x_col,
                 std::string_view y_col, const CsvOptions& options = {});

// Shortest round-trip representation of each value.
void write_csv(std::ostream& out, const DataSet& data, std::string_view x_name,
               std::string_view y_name, const CsvOptions& options = {});

enum class SplitMode { Random, Head };

struct SplitDataSet {
  DataSet train;
  DataSet test;
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
  std::uint64_t seed = 0;
  double fraction = 0.0;
};

// Training part has round(fraction * n) rows; both parts keep the original row order.
SplitDataSet split(const DataSet& data, double fraction, std::uint64_t seed,
                   SplitMode mode = SplitMode::Random);

struct ResidualRow {
  double fitted;
  double residual;
  double smoothed;
};

// Rows sorted by fitted value; smoothed is a centered moving average truncated at the ends.
std::vector<ResidualRow> residual_diagnostic(std::span<const double> fitted,
                                             std::span<const double> residuals, int window);

void write_residual_csv(std::ostream& out, std::span<const ResidualRow> rows);

// Bit-pattern hash of the sample (FNV-1a), used for experiment provenance.
std::uint64_t checksum(const DataSet& data);

std::string format_double(double value);

}  // namespace splinefit
