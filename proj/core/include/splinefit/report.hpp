#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "splinefit/selection.hpp"

namespace splinefit {

enum class ReportFormat { Csv, Json, Markdown };

std::optional<ReportFormat> parse_report_format(std::string_view text);
std::string_view extension(ReportFormat format);

// Columns follow the GridRow field order. csv and json carry full precision,
// markdown rounds to two decimals.
void emit_report(const GridReport& report, ReportFormat format, std::ostream& out);

GridReport read_report_csv(std::istream& in);

nlohmann::json report_to_json(const GridReport& report);

// Spec, seed and data checksum of a grid run.
nlohmann::json grid_manifest(const GridSpec& spec, const DataSet& data, std::string_view preset = {});

}  // namespace splinefit
