#pragma once

#include <nlohmann/json.hpp>

#include "splinefit/fit.hpp"

namespace splinefit {

// Schema "splinefit.model/1"; documented in docs/formats.md. NaN values are written as null.
nlohmann::json model_to_json(const FittedModel& model);

nlohmann::json basis_to_json(const BasisSpec& spec);

}  // namespace splinefit
