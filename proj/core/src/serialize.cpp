#include "splinefit/serialize.hpp"

#include <cmath>

namespace splinefit {

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json vector(const Eigen::VectorXd& v) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

}  // namespace

nlohmann::json basis_to_json(const BasisSpec& spec) {
  return {
      {"family", to_string(spec.family)},
      {"degree", spec.degree},
      {"dimension", spec.dimension()},
      {"placement", to_string(spec.placement)},
      {"lo", spec.knots.lo()},
      {"hi", spec.knots.hi()},
      {"interior_knots", spec.knots.interior()},
  };
}

nlohmann::json model_to_json(const FittedModel& model) {
  nlohmann::json undefined = nlohmann::json::array();
  for (const auto code : model.criteria.undefined) undefined.push_back(error_name(code));

  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : model.trace) {
    trace.push_back({{"lambda", t.lambda},
                     {"edf", number(t.edf)},
                     {"value", number(t.value)},
                     {"error", t.error ? nlohmann::json(error_name(*t.error)) : nlohmann::json(nullptr)}});
  }

  return {
      {"schema", "splinefit.model/1"},
      {"basis", basis_to_json(model.basis)},
      {"penalty", {{"kind", describe(model.penalty)}, {"order", model.penalty.order}}},
      {"lambda", model.lambda},
      {"selected_by", model.selected_by ? nlohmann::json(to_string(*model.selected_by)) : nlohmann::json(nullptr)},
      {"n", model.n()},
      {"coefficients", vector(model.gamma)},
      {"edf", number(model.edf)},
      {"edf_exact", number(model.edf_exact)},
      {"sigma2", number(model.sigma2)},
      {"criteria",
       {{"aic", number(model.criteria.aic)},
        {"bic", number(model.criteria.bic)},
        {"r2", number(model.criteria.r2)},
        {"r2_centered", number(model.criteria.r2_centered)},
        {"press", number(model.criteria.press)},
        {"cvmspe", number(model.criteria.cvmspe)},
        {"gcv", number(model.criteria.gcv)},
        {"rss", number(model.criteria.rss)},
        {"undefined", undefined}}},
      {"solver",
       {{"kind", to_string(model.solve.solver)},
        {"jittered", model.solve.jittered},
        {"jitter", model.solve.jitter},
        {"rcond", number(model.solve.rcond)}}},
      {"lambda_trace", trace},
      {"fitted", vector(model.fitted)},
      {"hat_diag", vector(model.hat_diag)},
  };
}

}  // namespace splinefit
