#include <nlohmann/json.hpp>

#include "driftsurv/error.hpp"
#include "driftsurv/hazard.hpp"

namespace driftsurv::hazard {

namespace {
constexpr const char* kFormat = "driftsurv-hazard-model";
constexpr int kVersion = 1;
}  // namespace

nlohmann::json to_json(const FeatureEncodingSpec& spec) {
  nlohmann::json num = nlohmann::json::array();
  for (const auto& f : spec.numeric)
    num.push_back({{"name", f.name}, {"mean", f.mean}, {"sd", f.sd}, {"missing_indicator", f.missing_indicator}});
  nlohmann::json cat = nlohmann::json::array();
  for (const auto& f : spec.categorical)
    cat.push_back({{"name", f.name}, {"levels", f.levels}, {"missing_indicator", f.missing_indicator}});
  return {{"numeric", num},
          {"categorical", cat},
          {"include_marker", spec.include_marker},
          {"marker_missing_indicator", spec.marker_missing_indicator},
          {"include_landmark_onehot", spec.include_landmark_onehot},
          {"landmark_levels", spec.landmark_levels}};
}

FeatureEncodingSpec encoding_from_json(const nlohmann::json& j) {
  FeatureEncodingSpec spec;
  for (const auto& f : j.at("numeric"))
    spec.numeric.push_back({f.at("name").get<std::string>(), f.at("mean").get<double>(), f.at("sd").get<double>(),
                            f.at("missing_indicator").get<bool>()});
  for (const auto& f : j.at("categorical"))
    spec.categorical.push_back({f.at("name").get<std::string>(), f.at("levels").get<std::vector<std::string>>(),
                                f.at("missing_indicator").get<bool>()});
  spec.include_marker = j.at("include_marker").get<bool>();
  spec.marker_missing_indicator = j.at("marker_missing_indicator").get<bool>();
  spec.include_landmark_onehot = j.at("include_landmark_onehot").get<bool>();
  spec.landmark_levels = j.at("landmark_levels").get<std::vector<int>>();
  return spec;
}

nlohmann::json to_json(const HazardModel& m) {
  return {{"format", kFormat},
          {"version", kVersion},
          {"variant", variant_name(m.variant)},
          {"intercept", m.intercept},
          {"columns", m.encoding.column_names()},
          {"coefficients", m.coef},
          {"l2", m.l2},
          {"converged", m.converged},
          {"n_iter", m.n_iter},
          {"grad_max_norm", m.grad_max_norm},
          {"encoding", to_json(m.encoding)}};
}

HazardModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != kFormat) throw DataError("not a hazard model document");
  if (j.value("version", 0) != kVersion) throw DataError("unsupported hazard model version");
  HazardModel m;
  m.variant = parse_variant(j.at("variant").get<std::string>());
  m.encoding = encoding_from_json(j.at("encoding"));
  m.intercept = j.at("intercept").get<double>();
  m.coef = j.at("coefficients").get<std::vector<double>>();
  m.l2 = j.at("l2").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.n_iter = j.at("n_iter").get<int>();
  m.grad_max_norm = j.at("grad_max_norm").get<double>();
  if (m.coef.size() != m.encoding.n_columns()) throw DataError("hazard model: coefficient count mismatch");
  return m;
}

}  // namespace driftsurv::hazard
