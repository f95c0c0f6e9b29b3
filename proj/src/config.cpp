#include "driftsurv/config.hpp"

#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "driftsurv/error.hpp"
#include "driftsurv/panel_io.hpp"

namespace driftsurv::config {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
void rd(const json& j, const char* k, T& v, const std::string& where) {
  if (!j.contains(k)) return;
  try {
    v = j.at(k).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + k + ": " + e.what());
  }
}

const char* source_name(SourceKind k) {
  switch (k) {
    case SourceKind::Synthetic: return "synthetic";
    case SourceKind::Files: return "files";
    case SourceKind::Panel: return "panel";
  }
  return "?";
}

DataSource data_from_json(const json& j, std::uint64_t seed) {
  DataSource d;
  d.seed = seed;
  check_keys(j, {"source", "synthetic", "seed", "origination", "performance", "schema", "panel"}, "data");
  std::string src = "synthetic";
  rd(j, "source", src, "data");
  if (src == "synthetic") {
    d.kind = SourceKind::Synthetic;
    if (j.contains("synthetic")) d.synthetic = data::SyntheticConfig::from_json(j.at("synthetic"));
    rd(j, "seed", d.seed, "data");
  } else if (src == "files") {
    d.kind = SourceKind::Files;
    if (!j.contains("origination") || !j.contains("performance"))
      throw ConfigError("data: source 'files' needs 'origination' and 'performance'");
    d.origination = j.at("origination").get<std::string>();
    d.performance = j.at("performance").get<std::string>();
    if (j.contains("schema")) {
      d.schema = j.at("schema");
      data::IngestSchema::from_json(d.schema);  // validate early
    }
  } else if (src == "panel") {
    d.kind = SourceKind::Panel;
    if (!j.contains("panel")) throw ConfigError("data: source 'panel' needs 'panel'");
    d.panel = j.at("panel").get<std::string>();
  } else {
    throw ConfigError("data.source must be synthetic, files or panel, got '" + src + "'");
  }
  d.synthetic.validate();
  return d;
}

json data_to_json(const DataSource& d) {
  json j{{"source", source_name(d.kind)}};
  switch (d.kind) {
    case SourceKind::Synthetic:
      j["synthetic"] = d.synthetic.to_json();
      j["seed"] = d.seed;
      break;
    case SourceKind::Files:
      j["origination"] = d.origination.string();
      j["performance"] = d.performance.string();
      if (!d.schema.is_null()) j["schema"] = d.schema;
      break;
    case SourceKind::Panel:
      j["panel"] = d.panel.string();
      break;
  }
  return j;
}

std::vector<eval::Scenario> scenarios_from_json(const json& j, std::uint64_t seed) {
  if (!j.is_array() || j.empty()) throw ConfigError("scenarios must be a non-empty array");
  std::vector<eval::Scenario> out;
  std::set<std::string> names;
  for (const auto& e : j) {
    eval::Scenario s;
    if (e.is_string()) {
      s.name = e.get<std::string>();
      s.drift.kind = drift::parse_kind(s.name);
      s.drift.seed = seed;
    } else {
      check_keys(e, {"name", "drift"}, "scenario");
      json d = e.value("drift", json::object());
      if (!d.contains("seed")) d["seed"] = seed;
      s.drift = drift::DriftConfig::from_json(d);
      s.name = e.value("name", drift::kind_name(s.drift.kind));
    }
    if (!names.insert(s.name).second) throw ConfigError("duplicate scenario name '" + s.name + "'");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, std::optional<std::uint64_t> seed_override) {
  check_keys(j, {"seed", "data", "scenarios", "variants", "landmarks", "cv", "model", "features", "output_dir"},
             "config");
  ExperimentConfig c;
  rd(j, "seed", c.seed, "config");
  if (seed_override) c.seed = *seed_override;

  c.data = data_from_json(j.value("data", json::object()), c.seed);
  c.scenarios = scenarios_from_json(j.value("scenarios", json{"sudden", "incremental", "recurring"}), c.seed);

  const json variants = j.value("variants", json{"M1", "M1-Joint", "M1-LM", "M1-TD", "M1-IW", "M1-LMISO"});
  if (!variants.is_array() || variants.empty()) throw ConfigError("variants must be a non-empty array");
  for (const auto& v : variants) {
    const auto parsed = hazard::parse_variant(v.get<std::string>());
    if (std::find(c.variants.begin(), c.variants.end(), parsed) != c.variants.end())
      throw ConfigError("duplicate variant '" + v.get<std::string>() + "'");
    c.variants.push_back(parsed);
  }

  auto& o = c.options;
  if (j.contains("landmarks")) {
    const auto& l = j.at("landmarks");
    check_keys(l, {"start", "step", "horizon", "min_risk", "locf_max"}, "landmarks");
    rd(l, "start", o.grid.start, "landmarks");
    rd(l, "step", o.grid.step, "landmarks");
    rd(l, "horizon", o.grid.horizon, "landmarks");
    rd(l, "min_risk", o.grid.min_risk, "landmarks");
    rd(l, "locf_max", o.grid.locf_max, "landmarks");
  }
  if (o.grid.start < 1 || o.grid.step < 1 || o.grid.horizon < 1 || o.grid.min_risk < 1 || o.grid.locf_max < 0)
    throw ConfigError("landmarks: start, step, horizon and min_risk must be positive, locf_max non-negative");

  c.cv_seed = c.seed;
  if (j.contains("cv")) {
    const auto& cv = j.at("cv");
    check_keys(cv, {"k", "seed"}, "cv");
    rd(cv, "k", c.k, "cv");
    rd(cv, "seed", c.cv_seed, "cv");
  }
  if (c.k < 2) throw ConfigError("cv.k must be at least 2");

  auto& h = o.hazard;
  if (j.contains("model")) {
    const auto& m = j.at("model");
    check_keys(m,
               {"ridge_lambda", "l2", "class_weight", "td_half_life", "iw_clip", "iw_l2", "max_iter", "grad_tol", "f1_threshold",
                "calibration_fraction"},
               "model");
    rd(m, "ridge_lambda", o.trajectory.lambda, "model");
    rd(m, "l2", h.l2, "model");
    if (m.contains("class_weight")) h.class_weight = hazard::parse_class_weight(m.at("class_weight").get<std::string>());
    rd(m, "td_half_life", h.td_half_life, "model");
    if (m.contains("iw_clip")) {
      const auto v = m.at("iw_clip").get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("model.iw_clip must be [lo, hi]");
      h.iw_clip = {v[0], v[1]};
    }
    rd(m, "iw_l2", h.iw_l2, "model");
    rd(m, "max_iter", h.max_iter, "model");
    rd(m, "grad_tol", h.grad_tol, "model");
    rd(m, "f1_threshold", o.f1_threshold, "model");
    rd(m, "calibration_fraction", o.calibration_fraction, "model");
  }
  if (!(o.trajectory.lambda > 0)) throw ConfigError("model.ridge_lambda must be positive");
  if (!(h.l2 >= 0)) throw ConfigError("model.l2 must be non-negative");
  if (!(h.td_half_life > 0)) throw ConfigError("model.td_half_life must be positive");
  if (!(h.iw_clip.first > 0 && h.iw_clip.first <= h.iw_clip.second))
    throw ConfigError("model.iw_clip needs 0 < lo <= hi");
  if (!(o.f1_threshold > 0 && o.f1_threshold < 1)) throw ConfigError("model.f1_threshold must be in (0,1)");
  if (!(o.calibration_fraction > 0 && o.calibration_fraction < 1))
    throw ConfigError("model.calibration_fraction must be in (0,1)");
  if (h.max_iter < 1) throw ConfigError("model.max_iter must be positive");

  if (j.contains("features")) {
    const auto& f = j.at("features");
    check_keys(f, {"numeric", "categorical"}, "features");
    rd(f, "numeric", h.features.numeric, "features");
    rd(f, "categorical", h.features.categorical, "features");
  }
  h.features.validate();
  rd(j, "output_dir", c.output_dir, "config");
  return c;
}

json ExperimentConfig::to_json() const {
  json scen = json::array();
  for (const auto& s : scenarios) scen.push_back({{"name", s.name}, {"drift", s.drift.to_json()}});
  json vars = json::array();
  for (auto v : variants) vars.push_back(hazard::variant_name(v));
  const auto& o = options;
  const auto& h = o.hazard;
  return {{"seed", seed},
          {"data", data_to_json(data)},
          {"scenarios", scen},
          {"variants", vars},
          {"landmarks",
           {{"start", o.grid.start},
            {"step", o.grid.step},
            {"horizon", o.grid.horizon},
            {"min_risk", o.grid.min_risk},
            {"locf_max", o.grid.locf_max}}},
          {"cv", {{"k", k}, {"seed", cv_seed}}},
          {"model",
           {{"ridge_lambda", o.trajectory.lambda},
            {"l2", h.l2},
            {"class_weight", hazard::class_weight_name(h.class_weight)},
            {"td_half_life", h.td_half_life},
            {"iw_clip", {h.iw_clip.first, h.iw_clip.second}},
            {"iw_l2", h.iw_l2},
            {"max_iter", h.max_iter},
            {"grad_tol", h.grad_tol},
            {"f1_threshold", o.f1_threshold},
            {"calibration_fraction", o.calibration_fraction}}},
          {"features", {{"numeric", h.features.numeric}, {"categorical", h.features.categorical}}},
          {"output_dir", output_dir}};
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return ExperimentConfig::from_json(j, seed_override);
}

json to_json(const data::ParseStats& s) {
  return {{"lines", s.lines},
          {"malformed", s.malformed},
          {"malformed_lines", s.malformed_lines},
          {"values_set_missing", s.values_set_missing},
          {"unknown_delinquency_codes", s.unknown_delinquency_codes}};
}

IngestResult ingest_files(const std::filesystem::path& origination, const std::filesystem::path& performance,
                          const data::IngestSchema& schema) {
  std::ifstream fo(origination), fp(performance);
  if (!fo) throw DataError("cannot open origination file '" + origination.string() + "'");
  if (!fp) throw DataError("cannot open performance file '" + performance.string() + "'");
  auto po = data::parse_origination(fo, schema);
  auto pp = data::parse_performance(fp, schema);
  IngestResult r;
  r.origination = po.stats;
  r.performance = pp.stats;
  auto joined = data::join_panel(std::move(po.records), std::move(pp.records));
  r.panel = std::move(joined.panel);
  r.join = joined.report;
  if (r.panel.loans.empty()) spdlog::warn("ingest: no loans survived parsing and joining");
  return r;
}

data::LoanPanel load_data(const DataSource& src) {
  switch (src.kind) {
    case SourceKind::Synthetic:
      return data::generate_synthetic_portfolio(src.synthetic, src.seed);
    case SourceKind::Files: {
      const auto schema = src.schema.is_null() ? data::IngestSchema::freddie_mac() : data::IngestSchema::from_json(src.schema);
      return ingest_files(src.origination, src.performance, schema).panel;
    }
    case SourceKind::Panel:
      return data::load_panel(src.panel);
  }
  throw ConfigError("unknown data source");
}

}  // namespace driftsurv::config
