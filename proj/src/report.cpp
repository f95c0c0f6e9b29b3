#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "driftsurv/experiment.hpp"

namespace driftsurv::eval {

namespace {

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json summary_json(const MetricSummary& m) {
  return {{"mean", m.stats.n ? nlohmann::json(m.stats.mean) : nlohmann::json(nullptr)},
          {"sd", m.stats.n ? nlohmann::json(m.stats.sd) : nlohmann::json(nullptr)},
          {"n_folds", m.stats.n},
          {"n_missing", m.n_missing}};
}

std::string cell_text(const MetricSummary& m) {
  if (m.stats.n == 0) return "n/a";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f (%.3f)%s", m.stats.mean, m.stats.sd, m.n_missing ? "*" : "");
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json scen = nlohmann::json::array();
  for (const auto& s : r.scenarios)
    scen.push_back({{"name", s.name},
                    {"drift", s.drift.to_json()},
                    {"landmark_grid", s.landmark_grid},
                    {"n_samples", s.n_samples},
                    {"n_positives", s.n_positives}});
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"scenario", f.scenario},
                     {"variant", f.variant},
                     {"fold", f.fold},
                     {"auc", opt_json(f.auc)},
                     {"brier", f.brier},
                     {"f1", f.f1},
                     {"f1_prevalence", f.f1_prevalence},
                     {"prevalence_threshold", f.prevalence_threshold},
                     {"n_samples", f.n_samples},
                     {"n_positives", f.n_positives},
                     {"n_train", f.n_train},
                     {"converged", f.converged}});
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& c : r.summary)
    summary.push_back({{"scenario", c.scenario},
                       {"variant", c.variant},
                       {"auc", summary_json(c.auc)},
                       {"brier", summary_json(c.brier)},
                       {"f1", summary_json(c.f1)},
                       {"f1_prevalence", summary_json(c.f1_prevalence)},
                       {"incomplete", c.incomplete}});
  return {{"format", "driftsurv-eval-report"},
          {"version", 1},
          {"k", r.k},
          {"cv_seed", r.cv_seed},
          {"variants", r.variants},
          {"scenarios", scen},
          {"folds", folds},
          {"summary", summary}};
}

void write_table(std::ostream& out, const EvalReport& r, const std::string& scenario) {
  std::vector<std::array<std::string, 4>> rows{{"Model", "AUC", "Brier", "F1"}};
  bool flagged = false;
  for (const auto& v : r.variants) {
    const auto& c = r.cell(scenario, v);
    rows.push_back({v, cell_text(c.auc), cell_text(c.brier), cell_text(c.f1)});
    flagged |= c.incomplete;
  }
  std::array<std::size_t, 4> width{};
  for (const auto& row : rows)
    for (std::size_t j = 0; j < 4; ++j) width[j] = std::max(width[j], row[j].size());
  auto line = [&](const std::array<std::string, 4>& row) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (j) out << " | ";
      out << row[j] << std::string(width[j] - row[j].size(), ' ');
    }
    out << '\n';
  };
  out << "Scenario: " << scenario << '\n';
  line(rows[0]);
  for (std::size_t j = 0; j < 4; ++j) out << (j ? "-+-" : "") << std::string(width[j], '-');
  out << '\n';
  for (std::size_t i = 1; i < rows.size(); ++i) line(rows[i]);
  if (flagged) out << "* some folds had an undefined metric and were left out of the mean\n";
}

void write_metrics_csv(std::ostream& out, const EvalReport& r) {
  out << "scenario,variant,fold,auc,brier,f1,f1_prevalence,prevalence_threshold,n_samples,n_positives,n_train\n";
  for (const auto& f : r.folds)
    out << f.scenario << ',' << f.variant << ',' << f.fold << ',' << (f.auc ? num(*f.auc) : "") << ','
        << num(f.brier) << ',' << num(f.f1) << ',' << num(f.f1_prevalence) << ',' << num(f.prevalence_threshold)
        << ',' << f.n_samples << ',' << f.n_positives << ',' << f.n_train << '\n';
}

}  // namespace driftsurv::eval
