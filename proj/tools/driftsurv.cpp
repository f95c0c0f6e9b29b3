// driftsurv: ingest, synthesize, drift and evaluate loan panels.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "driftsurv/config.hpp"
#include "driftsurv/drift.hpp"
#include "driftsurv/error.hpp"
#include "driftsurv/experiment.hpp"
#include "driftsurv/panel_io.hpp"
#include "driftsurv/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace driftsurv;

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open '" + p.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + p.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  out << s;
}

json provenance_json(const data::Provenance& p) {
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  return {{"covariate_drift", opt(p.covariate_drift)},
          {"label_drift", opt(p.label_drift)},
          {"drift_seed", p.drift_seed ? json(*p.drift_seed) : json(nullptr)}};
}

struct IngestArgs {
  std::string orig, perf, schema, out, report;
};
struct SynthArgs {
  std::string config, out;
  std::uint64_t seed = 42;
  std::optional<int> n_loans, n_months;
};
struct SimulateArgs {
  std::string kind, in, out, config;
  std::uint64_t seed = 42;
  bool no_label = false;
};
struct ReportArgs {
  std::string in, out, csv, basis = "values";
  std::vector<std::string> vars{"cur_act_upb", "cur_int_rate", "eltv", "cur_loan_del", "assistance_code"};
};
struct RunArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
};

void cmd_ingest(const IngestArgs& a) {
  const auto schema =
      a.schema.empty() ? data::IngestSchema::freddie_mac() : data::IngestSchema::from_json(read_json(a.schema));
  const auto r = config::ingest_files(a.orig, a.perf, schema);
  data::save_panel(a.out, r.panel);
  const json rep{{"join", data::to_json(r.join)},
                 {"origination", config::to_json(r.origination)},
                 {"performance", config::to_json(r.performance)}};
  const fs::path report_path = a.report.empty() ? fs::path(a.out + ".join.json") : fs::path(a.report);
  write_text(report_path, rep.dump(2) + "\n");
  spdlog::info("ingest: {} loans, {} records -> {}", r.panel.loans.size(), r.panel.n_records(), a.out);
}

void cmd_synth(const SynthArgs& a) {
  data::SyntheticConfig cfg;
  if (!a.config.empty()) cfg = data::SyntheticConfig::from_json(read_json(a.config));
  if (a.n_loans) cfg.n_loans = *a.n_loans;
  if (a.n_months) cfg.n_months = *a.n_months;
  cfg.validate();
  const auto panel = data::generate_synthetic_portfolio(cfg, a.seed);
  data::save_panel(a.out, panel);
  spdlog::info("synth: {} loans, {} records -> {}", panel.loans.size(), panel.n_records(), a.out);
}

void cmd_simulate(const SimulateArgs& a) {
  drift::DriftConfig cfg;
  if (!a.config.empty()) cfg = drift::DriftConfig::from_json(read_json(a.config));
  if (!a.kind.empty()) cfg.kind = drift::parse_kind(a.kind);
  cfg.seed = a.seed;
  if (a.no_label) cfg.label_drift = false;
  auto panel = data::load_panel(a.in);
  panel = drift::apply_drift(std::move(panel), cfg);
  data::save_panel(a.out, panel);
  spdlog::info("simulate: {} drift applied -> {}", drift::kind_name(cfg.kind), a.out);
}

void cmd_drift_report(const ReportArgs& a) {
  const auto panel = data::load_panel(a.in);
  drift::IqrBasis basis;
  if (a.basis == "values") basis = drift::IqrBasis::Values;
  else if (a.basis == "changes") basis = drift::IqrBasis::Changes;
  else throw ConfigError("--basis must be values or changes");
  const auto rep = drift::drift_report(panel, a.vars, basis);
  write_text(a.out, drift::to_json(rep).dump(2) + "\n");
  const fs::path csv = a.csv.empty() ? fs::path(a.out).replace_extension(".csv") : fs::path(a.csv);
  std::ostringstream os;
  drift::write_severity_csv(os, rep);
  write_text(csv, os.str());
  std::cout << os.str();
}

void cmd_run(const RunArgs& a) {
  auto cfg = config::load_config(a.config, a.seed);
  if (!a.out.empty()) cfg.output_dir = a.out;
  cfg.options.jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
  const fs::path out = cfg.output_dir;
  fs::create_directories(out / "tables");
  write_text(out / "config.json", cfg.to_json().dump(2) + "\n");

  const auto panel = config::load_data(cfg.data);
  std::vector<std::string> ids;
  for (const auto& l : panel.loans) ids.push_back(l.orig.loan_id);
  const auto folds = eval::grouped_kfold(ids, cfg.k, cfg.cv_seed);
  const auto rep = eval::run_experiment(panel, cfg.scenarios, cfg.variants, folds, cfg.options);

  json scen = json::array();
  for (const auto& s : rep.scenarios)
    scen.push_back({{"name", s.name}, {"drift", s.drift.to_json()}, {"landmark_grid", s.landmark_grid}});
  const json prov{{"source", cfg.to_json()["data"]},
                  {"panel", provenance_json(panel.provenance)},
                  {"n_loans", panel.loans.size()},
                  {"n_records", panel.n_records()},
                  {"scenarios", scen}};
  write_text(out / "provenance.json", prov.dump(2) + "\n");
  write_text(out / "report.json", eval::to_json(rep).dump(2) + "\n");
  std::ostringstream csv;
  eval::write_metrics_csv(csv, rep);
  write_text(out / "metrics.csv", csv.str());
  for (const auto& s : rep.scenarios) {
    std::ostringstream t;
    eval::write_table(t, rep, s.name);
    write_text(out / "tables" / (s.name + ".txt"), t.str());
    std::cout << t.str() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landmark hazard models for loan default under concept drift"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")->capture_default_str();

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "Parse origination and performance files into a panel");
  ingest->add_option("--orig", ia.orig, "Origination file")->required();
  ingest->add_option("--perf", ia.perf, "Performance file")->required();
  ingest->add_option("--schema", ia.schema, "Column mapping JSON (default: Freddie Mac layout)");
  ingest->add_option("--out", ia.out, "Output panel")->required();
  ingest->add_option("--report", ia.report, "Join report JSON (default: <out>.join.json)");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic portfolio");
  synth->add_option("--config", sa.config, "Generator parameters JSON");
  synth->add_option("--seed", sa.seed)->capture_default_str();
  synth->add_option("--n", sa.n_loans, "Number of loans");
  synth->add_option("--months", sa.n_months, "Observation months");
  synth->add_option("--out", sa.out, "Output panel")->required();

  SimulateArgs ma;
  auto* simulate = app.add_subcommand("simulate", "Apply a drift scenario to a panel");
  simulate->add_option("--kind", ma.kind, "none, sudden, incremental or recurring");
  simulate->add_option("--config", ma.config, "Drift parameters JSON");
  simulate->add_option("--seed", ma.seed)->capture_default_str();
  simulate->add_flag("--no-label-drift", ma.no_label, "Covariate drift only");
  simulate->add_option("--in", ma.in, "Input panel")->required();
  simulate->add_option("--out", ma.out, "Output panel")->required();

  ReportArgs ra;
  auto* report = app.add_subcommand("drift-report", "Per-variable drift severity distribution");
  report->add_option("--in", ra.in, "Panel")->required();
  report->add_option("--vars", ra.vars, "Variables")->delimiter(',')->capture_default_str();
  report->add_option("--basis", ra.basis, "IQR basis: values or changes")->capture_default_str();
  report->add_option("--out", ra.out, "Report JSON")->required();
  report->add_option("--csv", ra.csv, "Summary CSV (default: next to --out)");

  RunArgs ua;
  auto* run = app.add_subcommand("run", "Cross-validated evaluation grid from a config file");
  run->add_option("--config", ua.config, "Experiment config JSON")->required();
  run->add_option("--out", ua.out, "Output directory (overrides the config)");
  run->add_option("--seed", ua.seed, "Master seed (overrides the config)");
  run->add_option("--jobs", ua.jobs, "Worker threads (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    set_log_level(log_level);
    if (*ingest) cmd_ingest(ia);
    else if (*synth) cmd_synth(sa);
    else if (*simulate) cmd_simulate(ma);
    else if (*report) cmd_drift_report(ra);
    else if (*run) cmd_run(ua);
    return 0;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const NumericError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const json::exception& e) {
    spdlog::error("invalid JSON value: {}", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
}
