#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftsurv/calibration.hpp"
#include "driftsurv/drift.hpp"
#include "driftsurv/evaluation.hpp"
#include "driftsurv/hazard.hpp"

namespace driftsurv::eval {

struct Scenario {
  std::string name;
  drift::DriftConfig drift;
};

struct ExperimentOptions {
  landmark::GridOptions grid;
  longitudinal::TrajectoryOptions trajectory;
  hazard::HazardConfig hazard;
  double f1_threshold = 0.5;
  double calibration_fraction = 0.2;
  unsigned jobs = 0;  // 0: hardware concurrency
};

/// Applies the scenario's drift and builds its landmark dataset.
landmark::LandmarkDataset scenario_dataset(const data::LoanPanel& panel, const Scenario& scenario,
                                           const ExperimentOptions& opt);

struct FoldFit {
  hazard::HazardModel model;
  std::optional<calibration::IsotonicMap> isotonic;  // M1-LMISO only
  std::vector<double> test_probs;
  std::vector<double> train_probs;  // final pipeline on the rows the hazard saw
};

/// Fits one variant on `train_rows` and predicts `test_rows`. M1-LMISO holds
/// out a grouped share of the training loans (drawn with `split_seed`) for its
/// isotonic map.
FoldFit fit_and_predict(const landmark::LandmarkDataset& ds, std::span<const std::size_t> train_rows,
                        std::span<const std::size_t> test_rows, hazard::Variant variant,
                        const ExperimentOptions& opt, std::uint64_t split_seed);

struct FoldResult {
  std::string scenario;
  std::string variant;
  int fold = 0;
  std::optional<double> auc;
  double brier = 0;
  double f1 = 0;
  double f1_prevalence = 0;  // F1 at the prevalence-matched threshold
  double prevalence_threshold = 0;
  std::size_t n_samples = 0;
  std::size_t n_positives = 0;
  std::size_t n_train = 0;
  bool converged = false;
};

struct MetricSummary {
  MeanSd stats;
  std::size_t n_missing = 0;
};

struct CellSummary {
  std::string scenario;
  std::string variant;
  MetricSummary auc, brier, f1, f1_prevalence;
  bool incomplete = false;  // some fold lacked a metric
};

struct ScenarioInfo {
  std::string name;
  drift::DriftConfig drift;
  std::vector<int> landmark_grid;
  std::size_t n_samples = 0;
  std::size_t n_positives = 0;
};

struct EvalReport {
  int k = 0;
  std::uint64_t cv_seed = 0;
  std::vector<std::string> variants;
  std::vector<ScenarioInfo> scenarios;
  std::vector<FoldResult> folds;  // scenario-major, then fold, then variant
  std::vector<CellSummary> summary;

  const CellSummary& cell(const std::string& scenario, const std::string& variant) const;
};

/// Every (scenario, fold, variant) task runs independently on a pool of
/// opt.jobs workers; results are stored by task index so the report does not
/// depend on the job count.
EvalReport run_experiment(const data::LoanPanel& panel, const std::vector<Scenario>& scenarios,
                          const std::vector<hazard::Variant>& variants, const FoldAssignment& folds,
                          const ExperimentOptions& opt);

/// Mean and SD per (scenario, variant) over the stored fold values.
std::vector<CellSummary> aggregate(const std::vector<FoldResult>& folds, const std::vector<std::string>& scenarios,
                                   const std::vector<std::string>& variants);

nlohmann::json to_json(const EvalReport& r);
/// "Model | AUC | Brier | F1" with mean (SD) cells for one scenario.
void write_table(std::ostream& out, const EvalReport& r, const std::string& scenario);
void write_metrics_csv(std::ostream& out, const EvalReport& r);

}  // namespace driftsurv::eval
