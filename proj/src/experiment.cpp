#include "driftsurv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <thread>

#include <spdlog/spdlog.h>

#include "driftsurv/error.hpp"
#include "driftsurv/rng.hpp"

namespace driftsurv::eval {

namespace {

constexpr std::uint64_t kCalibStream = 0x15c0;

std::vector<double> labels_of(const landmark::LandmarkDataset& ds, std::span<const std::size_t> rows) {
  std::vector<double> y;
  y.reserve(rows.size());
  for (auto r : rows) y.push_back(ds.samples[r].label);
  return y;
}

// Runs f(0..n-1) on up to `jobs` threads. The first failure by task index is
// rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

landmark::LandmarkDataset scenario_dataset(const data::LoanPanel& panel, const Scenario& scenario,
                                           const ExperimentOptions& opt) {
  const auto drifted = drift::apply_drift(panel, scenario.drift);
  const auto grid = landmark::landmark_grid(drifted, opt.grid);
  return landmark::build_landmark_dataset(drifted, grid, opt.grid.horizon,
                                          landmark::ridge_trajectory(opt.trajectory), opt.grid.locf_max);
}

FoldFit fit_and_predict(const landmark::LandmarkDataset& ds, std::span<const std::size_t> train_rows,
                        std::span<const std::size_t> test_rows, hazard::Variant variant,
                        const ExperimentOptions& opt, std::uint64_t split_seed) {
  FoldFit out;
  if (hazard::uses_isotonic(variant)) {
    const auto [fit_rows, calib_rows] = grouped_holdout(ds, train_rows, opt.calibration_fraction, split_seed);
    auto cp = calibration::calibrate_pipeline(ds, hazard::Variant::M1LM, opt.hazard, fit_rows, calib_rows, test_rows);
    cp.model.variant = variant;
    out.train_probs = calibration::apply_isotonic(cp.map, hazard::predict(cp.model, ds, fit_rows));
    out.test_probs = std::move(cp.calibrated);
    out.model = std::move(cp.model);
    out.isotonic = std::move(cp.map);
    return out;
  }
  out.model = hazard::make_variant(ds, train_rows, variant, opt.hazard, test_rows);
  out.train_probs = hazard::predict(out.model, ds, train_rows);
  out.test_probs = hazard::predict(out.model, ds, test_rows);
  return out;
}

const CellSummary& EvalReport::cell(const std::string& scenario, const std::string& variant) const {
  for (const auto& c : summary)
    if (c.scenario == scenario && c.variant == variant) return c;
  throw ConfigError("report has no cell for (" + scenario + ", " + variant + ")");
}

std::vector<CellSummary> aggregate(const std::vector<FoldResult>& folds, const std::vector<std::string>& scenarios,
                                   const std::vector<std::string>& variants) {
  std::vector<CellSummary> out;
  for (const auto& s : scenarios)
    for (const auto& v : variants) {
      CellSummary c;
      c.scenario = s;
      c.variant = v;
      std::vector<double> a, b, f, fp;
      for (const auto& r : folds) {
        if (r.scenario != s || r.variant != v) continue;
        if (r.auc)
          a.push_back(*r.auc);
        else
          ++c.auc.n_missing;
        b.push_back(r.brier);
        f.push_back(r.f1);
        fp.push_back(r.f1_prevalence);
      }
      c.auc.stats = mean_sd(a);
      c.brier.stats = mean_sd(b);
      c.f1.stats = mean_sd(f);
      c.f1_prevalence.stats = mean_sd(fp);
      c.incomplete = c.auc.n_missing > 0;
      out.push_back(std::move(c));
    }
  return out;
}

EvalReport run_experiment(const data::LoanPanel& panel, const std::vector<Scenario>& scenarios,
                          const std::vector<hazard::Variant>& variants, const FoldAssignment& folds,
                          const ExperimentOptions& opt) {
  if (scenarios.empty()) throw ConfigError("run_experiment: no scenarios");
  if (variants.empty()) throw ConfigError("run_experiment: no variants");
  for (const auto& l : panel.loans) folds.fold_of(l.orig.loan_id);

  EvalReport rep;
  rep.k = folds.k;
  rep.cv_seed = folds.seed;
  for (auto v : variants) rep.variants.push_back(hazard::variant_name(v));

  std::vector<landmark::LandmarkDataset> datasets(scenarios.size());
  parallel_for(scenarios.size(), opt.jobs, [&](std::size_t i) {
    datasets[i] = scenario_dataset(panel, scenarios[i], opt);
  });
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    ScenarioInfo info{scenarios[i].name, scenarios[i].drift, datasets[i].landmark_grid, datasets[i].samples.size(), 0};
    for (const auto& s : datasets[i].samples) info.n_positives += static_cast<std::size_t>(s.label);
    spdlog::info("scenario {}: {} landmark samples, {} positive, landmarks {}..{}", info.name, info.n_samples,
                 info.n_positives, info.landmark_grid.front(), info.landmark_grid.back());
    rep.scenarios.push_back(std::move(info));
  }

  const std::size_t nv = variants.size(), nk = static_cast<std::size_t>(folds.k);
  rep.folds.resize(scenarios.size() * nk * nv);
  parallel_for(rep.folds.size(), opt.jobs, [&](std::size_t task) {
    const std::size_t si = task / (nk * nv), fi = (task / nv) % nk, vi = task % nv;
    const auto& ds = datasets[si];
    const int fold = static_cast<int>(fi);
    const auto train = folds.train_rows(ds, fold);
    const auto test = folds.test_rows(ds, fold);
    if (test.empty()) throw DataError("fold " + std::to_string(fold) + " has no landmark samples");
    const auto fit = fit_and_predict(ds, train, test, variants[vi], opt, derive_seed(folds.seed, kCalibStream, fi));

    const auto y = labels_of(ds, test);
    const auto y_train = labels_of(ds, train);
    FoldResult r;
    r.scenario = scenarios[si].name;
    r.variant = rep.variants[vi];
    r.fold = fold;
    r.auc = auc(y, fit.test_probs);
    r.brier = brier(y, fit.test_probs);
    r.f1 = f1(y, fit.test_probs, opt.f1_threshold);
    const double prevalence = std::accumulate(y_train.begin(), y_train.end(), 0.0) / y_train.size();
    const double thr = drift::quantile(fit.train_probs, 1.0 - prevalence);
    r.prevalence_threshold = std::clamp(thr, 1e-12, 1.0 - 1e-12);
    r.f1_prevalence = f1(y, fit.test_probs, r.prevalence_threshold);
    r.n_samples = test.size();
    r.n_positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1.0));
    r.n_train = train.size();
    r.converged = fit.model.converged;
    if (!r.auc)
      spdlog::warn("{} / {} / fold {}: one-class test labels, AUC recorded missing", r.scenario, r.variant, fold);
    rep.folds[task] = std::move(r);
  });

  std::vector<std::string> names;
  for (const auto& s : scenarios) names.push_back(s.name);
  rep.summary = aggregate(rep.folds, names, rep.variants);
  return rep;
}

}  // namespace driftsurv::eval
