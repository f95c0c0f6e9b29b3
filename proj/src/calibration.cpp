#include "driftsurv/calibration.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "driftsurv/error.hpp"

namespace driftsurv::calibration {

IsotonicMap fit_isotonic(std::span<const double> raw, std::span<const double> labels) {
  if (raw.size() != labels.size()) throw std::invalid_argument("fit_isotonic: size mismatch");
  if (raw.size() < 2) throw std::invalid_argument("fit_isotonic: need at least two points");
  for (double p : raw)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("fit_isotonic: raw scores must lie in [0,1]");

  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });

  struct Block {
    double start;
    double sum;
    double weight;
    double mean() const { return sum / weight; }
  };
  std::vector<Block> stack;
  stack.reserve(raw.size());
  for (std::size_t k = 0; k < order.size();) {
    // Tied raw scores form one block.
    Block b{raw[order[k]], 0.0, 0.0};
    while (k < order.size() && raw[order[k]] == b.start) {
      b.sum += labels[order[k]];
      b.weight += 1.0;
      ++k;
    }
    stack.push_back(b);
    while (stack.size() >= 2 && stack[stack.size() - 2].mean() > stack.back().mean()) {
      Block top = stack.back();
      stack.pop_back();
      stack.back().sum += top.sum;
      stack.back().weight += top.weight;
    }
  }

  IsotonicMap map;
  map.n_fit = raw.size();
  for (const auto& b : stack) {
    map.boundaries.push_back(b.start);
    map.values.push_back(std::clamp(b.mean(), 0.0, 1.0));
    map.weights.push_back(b.weight);
  }
  return map;
}

double apply_isotonic(const IsotonicMap& map, double p) {
  if (map.values.empty()) throw std::invalid_argument("apply_isotonic: empty map");
  auto it = std::upper_bound(map.boundaries.begin(), map.boundaries.end(), p);
  if (it == map.boundaries.begin()) return map.values.front();
  return map.values[static_cast<std::size_t>(it - map.boundaries.begin()) - 1];
}

std::vector<double> apply_isotonic(const IsotonicMap& map, std::span<const double> p) {
  std::vector<double> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(), [&](double v) { return apply_isotonic(map, v); });
  return out;
}

CalibratedPrediction calibrate_pipeline(const landmark::LandmarkDataset& ds, hazard::Variant base,
                                        const hazard::HazardConfig& cfg, std::span<const std::size_t> train_rows,
                                        std::span<const std::size_t> calib_rows,
                                        std::span<const std::size_t> eval_rows) {
  std::set<std::string> train_loans;
  for (auto r : train_rows) train_loans.insert(ds.samples[r].loan_id);
  for (auto r : calib_rows)
    if (train_loans.count(ds.samples[r].loan_id))
      throw DataError("calibrate_pipeline: loan '" + ds.samples[r].loan_id + "' in both train and calibration");

  CalibratedPrediction out;
  out.model = hazard::make_variant(ds, train_rows, base, cfg, eval_rows);
  const auto calib_raw = hazard::predict(out.model, ds, calib_rows);
  std::vector<double> calib_y;
  calib_y.reserve(calib_rows.size());
  for (auto r : calib_rows) calib_y.push_back(ds.samples[r].label);
  const bool one_class = std::all_of(calib_y.begin(), calib_y.end(), [&](double y) { return y == calib_y.front(); });
  if (one_class) spdlog::warn("calibrate_pipeline: calibration split has one class; map is constant");
  out.map = fit_isotonic(calib_raw, calib_y);
  if (eval_rows.empty()) return out;
  out.raw = hazard::predict(out.model, ds, eval_rows);
  out.calibrated = apply_isotonic(out.map, out.raw);
  return out;
}

nlohmann::json to_json(const IsotonicMap& map) {
  return {{"boundaries", map.boundaries}, {"values", map.values}, {"weights", map.weights}, {"n_fit", map.n_fit}};
}

IsotonicMap isotonic_from_json(const nlohmann::json& j) {
  IsotonicMap m;
  m.boundaries = j.at("boundaries").get<std::vector<double>>();
  m.values = j.at("values").get<std::vector<double>>();
  m.weights = j.value("weights", std::vector<double>{});
  m.n_fit = j.value("n_fit", std::size_t{0});
  if (m.boundaries.size() != m.values.size() || m.values.empty())
    throw DataError("isotonic map: boundaries and values must be non-empty and equal length");
  return m;
}

nlohmann::json calibrated_model_to_json(const hazard::HazardModel& m, const IsotonicMap& map) {
  auto j = hazard::to_json(m);
  j["calibration"] = to_json(map);
  return j;
}

}  // namespace driftsurv::calibration
