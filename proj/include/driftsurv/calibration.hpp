#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftsurv/hazard.hpp"

namespace driftsurv::calibration {

/// Non-decreasing step function. Block k covers raw scores in
/// [boundaries[k], boundaries[k+1]) and maps them to values[k]; scores below
/// the first knot take values[0], above the last take values.back().
struct IsotonicMap {
  std::vector<double> boundaries;  // strictly ascending
  std::vector<double> values;      // non-decreasing, in [0, 1]
  std::vector<double> weights;     // fitting points pooled into each block
  std::size_t n_fit = 0;

  bool operator==(const IsotonicMap&) const = default;
};

/// Least-squares monotone fit by pool-adjacent-violators. Equal raw scores
/// are pooled into one block before PAVA runs.
IsotonicMap fit_isotonic(std::span<const double> raw, std::span<const double> labels);

double apply_isotonic(const IsotonicMap& map, double p);
std::vector<double> apply_isotonic(const IsotonicMap& map, std::span<const double> p);

struct CalibratedPrediction {
  hazard::HazardModel model;
  IsotonicMap map;
  std::vector<double> raw;
  std::vector<double> calibrated;
};

/// Hazard fit on `train_rows`, isotonic map fit on the raw predictions for
/// `calib_rows`, both applied to `eval_rows`. The two fitting sets must not
/// share a loan.
CalibratedPrediction calibrate_pipeline(const landmark::LandmarkDataset& ds, hazard::Variant base,
                                        const hazard::HazardConfig& cfg, std::span<const std::size_t> train_rows,
                                        std::span<const std::size_t> calib_rows,
                                        std::span<const std::size_t> eval_rows);

nlohmann::json to_json(const IsotonicMap& map);
IsotonicMap isotonic_from_json(const nlohmann::json& j);

/// Model document with the isotonic map stored under "calibration".
nlohmann::json calibrated_model_to_json(const hazard::HazardModel& m, const IsotonicMap& map);

}  // namespace driftsurv::calibration
