#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "driftsurv/data_model.hpp"
#include "driftsurv/longitudinal.hpp"

namespace driftsurv::landmark {

struct GridOptions {
  int start = 12;
  int step = 3;
  int horizon = 12;
  int min_risk = 100;
  int locf_max = 3;  // months a carried-forward record may be stale
};

/// Time-varying covariates as known at the landmark age.
struct DynamicFeatures {
  int loan_age = 0;  // age of the record the values were taken from
  std::optional<double> cur_int_rate;
  std::optional<double> eltv;
  std::optional<double> cur_act_upb;
  std::optional<double> cnib_upb;
  bool assistance = false;

  bool operator==(const DynamicFeatures&) const = default;
};

struct LandmarkSample {
  std::string loan_id;
  int landmark = 0;
  int horizon = 0;
  data::LoanOrigination statics;
  DynamicFeatures dynamic;
  std::optional<double> marker;
  int label = 0;

  bool operator==(const LandmarkSample&) const = default;
};

struct LandmarkDataset {
  std::vector<LandmarkSample> samples;  // ordered by landmark, then loan_id
  std::vector<int> landmark_grid;
  int horizon = 0;
  // Rows labelled 0 although the loan left observation inside the horizon.
  std::size_t censored_in_horizon = 0;
  std::size_t prepaid_in_horizon = 0;
};

/// Index of the record carrying the loan's information at age L, or nullopt if
/// the loan is not at risk (defaulted or exited at age <= L, or no record in
/// [L - locf_max, L]).
std::optional<std::size_t> at_risk_record(const data::Loan& loan, int landmark, int locf_max);

std::size_t risk_set_size(const data::LoanPanel& panel, int landmark, int locf_max);

/// Landmarks start, start+step, ... while L + horizon <= max loan age and at
/// least min_risk loans are at risk. Throws ConfigError if empty.
std::vector<int> landmark_grid(const data::LoanPanel& panel, const GridOptions& opt);

/// Marker value m(L) for a loan; nullopt when no usable balance history.
using TrajectoryFn = std::function<std::optional<double>(const data::Loan&, int landmark)>;

/// Trajectory fitted on months <= L, evaluated at L.
TrajectoryFn ridge_trajectory(longitudinal::TrajectoryOptions opt = {});

/// 1 iff a known non-zero delinquency code occurs at age in (L, L+H].
int landmark_label(const data::Loan& loan, int landmark, int horizon);

LandmarkDataset build_landmark_dataset(const data::LoanPanel& panel, const std::vector<int>& grid,
                                       int horizon, const TrajectoryFn& trajectory,
                                       int locf_max = 3);

/// One '|' delimited row per sample with a header line.
void write_landmark_dataset(std::ostream& out, const LandmarkDataset& ds);

}  // namespace driftsurv::landmark
