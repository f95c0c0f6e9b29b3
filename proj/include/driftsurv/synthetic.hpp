#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftsurv/data_model.hpp"

namespace driftsurv::data {

/// Monthly default hazard used by the generator:
///   logit h(t) = intercept + a . z(orig) + g * m(t)
/// with z the centred/scaled static covariates below and m(t) the true
/// balance deviation of that month.
struct HazardLaw {
  double intercept = -4.0;
  double credit_score = -0.45;  // per (score - 740) / 45
  double dti = 0.25;            // per (dti - 35) / 9
  double ltv = 0.25;            // per (ltv - 75) / 15
  double rate = 0.2;            // per (rate - rate_mean) / rate_sd
  double g = 40.0;              // per unit balance deviation

  static constexpr std::size_t kStatic = 4;
};

struct SyntheticConfig {
  int n_loans = 5000;
  int n_months = 60;
  std::int64_t first_period = 1;

  std::vector<int> terms{360, 180};
  std::vector<double> term_weights{0.8, 0.2};
  double rate_mean = 3.2;
  double rate_sd = 0.4;
  double credit_mean = 740;
  double credit_sd = 45;
  double dti_mean = 35;
  double dti_sd = 9;
  double ltv_mean = 75;
  double ltv_sd = 15;
  double log_upb_mean = 12.4;
  double log_upb_sd = 0.45;
  double missing_static_rate = 0.01;

  HazardLaw law;

  // Balance deviation m(t) = level + trend * t/N + noise.
  double level_sd = 0.06;
  double trend_sd = 0.3;
  double noise_sd = 0.002;

  double prepay_rate = 0.006;          // monthly
  int delinquent_months_before_exit = 6;
  double hpa_mean = 0.03;              // annual house price growth
  double hpa_sd = 0.04;                // across loans
  double avm_noise_sd = 0.01;          // month-to-month valuation noise
  double assistance_rate = 0.3;        // P(assistance code | delinquent)

  void validate() const;
  static SyntheticConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Centred and scaled static covariates z(orig) entering the hazard law.
  /// Missing values contribute 0.
  std::array<double, HazardLaw::kStatic> hazard_covariates(const LoanOrigination& o) const;
};

LoanPanel generate_synthetic_portfolio(const SyntheticConfig& cfg, std::uint64_t seed);

}  // namespace driftsurv::data
