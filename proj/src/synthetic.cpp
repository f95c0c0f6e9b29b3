#include "driftsurv/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/fmt/fmt.h>

#include "driftsurv/error.hpp"
#include "driftsurv/longitudinal.hpp"
#include "driftsurv/rng.hpp"

namespace driftsurv::data {

namespace {

constexpr std::uint64_t kLoanStream = 0x51;

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

void SyntheticConfig::validate() const {
  if (n_loans <= 0) throw ConfigError("synthetic: n_loans must be positive");
  if (n_months <= 0) throw ConfigError("synthetic: n_months must be positive");
  if (terms.empty() || terms.size() != term_weights.size())
    throw ConfigError("synthetic: terms and term_weights must be non-empty and equal length");
  for (int t : terms)
    if (t <= 0) throw ConfigError("synthetic: loan terms must be positive");
  double wsum = 0;
  for (double w : term_weights) {
    if (w < 0) throw ConfigError("synthetic: negative term weight");
    wsum += w;
  }
  if (!(wsum > 0)) throw ConfigError("synthetic: term weights sum to zero");
  if (!(rate_sd > 0) || !(credit_sd > 0) || !(dti_sd > 0) || !(ltv_sd > 0) || !(log_upb_sd > 0))
    throw ConfigError("synthetic: standard deviations must be positive");
  if (level_sd < 0 || trend_sd < 0 || noise_sd < 0 || hpa_sd < 0 || avm_noise_sd < 0)
    throw ConfigError("synthetic: noise scales must be non-negative");
  if (prepay_rate < 0 || prepay_rate >= 1) throw ConfigError("synthetic: prepay_rate must be in [0,1)");
  if (missing_static_rate < 0 || missing_static_rate >= 1)
    throw ConfigError("synthetic: missing_static_rate must be in [0,1)");
  if (assistance_rate < 0 || assistance_rate > 1) throw ConfigError("synthetic: assistance_rate must be in [0,1]");
  if (delinquent_months_before_exit < 1) throw ConfigError("synthetic: delinquent_months_before_exit must be >= 1");
}

SyntheticConfig SyntheticConfig::from_json(const nlohmann::json& j) {
  static const std::set<std::string> allowed{
      "n_loans",      "n_months",      "first_period",   "terms",        "term_weights",
      "rate_mean",    "rate_sd",       "credit_mean",    "credit_sd",    "dti_mean",
      "dti_sd",       "ltv_mean",      "ltv_sd",         "log_upb_mean", "log_upb_sd",
      "missing_static_rate", "hazard", "level_sd",       "trend_sd",     "noise_sd",
      "prepay_rate",  "delinquent_months_before_exit",   "hpa_mean",     "hpa_sd",
      "avm_noise_sd", "assistance_rate"};
  if (!j.is_object()) throw ConfigError("synthetic config must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("synthetic: unknown key '" + k + "'");
  SyntheticConfig c;
  read_field(j, "n_loans", c.n_loans);
  read_field(j, "n_months", c.n_months);
  read_field(j, "first_period", c.first_period);
  read_field(j, "terms", c.terms);
  read_field(j, "term_weights", c.term_weights);
  read_field(j, "rate_mean", c.rate_mean);
  read_field(j, "rate_sd", c.rate_sd);
  read_field(j, "credit_mean", c.credit_mean);
  read_field(j, "credit_sd", c.credit_sd);
  read_field(j, "dti_mean", c.dti_mean);
  read_field(j, "dti_sd", c.dti_sd);
  read_field(j, "ltv_mean", c.ltv_mean);
  read_field(j, "ltv_sd", c.ltv_sd);
  read_field(j, "log_upb_mean", c.log_upb_mean);
  read_field(j, "log_upb_sd", c.log_upb_sd);
  read_field(j, "missing_static_rate", c.missing_static_rate);
  if (j.contains("hazard")) {
    const auto& h = j.at("hazard");
    static const std::set<std::string> hk{"intercept", "credit_score", "dti", "ltv", "rate", "g"};
    for (const auto& [k, v] : h.items())
      if (!hk.count(k)) throw ConfigError("synthetic.hazard: unknown key '" + k + "'");
    read_field(h, "intercept", c.law.intercept);
    read_field(h, "credit_score", c.law.credit_score);
    read_field(h, "dti", c.law.dti);
    read_field(h, "ltv", c.law.ltv);
    read_field(h, "rate", c.law.rate);
    read_field(h, "g", c.law.g);
  }
  read_field(j, "level_sd", c.level_sd);
  read_field(j, "trend_sd", c.trend_sd);
  read_field(j, "noise_sd", c.noise_sd);
  read_field(j, "prepay_rate", c.prepay_rate);
  read_field(j, "delinquent_months_before_exit", c.delinquent_months_before_exit);
  read_field(j, "hpa_mean", c.hpa_mean);
  read_field(j, "hpa_sd", c.hpa_sd);
  read_field(j, "avm_noise_sd", c.avm_noise_sd);
  read_field(j, "assistance_rate", c.assistance_rate);
  c.validate();
  return c;
}

nlohmann::json SyntheticConfig::to_json() const {
  return nlohmann::json{
      {"n_loans", n_loans},
      {"n_months", n_months},
      {"first_period", first_period},
      {"terms", terms},
      {"term_weights", term_weights},
      {"rate_mean", rate_mean},
      {"rate_sd", rate_sd},
      {"credit_mean", credit_mean},
      {"credit_sd", credit_sd},
      {"dti_mean", dti_mean},
      {"dti_sd", dti_sd},
      {"ltv_mean", ltv_mean},
      {"ltv_sd", ltv_sd},
      {"log_upb_mean", log_upb_mean},
      {"log_upb_sd", log_upb_sd},
      {"missing_static_rate", missing_static_rate},
      {"hazard",
       {{"intercept", law.intercept},
        {"credit_score", law.credit_score},
        {"dti", law.dti},
        {"ltv", law.ltv},
        {"rate", law.rate},
        {"g", law.g}}},
      {"level_sd", level_sd},
      {"trend_sd", trend_sd},
      {"noise_sd", noise_sd},
      {"prepay_rate", prepay_rate},
      {"delinquent_months_before_exit", delinquent_months_before_exit},
      {"hpa_mean", hpa_mean},
      {"hpa_sd", hpa_sd},
      {"avm_noise_sd", avm_noise_sd},
      {"assistance_rate", assistance_rate}};
}

std::array<double, HazardLaw::kStatic> SyntheticConfig::hazard_covariates(const LoanOrigination& o) const {
  std::array<double, HazardLaw::kStatic> z{};
  if (o.credit_score) z[0] = (*o.credit_score - 740.0) / 45.0;
  if (o.dti) z[1] = (*o.dti - 35.0) / 9.0;
  if (o.orig_ltv) z[2] = (*o.orig_ltv - 75.0) / 15.0;
  z[3] = (o.orig_interest_rate - rate_mean) / rate_sd;
  return z;
}

LoanPanel generate_synthetic_portfolio(const SyntheticConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  LoanPanel panel;
  panel.loans.reserve(static_cast<std::size_t>(cfg.n_loans));
  std::discrete_distribution<int> term_dist(cfg.term_weights.begin(), cfg.term_weights.end());
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  const std::array<double, HazardLaw::kStatic> coef{cfg.law.credit_score, cfg.law.dti, cfg.law.ltv,
                                                    cfg.law.rate};
  const int width = std::max(6, static_cast<int>(std::to_string(cfg.n_loans).size()));

  for (int i = 0; i < cfg.n_loans; ++i) {
    Rng rng(derive_seed(seed, kLoanStream, static_cast<std::uint64_t>(i)));
    auto normal = [&](double mean, double sd) { return mean + sd * stdnorm(rng); };
    auto maybe_missing = [&] { return uniform01(rng) < cfg.missing_static_rate; };

    LoanOrigination o;
    o.loan_id = fmt::format("S{:0{}d}", i, width);
    o.orig_loan_term = cfg.terms[static_cast<std::size_t>(term_dist(rng))];
    o.orig_interest_rate = std::max(0.25, std::round(normal(cfg.rate_mean, cfg.rate_sd) * 8.0) / 8.0);
    o.orig_upb = std::round(std::exp(normal(cfg.log_upb_mean, cfg.log_upb_sd)) / 1000.0) * 1000.0 + 1000.0;
    const int cs = static_cast<int>(std::lround(std::clamp(normal(cfg.credit_mean, cfg.credit_sd), 300.0, 850.0)));
    const double dti = std::round(std::clamp(normal(cfg.dti_mean, cfg.dti_sd), 1.0, 65.0));
    const double ltv = std::round(std::clamp(normal(cfg.ltv_mean, cfg.ltv_sd), 10.0, 97.0));
    if (!maybe_missing()) o.credit_score = cs;
    if (!maybe_missing()) o.dti = dti;
    o.orig_ltv = ltv;
    const double u_occ = uniform01(rng);
    o.occupancy = u_occ < 0.88 ? Occupancy::Owner : (u_occ < 0.93 ? Occupancy::SecondHome : Occupancy::Investment);
    const double u_pur = uniform01(rng);
    o.loan_purpose =
        u_pur < 0.55 ? LoanPurpose::Purchase : (u_pur < 0.8 ? LoanPurpose::NoCashOutRefi : LoanPurpose::CashOutRefi);
    o.num_borrowers = uniform01(rng) < 0.45 ? 1 : 2;

    const auto z = cfg.hazard_covariates(o);
    const double static_lp =
        cfg.law.intercept + std::inner_product(coef.begin(), coef.end(), z.begin(), 0.0);
    const double level = normal(0.0, cfg.level_sd);
    const double trend = normal(0.0, cfg.trend_sd);
    const double hpa = normal(cfg.hpa_mean, cfg.hpa_sd) / 12.0;
    const double value0 = o.orig_upb / (ltv / 100.0);
    const double r = longitudinal::monthly_rate(o.orig_interest_rate);

    Loan loan;
    loan.orig = o;
    int delinquent_for = 0;
    double last_upb = o.orig_upb;
    for (int age = 1; age <= cfg.n_months && age <= o.orig_loan_term; ++age) {
      PerformanceRecord rec;
      rec.loan_id = o.loan_id;
      rec.reporting_period = cfg.first_period + age - 1;
      rec.loan_age = age;
      rec.cur_int_rate = o.orig_interest_rate;
      rec.cnib_upb = 0.0;

      const double sched = longitudinal::scheduled_balance(r, o.orig_loan_term, o.orig_upb, age);
      const double m = level + trend * static_cast<double>(age) / o.orig_loan_term + normal(0.0, cfg.noise_sd);
      double upb = std::max(0.0, std::round(sched * (1.0 + m) * 100.0) / 100.0);
      bool exit = false;

      if (delinquent_for > 0) {
        // No payments while delinquent: the balance stalls.
        upb = last_upb;
        ++delinquent_for;
        rec.cur_loan_del = delinquent_for;
        if (delinquent_for > cfg.delinquent_months_before_exit) {
          rec.zero_bal_code = "09";
          upb = 0.0;
          exit = true;
        }
      } else {
        const double h = sigmoid(static_lp + cfg.law.g * m);
        if (uniform01(rng) < h) {
          delinquent_for = 1;
          rec.cur_loan_del = 1;
        } else if (uniform01(rng) < cfg.prepay_rate || age == o.orig_loan_term) {
          rec.cur_loan_del = 0;
          rec.zero_bal_code = "01";
          upb = 0.0;
          exit = true;
        } else {
          rec.cur_loan_del = 0;
        }
      }
      if (delinquent_for > 0 && uniform01(rng) < cfg.assistance_rate) rec.assistance = Assistance::Forbearance;
      const double value = value0 * std::pow(1.0 + hpa, age) * (1.0 + normal(0.0, cfg.avm_noise_sd));
      rec.cur_act_upb = upb;
      last_upb = upb;
      if (upb > 0 && value > 0) rec.eltv = std::clamp(100.0 * upb / value, 1.0, 250.0);
      loan.records.push_back(std::move(rec));
      if (exit) break;
    }
    panel.loans.push_back(std::move(loan));
  }
  reindex_months(panel);
  return panel;
}

}  // namespace driftsurv::data
