#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftsurv/data_model.hpp"

namespace driftsurv::drift {

enum class DriftKind { None, Sudden, Incremental, Recurring };

DriftKind parse_kind(const std::string& s);
std::string kind_name(DriftKind k);

/// Perturbation constants of the three covariate schedules.
struct CovariateSchedule {
  double sudden_rate_shift = 1.0;
  double sudden_eltv_scale = 1.2;
  double sudden_upb_cut = 0.05;
  double incremental_rate_shift = 1.5;
  double incremental_eltv_gain = 0.15;
  double incremental_upb_cut = 0.09;
  double recurring_rate_amplitude = 0.5;
  double recurring_eltv_amplitude = 0.05;
  double recurring_eltv_phase = std::numbers::pi / 6;
  double recurring_upb_amplitude = 0.02;
  double recurring_upb_phase = std::numbers::pi / 3;
};

/// Target monthly delinquency prevalence p(t).
struct LabelSchedule {
  double sudden_before = 0.025;
  double sudden_after = 0.10;
  double incremental_start = 0.025;
  double incremental_end = 0.12;
  double recurring_mean = 0.06;
  double recurring_amplitude = 0.035;
  double recurring_phase = -std::numbers::pi / 4;
};

struct ClipRange {
  double lo;
  double hi;
};

struct ConstraintParams {
  double eltv_decay_rate = 0.004;  // monthly
  ClipRange rate{0.0, 100.0};
  ClipRange eltv{1e-6, 250.0};
  ClipRange upb{0.0, 1e12};
};

struct DriftConfig {
  DriftKind kind = DriftKind::None;
  std::optional<int> t_s;  // default floor(T/3)
  std::optional<int> t_e;  // default floor(2T/3)
  int period = 12;
  std::uint64_t seed = 42;
  bool label_drift = true;
  CovariateSchedule covariate;
  LabelSchedule label;
  ConstraintParams constraints;

  int break_month(int span) const;
  int ramp_end(int span) const;
  void validate(int span) const;

  static DriftConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// 0 for t <= t_s, linear on (t_s, t_e), 1 for t >= t_e; t_e == t_s gives a
/// step at t_s.
double ramp(int t, int t_s, int t_e);

struct CovariateShift {
  double rate_shift = 0;   // additive, percentage points
  double eltv_factor = 1;  // multiplicative, before long-run decay
  double upb_factor = 1;   // multiplicative (sudden: first post-break record only)
};

/// Schedule value at observation month t for a panel spanning `span` months.
CovariateShift covariate_shift(const DriftConfig& cfg, int t, int span);
double target_prevalence(const DriftConfig& cfg, int t, int span);

/// Applies the schedule of cfg.kind to cur_int_rate, eltv and cur_act_upb,
/// then enforces per-loan cumulative-min balances, long-run ELTV decay and the
/// clip ranges. kind = none is the identity. A panel that already carries
/// covariate drift is rejected.
data::LoanPanel apply_covariate_drift(data::LoanPanel panel, const DriftConfig& cfg);

/// Binarises delinquency (keeping the original code in orig_loan_del) and
/// flips labels month by month towards p(t). Random streams depend only on
/// (seed, month).
data::LoanPanel apply_label_drift(data::LoanPanel panel, const DriftConfig& cfg);

/// Covariate drift then, if cfg.label_drift, label drift with an independent
/// stream derived from cfg.seed.
data::LoanPanel apply_drift(data::LoanPanel panel, const DriftConfig& cfg);

// ---------------------------------------------------------------------------
// Severity diagnostic

enum class Level { None, Slight, Moderate, Severe, Insufficient };
inline constexpr std::array<Level, 5> kLevels{Level::Severe, Level::Moderate, Level::Slight, Level::None,
                                              Level::Insufficient};
std::string level_name(Level l);

/// Boundaries are right-closed: None = [0, 0.1], Slight = (0.1, 0.3],
/// Moderate = (0.3, 0.7], Severe > 0.7.
Level numeric_level(double score);
/// None iff rate = 0; Slight = (0, 0.1], Moderate = (0.1, 0.3], Severe = (0.3, 1].
Level categorical_level(double rate);

/// What the per-loan median change is divided by.
enum class IqrBasis {
  Values,  // IQR of all non-missing values of the variable
  Changes  // IQR of all per-loan month-over-month absolute changes
};

struct LoanScore {
  std::string loan_id;
  std::optional<double> score;  // nullopt: insufficient data or zero IQR with changes
  Level level = Level::Insufficient;
};

struct VariableSeverity {
  std::string variable;
  bool categorical = false;
  std::optional<double> iqr;
  std::array<std::size_t, 5> counts{};  // indexed by Level
  std::array<double, 5> percent{};
  std::vector<LoanScore> loans;
};

struct DriftSeverityReport {
  std::string label;  // e.g. "original", "sudden"
  std::vector<VariableSeverity> variables;
};

bool is_numeric_variable(const std::string& v);
bool is_categorical_variable(const std::string& v);

VariableSeverity drift_severity_numeric(const data::LoanPanel& panel, const std::string& variable,
                                        IqrBasis basis = IqrBasis::Values);
VariableSeverity drift_severity_categorical(const data::LoanPanel& panel, const std::string& variable);
DriftSeverityReport drift_report(const data::LoanPanel& panel, const std::vector<std::string>& variables,
                                 IqrBasis basis = IqrBasis::Values);

nlohmann::json to_json(const DriftSeverityReport& r, bool include_loans = true);
/// One row per variable: label,variable,Severe,Moderate,Slight,None,Insufficient.
void write_severity_csv(std::ostream& out, const DriftSeverityReport& r, bool header = true);

/// Type-7 (linear interpolation) quantile of an unsorted sample.
double quantile(std::vector<double> v, double q);

}  // namespace driftsurv::drift
