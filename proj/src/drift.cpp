#include "driftsurv/drift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "driftsurv/error.hpp"
#include "driftsurv/rng.hpp"

namespace driftsurv::drift {

namespace {
constexpr std::uint64_t kLabelStream = 0x1abe1;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

DriftKind parse_kind(const std::string& s) {
  if (s == "none") return DriftKind::None;
  if (s == "sudden") return DriftKind::Sudden;
  if (s == "incremental") return DriftKind::Incremental;
  if (s == "recurring") return DriftKind::Recurring;
  throw ConfigError("unknown drift kind '" + s + "'");
}

std::string kind_name(DriftKind k) {
  switch (k) {
    case DriftKind::None: return "none";
    case DriftKind::Sudden: return "sudden";
    case DriftKind::Incremental: return "incremental";
    case DriftKind::Recurring: return "recurring";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Config

int DriftConfig::break_month(int span) const { return t_s.value_or(span / 3); }
int DriftConfig::ramp_end(int span) const { return t_e.value_or(2 * span / 3); }

void DriftConfig::validate(int span) const {
  if (period <= 0) throw ConfigError("drift: period must be positive");
  if (kind == DriftKind::None) return;
  const int ts = break_month(span), te = ramp_end(span);
  if (!(1 <= ts && ts <= te && te <= span))
    throw ConfigError("drift: need 1 <= t_s <= t_e <= T (t_s=" + std::to_string(ts) + ", t_e=" + std::to_string(te) +
                      ", T=" + std::to_string(span) + ")");
  auto in_unit = [](double p) { return p > 0.0 && p < 1.0; };
  const auto& l = label;
  if (!in_unit(l.sudden_before) || !in_unit(l.sudden_after) || !in_unit(l.incremental_start) ||
      !in_unit(l.incremental_end) || !in_unit(l.recurring_mean - std::abs(l.recurring_amplitude)) ||
      !in_unit(l.recurring_mean + std::abs(l.recurring_amplitude)))
    throw ConfigError("drift: prevalence targets must lie in (0,1)");
}

namespace {

template <class T>
void rd(const nlohmann::json& j, const char* k, T& v) {
  if (j.contains(k)) v = j.at(k).get<T>();
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

ClipRange clip_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2 || v[0] > v[1]) throw ConfigError("clip range must be [lo, hi] with lo <= hi");
  return {v[0], v[1]};
}

}  // namespace

DriftConfig DriftConfig::from_json(const nlohmann::json& j) {
  check_keys(j, {"kind", "t_s", "t_e", "period", "seed", "label_drift", "covariate", "label", "constraints"}, "drift");
  DriftConfig c;
  if (j.contains("kind")) c.kind = parse_kind(j.at("kind").get<std::string>());
  if (j.contains("t_s") && !j.at("t_s").is_null()) c.t_s = j.at("t_s").get<int>();
  if (j.contains("t_e") && !j.at("t_e").is_null()) c.t_e = j.at("t_e").get<int>();
  rd(j, "period", c.period);
  rd(j, "seed", c.seed);
  rd(j, "label_drift", c.label_drift);
  if (j.contains("covariate")) {
    const auto& s = j.at("covariate");
    check_keys(s,
               {"sudden_rate_shift", "sudden_eltv_scale", "sudden_upb_cut", "incremental_rate_shift",
                "incremental_eltv_gain", "incremental_upb_cut", "recurring_rate_amplitude",
                "recurring_eltv_amplitude", "recurring_eltv_phase", "recurring_upb_amplitude",
                "recurring_upb_phase"},
               "drift.covariate");
    auto& v = c.covariate;
    rd(s, "sudden_rate_shift", v.sudden_rate_shift);
    rd(s, "sudden_eltv_scale", v.sudden_eltv_scale);
    rd(s, "sudden_upb_cut", v.sudden_upb_cut);
    rd(s, "incremental_rate_shift", v.incremental_rate_shift);
    rd(s, "incremental_eltv_gain", v.incremental_eltv_gain);
    rd(s, "incremental_upb_cut", v.incremental_upb_cut);
    rd(s, "recurring_rate_amplitude", v.recurring_rate_amplitude);
    rd(s, "recurring_eltv_amplitude", v.recurring_eltv_amplitude);
    rd(s, "recurring_eltv_phase", v.recurring_eltv_phase);
    rd(s, "recurring_upb_amplitude", v.recurring_upb_amplitude);
    rd(s, "recurring_upb_phase", v.recurring_upb_phase);
  }
  if (j.contains("label")) {
    const auto& s = j.at("label");
    check_keys(s,
               {"sudden_before", "sudden_after", "incremental_start", "incremental_end", "recurring_mean",
                "recurring_amplitude", "recurring_phase"},
               "drift.label");
    auto& v = c.label;
    rd(s, "sudden_before", v.sudden_before);
    rd(s, "sudden_after", v.sudden_after);
    rd(s, "incremental_start", v.incremental_start);
    rd(s, "incremental_end", v.incremental_end);
    rd(s, "recurring_mean", v.recurring_mean);
    rd(s, "recurring_amplitude", v.recurring_amplitude);
    rd(s, "recurring_phase", v.recurring_phase);
  }
  if (j.contains("constraints")) {
    const auto& s = j.at("constraints");
    check_keys(s, {"eltv_decay_rate", "rate", "eltv", "upb"}, "drift.constraints");
    rd(s, "eltv_decay_rate", c.constraints.eltv_decay_rate);
    if (s.contains("rate")) c.constraints.rate = clip_from_json(s.at("rate"));
    if (s.contains("eltv")) c.constraints.eltv = clip_from_json(s.at("eltv"));
    if (s.contains("upb")) c.constraints.upb = clip_from_json(s.at("upb"));
  }
  return c;
}

nlohmann::json DriftConfig::to_json() const {
  const auto& v = covariate;
  const auto& l = label;
  const auto& k = constraints;
  return {{"kind", kind_name(kind)},
          {"t_s", t_s ? nlohmann::json(*t_s) : nlohmann::json(nullptr)},
          {"t_e", t_e ? nlohmann::json(*t_e) : nlohmann::json(nullptr)},
          {"period", period},
          {"seed", seed},
          {"label_drift", label_drift},
          {"covariate",
           {{"sudden_rate_shift", v.sudden_rate_shift},
            {"sudden_eltv_scale", v.sudden_eltv_scale},
            {"sudden_upb_cut", v.sudden_upb_cut},
            {"incremental_rate_shift", v.incremental_rate_shift},
            {"incremental_eltv_gain", v.incremental_eltv_gain},
            {"incremental_upb_cut", v.incremental_upb_cut},
            {"recurring_rate_amplitude", v.recurring_rate_amplitude},
            {"recurring_eltv_amplitude", v.recurring_eltv_amplitude},
            {"recurring_eltv_phase", v.recurring_eltv_phase},
            {"recurring_upb_amplitude", v.recurring_upb_amplitude},
            {"recurring_upb_phase", v.recurring_upb_phase}}},
          {"label",
           {{"sudden_before", l.sudden_before},
            {"sudden_after", l.sudden_after},
            {"incremental_start", l.incremental_start},
            {"incremental_end", l.incremental_end},
            {"recurring_mean", l.recurring_mean},
            {"recurring_amplitude", l.recurring_amplitude},
            {"recurring_phase", l.recurring_phase}}},
          {"constraints",
           {{"eltv_decay_rate", k.eltv_decay_rate},
            {"rate", {k.rate.lo, k.rate.hi}},
            {"eltv", {k.eltv.lo, k.eltv.hi}},
            {"upb", {k.upb.lo, k.upb.hi}}}}};
}

// ---------------------------------------------------------------------------
// Schedules

double ramp(int t, int t_s, int t_e) {
  if (t <= t_s) return 0.0;
  if (t >= t_e) return 1.0;
  return static_cast<double>(t - t_s) / static_cast<double>(t_e - t_s);
}

CovariateShift covariate_shift(const DriftConfig& cfg, int t, int span) {
  const auto& s = cfg.covariate;
  const int ts = cfg.break_month(span);
  CovariateShift out;
  switch (cfg.kind) {
    case DriftKind::None:
      break;
    case DriftKind::Sudden:
      if (t >= ts) {
        out.rate_shift = s.sudden_rate_shift;
        out.eltv_factor = s.sudden_eltv_scale;
        out.upb_factor = 1.0 - s.sudden_upb_cut;
      }
      break;
    case DriftKind::Incremental: {
      const double tau = ramp(t, ts, cfg.ramp_end(span));
      out.rate_shift = s.incremental_rate_shift * tau;
      out.eltv_factor = 1.0 + s.incremental_eltv_gain * tau;
      out.upb_factor = 1.0 - s.incremental_upb_cut * tau;
      break;
    }
    case DriftKind::Recurring: {
      const double w = kTwoPi * t / cfg.period;
      out.rate_shift = s.recurring_rate_amplitude * std::sin(w);
      out.eltv_factor = 1.0 + s.recurring_eltv_amplitude * std::sin(w + s.recurring_eltv_phase);
      out.upb_factor = 1.0 - s.recurring_upb_amplitude * (0.5 + 0.5 * std::sin(w + s.recurring_upb_phase));
      break;
    }
  }
  return out;
}

double target_prevalence(const DriftConfig& cfg, int t, int span) {
  const auto& l = cfg.label;
  const int ts = cfg.break_month(span);
  switch (cfg.kind) {
    case DriftKind::None: return std::nan("");
    case DriftKind::Sudden: return t < ts ? l.sudden_before : l.sudden_after;
    case DriftKind::Incremental:
      return l.incremental_start + (l.incremental_end - l.incremental_start) * ramp(t, ts, cfg.ramp_end(span));
    case DriftKind::Recurring:
      return l.recurring_mean + l.recurring_amplitude * std::sin(kTwoPi * t / cfg.period + l.recurring_phase);
  }
  return std::nan("");
}

data::LoanPanel apply_covariate_drift(data::LoanPanel panel, const DriftConfig& cfg) {
  if (cfg.kind == DriftKind::None) return panel;
  if (panel.loans.empty()) throw DataError("apply_covariate_drift: empty panel");
  if (panel.provenance.covariate_drift)
    throw DataError("panel already carries covariate drift '" + *panel.provenance.covariate_drift + "'");
  const int span = panel.observation_span();
  cfg.validate(span);
  const int ts = cfg.break_month(span);
  const auto& k = cfg.constraints;
  int t0 = std::numeric_limits<int>::max();
  for (const auto& l : panel.loans)
    for (const auto& r : l.records) t0 = std::min(t0, r.month_index);

  for (auto& loan : panel.loans) {
    bool cut_done = false;
    std::optional<double> running_min;
    for (auto& r : loan.records) {
      const int t = r.month_index;
      const auto shift = covariate_shift(cfg, t, span);
      if (r.cur_int_rate) *r.cur_int_rate += shift.rate_shift;
      if (r.eltv) *r.eltv *= shift.eltv_factor;
      if (cfg.kind == DriftKind::Sudden) {
        if (t >= ts && !cut_done) {
          if (r.cur_act_upb) *r.cur_act_upb *= shift.upb_factor;
          cut_done = true;
        }
      } else if (r.cur_act_upb) {
        *r.cur_act_upb *= shift.upb_factor;
      }
      // (1) balances never increase within a loan
      if (r.cur_act_upb) {
        running_min = running_min ? std::min(*running_min, *r.cur_act_upb) : *r.cur_act_upb;
        *r.cur_act_upb = *running_min;
      }
      // (2) long-run ELTV decline
      if (r.eltv) *r.eltv *= std::pow(1.0 - k.eltv_decay_rate, t - t0);
      // (3) physical ranges
      if (r.cur_int_rate) *r.cur_int_rate = std::clamp(*r.cur_int_rate, k.rate.lo, k.rate.hi);
      if (r.eltv) *r.eltv = std::clamp(*r.eltv, k.eltv.lo, k.eltv.hi);
      if (r.cur_act_upb) *r.cur_act_upb = std::clamp(*r.cur_act_upb, k.upb.lo, k.upb.hi);
    }
  }
  panel.provenance.covariate_drift = kind_name(cfg.kind);
  panel.provenance.drift_seed = cfg.seed;
  return panel;
}

data::LoanPanel apply_label_drift(data::LoanPanel panel, const DriftConfig& cfg) {
  if (cfg.kind == DriftKind::None) return panel;
  if (panel.provenance.label_drift)
    throw DataError("panel already carries label drift '" + *panel.provenance.label_drift + "'");
  const int span = panel.observation_span();
  cfg.validate(span);

  std::vector<std::vector<data::PerformanceRecord*>> by_month(static_cast<std::size_t>(span) + 1);
  for (auto& loan : panel.loans)
    for (auto& r : loan.records) {
      if (!r.cur_loan_del) continue;
      r.orig_loan_del = r.cur_loan_del;
      r.cur_loan_del = *r.cur_loan_del != 0 ? 1 : 0;
      by_month[static_cast<std::size_t>(r.month_index)].push_back(&r);
    }

  for (int m = 1; m <= span; ++m) {
    auto& rows = by_month[static_cast<std::size_t>(m)];
    if (rows.empty()) {
      spdlog::warn("label drift: month {} has no known delinquency labels; skipped", m);
      continue;
    }
    const double n = static_cast<double>(rows.size());
    const double ones = static_cast<double>(
        std::count_if(rows.begin(), rows.end(), [](const auto* r) { return *r->cur_loan_del == 1; }));
    const double c = ones / n;
    const double p = target_prevalence(cfg, m, span);
    Rng rng(derive_seed(cfg.seed, kLabelStream, static_cast<std::uint64_t>(m)));
    if (c < p) {
      const double q = (p - c) / (1.0 - c);
      for (auto* r : rows)
        if (*r->cur_loan_del == 0 && uniform01(rng) < q) r->cur_loan_del = 1;
    } else if (c > p) {
      const double q = (c - p) / c;
      for (auto* r : rows)
        if (*r->cur_loan_del == 1 && uniform01(rng) < q) r->cur_loan_del = 0;
    }
  }
  panel.provenance.label_drift = kind_name(cfg.kind);
  panel.provenance.drift_seed = cfg.seed;
  return panel;
}

data::LoanPanel apply_drift(data::LoanPanel panel, const DriftConfig& cfg) {
  if (cfg.kind == DriftKind::None) return panel;
  auto out = apply_covariate_drift(std::move(panel), cfg);
  if (!cfg.label_drift) return out;
  DriftConfig label_cfg = cfg;
  label_cfg.seed = derive_seed(cfg.seed, kLabelStream);
  out = apply_label_drift(std::move(out), label_cfg);
  out.provenance.drift_seed = cfg.seed;
  return out;
}

// ---------------------------------------------------------------------------
// Severity

std::string level_name(Level l) {
  switch (l) {
    case Level::None: return "None";
    case Level::Slight: return "Slight";
    case Level::Moderate: return "Moderate";
    case Level::Severe: return "Severe";
    case Level::Insufficient: return "Insufficient";
  }
  return "?";
}

Level numeric_level(double score) {
  if (score <= 0.1) return Level::None;
  if (score <= 0.3) return Level::Slight;
  if (score <= 0.7) return Level::Moderate;
  return Level::Severe;
}

Level categorical_level(double rate) {
  if (rate == 0.0) return Level::None;
  if (rate <= 0.1) return Level::Slight;
  if (rate <= 0.3) return Level::Moderate;
  return Level::Severe;
}

namespace {

const std::set<std::string> kNumericVars{"cur_act_upb", "cur_int_rate", "eltv", "cnib_upb"};
const std::set<std::string> kCategoricalVars{"cur_loan_del", "assistance_code", "zero_bal_code"};

std::optional<double> numeric_of(const data::PerformanceRecord& r, const std::string& v) {
  if (v == "cur_act_upb") return r.cur_act_upb;
  if (v == "cur_int_rate") return r.cur_int_rate;
  if (v == "eltv") return r.eltv;
  if (v == "cnib_upb") return r.cnib_upb;
  throw ConfigError("'" + v + "' is not a numeric performance variable");
}

std::optional<int> category_of(const data::PerformanceRecord& r, const std::string& v) {
  if (v == "cur_loan_del") {
    if (!r.cur_loan_del) return std::nullopt;
    return *r.cur_loan_del != 0 ? 1 : 0;
  }
  if (v == "assistance_code") return r.assistance ? static_cast<int>(*r.assistance) + 1 : 0;
  if (v == "zero_bal_code") {
    if (!r.zero_bal_code) return 0;
    int h = 1;
    for (char ch : *r.zero_bal_code) h = h * 131 + static_cast<unsigned char>(ch);
    return h;
  }
  throw ConfigError("'" + v + "' is not a categorical performance variable");
}

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void finalize(VariableSeverity& vs) {
  for (const auto& l : vs.loans) ++vs.counts[static_cast<std::size_t>(l.level)];
  const double n = static_cast<double>(vs.loans.size());
  for (std::size_t k = 0; k < vs.counts.size(); ++k) vs.percent[k] = n > 0 ? 100.0 * vs.counts[k] / n : 0.0;
}

}  // namespace

bool is_numeric_variable(const std::string& v) { return kNumericVars.count(v) > 0; }
bool is_categorical_variable(const std::string& v) { return kCategoricalVars.count(v) > 0; }

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

VariableSeverity drift_severity_numeric(const data::LoanPanel& panel, const std::string& variable, IqrBasis basis) {
  if (!is_numeric_variable(variable)) throw ConfigError("'" + variable + "' is not a numeric variable");
  VariableSeverity vs;
  vs.variable = variable;
  std::vector<std::vector<double>> changes(panel.loans.size());
  std::vector<double> pool;
  for (std::size_t i = 0; i < panel.loans.size(); ++i) {
    std::optional<double> prev;
    for (const auto& r : panel.loans[i].records) {
      const auto v = numeric_of(r, variable);
      if (!v) continue;
      if (basis == IqrBasis::Values) pool.push_back(*v);
      if (prev) changes[i].push_back(std::abs(*v - *prev));
      prev = v;
    }
    if (basis == IqrBasis::Changes) pool.insert(pool.end(), changes[i].begin(), changes[i].end());
  }
  const double iqr = pool.empty() ? 0.0 : quantile(pool, 0.75) - quantile(pool, 0.25);
  vs.iqr = iqr;
  for (std::size_t i = 0; i < panel.loans.size(); ++i) {
    LoanScore ls{panel.loans[i].orig.loan_id, std::nullopt, Level::Insufficient};
    const auto& ch = changes[i];
    if (!ch.empty()) {
      if (iqr > 0) {
        ls.score = median(ch) / iqr;
        ls.level = numeric_level(*ls.score);
      } else {
        const bool changed = std::any_of(ch.begin(), ch.end(), [](double d) { return d != 0.0; });
        ls.level = changed ? Level::Severe : Level::None;
        if (!changed) ls.score = 0.0;
      }
    }
    vs.loans.push_back(std::move(ls));
  }
  finalize(vs);
  return vs;
}

VariableSeverity drift_severity_categorical(const data::LoanPanel& panel, const std::string& variable) {
  if (!is_categorical_variable(variable)) throw ConfigError("'" + variable + "' is not a categorical variable");
  VariableSeverity vs;
  vs.variable = variable;
  vs.categorical = true;
  for (const auto& loan : panel.loans) {
    LoanScore ls{loan.orig.loan_id, std::nullopt, Level::Insufficient};
    std::optional<int> prev;
    std::size_t pairs = 0, changes = 0;
    for (const auto& r : loan.records) {
      const auto c = category_of(r, variable);
      if (!c) continue;
      if (prev) {
        ++pairs;
        if (*c != *prev) ++changes;
      }
      prev = c;
    }
    if (pairs > 0) {
      ls.score = static_cast<double>(changes) / static_cast<double>(pairs);
      ls.level = categorical_level(*ls.score);
    }
    vs.loans.push_back(std::move(ls));
  }
  finalize(vs);
  return vs;
}

DriftSeverityReport drift_report(const data::LoanPanel& panel, const std::vector<std::string>& variables,
                                 IqrBasis basis) {
  DriftSeverityReport rep;
  rep.label = panel.provenance.covariate_drift.value_or(panel.provenance.label_drift.value_or("original"));
  for (const auto& v : variables) {
    if (is_numeric_variable(v))
      rep.variables.push_back(drift_severity_numeric(panel, v, basis));
    else if (is_categorical_variable(v))
      rep.variables.push_back(drift_severity_categorical(panel, v));
    else
      throw ConfigError("unknown drift-report variable '" + v + "'");
  }
  return rep;
}

nlohmann::json to_json(const DriftSeverityReport& r, bool include_loans) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : r.variables) {
    nlohmann::json dist = nlohmann::json::object();
    for (auto l : kLevels) {
      const auto k = static_cast<std::size_t>(l);
      dist[level_name(l)] = {{"loans", v.counts[k]}, {"percent", v.percent[k]}};
    }
    nlohmann::json jv{{"variable", v.variable},
                      {"type", v.categorical ? "categorical" : "numeric"},
                      {"iqr", v.iqr ? nlohmann::json(*v.iqr) : nlohmann::json(nullptr)},
                      {"distribution", dist}};
    if (include_loans) {
      nlohmann::json loans = nlohmann::json::array();
      for (const auto& l : v.loans)
        loans.push_back({{"loan_id", l.loan_id},
                         {"score", l.score ? nlohmann::json(*l.score) : nlohmann::json(nullptr)},
                         {"level", level_name(l.level)}});
      jv["loans"] = std::move(loans);
    }
    vars.push_back(std::move(jv));
  }
  return {{"label", r.label}, {"variables", vars}};
}

void write_severity_csv(std::ostream& out, const DriftSeverityReport& r, bool header) {
  if (header) out << "label,variable,Severe,Moderate,Slight,None,Insufficient\n";
  char buf[32];
  for (const auto& v : r.variables) {
    out << r.label << ',' << v.variable;
    for (auto l : kLevels) {
      std::snprintf(buf, sizeof buf, ",%.2f", v.percent[static_cast<std::size_t>(l)]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace driftsurv::drift
