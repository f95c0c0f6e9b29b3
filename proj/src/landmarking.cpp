#include "driftsurv/landmarking.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "driftsurv/error.hpp"

namespace driftsurv::landmark {

std::optional<std::size_t> at_risk_record(const data::Loan& loan, int landmark, int locf_max) {
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < loan.records.size(); ++i) {
    const auto& r = loan.records[i];
    if (r.loan_age > landmark) break;
    if (r.cur_loan_del && *r.cur_loan_del != 0) return std::nullopt;
    if (r.zero_bal_code) return std::nullopt;
    last = i;
  }
  if (!last || loan.records[*last].loan_age < landmark - locf_max) return std::nullopt;
  return last;
}

std::size_t risk_set_size(const data::LoanPanel& panel, int landmark, int locf_max) {
  std::size_t n = 0;
  for (const auto& loan : panel.loans)
    if (at_risk_record(loan, landmark, locf_max)) ++n;
  return n;
}

std::vector<int> landmark_grid(const data::LoanPanel& panel, const GridOptions& opt) {
  if (opt.start < 1 || opt.step < 1) throw ConfigError("landmark grid: start and step must be >= 1");
  if (opt.horizon < 1) throw ConfigError("landmark grid: horizon must be >= 1");
  const int max_age = panel.max_loan_age();
  std::vector<int> grid;
  std::size_t last_risk = 0;
  for (int L = opt.start; L + opt.horizon <= max_age; L += opt.step) {
    last_risk = risk_set_size(panel, L, opt.locf_max);
    if (last_risk < static_cast<std::size_t>(opt.min_risk)) break;
    grid.push_back(L);
  }
  if (grid.empty()) {
    std::ostringstream msg;
    msg << "empty landmark grid: start=" << opt.start << " horizon=" << opt.horizon
        << " max observed loan age=" << max_age;
    if (opt.start + opt.horizon <= max_age)
      msg << ", risk set at first landmark " << last_risk << " < min_risk " << opt.min_risk;
    throw ConfigError(msg.str());
  }
  return grid;
}

TrajectoryFn ridge_trajectory(longitudinal::TrajectoryOptions opt) {
  return [opt](const data::Loan& loan, int landmark) -> std::optional<double> {
    const auto fit = longitudinal::fit_loan_trajectory(loan, landmark, opt);
    if (!fit) return std::nullopt;
    return longitudinal::evaluate_marker(*fit, landmark, loan.orig.orig_loan_term);
  };
}

int landmark_label(const data::Loan& loan, int landmark, int horizon) {
  for (const auto& r : loan.records) {
    if (r.loan_age <= landmark) continue;
    if (r.loan_age > landmark + horizon) break;
    if (r.cur_loan_del && *r.cur_loan_del != 0) return 1;
  }
  return 0;
}

LandmarkDataset build_landmark_dataset(const data::LoanPanel& panel, const std::vector<int>& grid,
                                       int horizon, const TrajectoryFn& trajectory, int locf_max) {
  if (grid.empty()) throw ConfigError("build_landmark_dataset: empty landmark grid");
  LandmarkDataset ds;
  ds.landmark_grid = grid;
  ds.horizon = horizon;
  for (int L : grid) {
    for (const auto& loan : panel.loans) {
      const auto idx = at_risk_record(loan, L, locf_max);
      if (!idx) continue;
      const auto& rec = loan.records[*idx];
      LandmarkSample s;
      s.loan_id = loan.orig.loan_id;
      s.landmark = L;
      s.horizon = horizon;
      s.statics = loan.orig;
      s.dynamic.loan_age = rec.loan_age;
      s.dynamic.cur_int_rate = rec.cur_int_rate;
      s.dynamic.eltv = rec.eltv;
      s.dynamic.cur_act_upb = rec.cur_act_upb;
      s.dynamic.cnib_upb = rec.cnib_upb;
      s.dynamic.assistance = rec.assistance.has_value();
      s.marker = trajectory(loan, L);
      s.label = landmark_label(loan, L, horizon);
      if (s.label == 0) {
        const auto& last = loan.records.back();
        if (last.loan_age < L + horizon) {
          ++ds.censored_in_horizon;
          if (last.zero_bal_code && *last.zero_bal_code == "01") ++ds.prepaid_in_horizon;
        }
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

namespace {

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  char buf[32];
  if constexpr (std::is_floating_point_v<T>)
    std::snprintf(buf, sizeof buf, "%.17g", *v);
  else
    std::snprintf(buf, sizeof buf, "%d", static_cast<int>(*v));
  return buf;
}

}  // namespace

void write_landmark_dataset(std::ostream& out, const LandmarkDataset& ds) {
  out << "loan_id|landmark|horizon|label|marker|credit_score|occupancy|dti|orig_upb|orig_ltv|"
         "orig_interest_rate|loan_purpose|orig_loan_term|num_borrowers|obs_loan_age|cur_int_rate|"
         "eltv|cur_act_upb|cnib_upb|assistance\n";
  for (const auto& s : ds.samples) {
    const auto& o = s.statics;
    const auto& d = s.dynamic;
    out << s.loan_id << '|' << s.landmark << '|' << s.horizon << '|' << s.label << '|' << cell(s.marker)
        << '|' << cell(o.credit_score) << '|'
        << (o.occupancy ? std::string(1, data::occupancy_code(*o.occupancy)) : "") << '|' << cell(o.dti)
        << '|' << cell(std::optional<double>(o.orig_upb)) << '|' << cell(o.orig_ltv) << '|'
        << cell(std::optional<double>(o.orig_interest_rate)) << '|'
        << (o.loan_purpose ? std::string(1, data::purpose_code(*o.loan_purpose)) : "") << '|'
        << o.orig_loan_term << '|' << cell(o.num_borrowers) << '|' << d.loan_age << '|'
        << cell(d.cur_int_rate) << '|' << cell(d.eltv) << '|' << cell(d.cur_act_upb) << '|'
        << cell(d.cnib_upb) << '|' << (d.assistance ? 1 : 0) << '\n';
  }
}

}  // namespace driftsurv::landmark
