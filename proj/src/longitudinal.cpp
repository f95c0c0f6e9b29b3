#include "driftsurv/longitudinal.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace driftsurv::longitudinal {

double scheduled_balance(double r, int term, double orig_upb, int t) {
  if (term < 1) throw std::domain_error("scheduled_balance: term must be >= 1");
  if (t < 0 || t > term) throw std::domain_error("scheduled_balance: t outside [0, term]");
  if (r < 0) throw std::domain_error("scheduled_balance: negative rate");
  if (t == term) return 0.0;
  if (r == 0.0) return (1.0 - static_cast<double>(t) / term) * orig_upb;
  // expm1/log1p keep the ratio accurate for very small monthly rates.
  const double lg = std::log1p(r);
  const double gn = std::expm1(term * lg);
  const double gt = std::expm1(t * lg);
  return (gn - gt) / gn * orig_upb;
}

std::optional<double> balance_deviation(double upb_cur, double b_sch, double eps_bal) {
  if (!(b_sch > eps_bal)) return std::nullopt;
  return (upb_cur - b_sch) / b_sch;
}

TrajectoryFit fit_trajectory(std::span<const MarkerObservation> obs, double lambda) {
  if (obs.empty()) throw std::invalid_argument("fit_trajectory: no observations");
  if (!(lambda > 0)) throw std::invalid_argument("fit_trajectory: lambda must be > 0");
  const double n = static_cast<double>(obs.size());
  double sx = 0, sy = 0;
  for (const auto& o : obs) {
    sx += o.x;
    sy += o.y;
  }
  const double xbar = sx / n;
  const double ybar = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& o : obs) {
    const double dx = o.x - xbar;
    sxx += dx * dx;
    sxy += dx * (o.y - ybar);
  }
  TrajectoryFit fit;
  fit.b1 = sxy / (sxx + lambda);
  fit.b0 = ybar - fit.b1 * xbar;
  fit.n_obs = static_cast<int>(obs.size());
  fit.lambda = lambda;
  return fit;
}

std::vector<MarkerObservation> marker_observations(const data::Loan& loan, int max_age,
                                                   const TrajectoryOptions& opt) {
  std::vector<MarkerObservation> obs;
  const auto& o = loan.orig;
  const double r = monthly_rate(o.orig_interest_rate);
  const double eps = opt.eps_bal_fraction * o.orig_upb;
  for (const auto& rec : loan.records) {
    if (rec.loan_age > max_age) break;
    if (!rec.cur_act_upb || rec.loan_age > o.orig_loan_term) continue;
    const double b = scheduled_balance(r, o.orig_loan_term, o.orig_upb, rec.loan_age);
    const auto y = balance_deviation(*rec.cur_act_upb, b, eps);
    if (!y) continue;
    obs.push_back({static_cast<double>(rec.loan_age),
                   static_cast<double>(rec.loan_age) / o.orig_loan_term, *y});
  }
  return obs;
}

std::optional<TrajectoryFit> fit_loan_trajectory(const data::Loan& loan, int landmark,
                                                 const TrajectoryOptions& opt) {
  const auto obs = marker_observations(loan, landmark, opt);
  if (obs.empty()) return std::nullopt;
  return fit_trajectory(obs, opt.lambda);
}

void write_trajectories_csv(std::ostream& out, const data::LoanPanel& panel,
                            const TrajectoryOptions& opt) {
  out << "loan_id,b0,b1,n_obs\n";
  char buf[96];
  for (const auto& loan : panel.loans) {
    const auto fit = fit_loan_trajectory(loan, std::numeric_limits<int>::max(), opt);
    if (!fit) continue;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%d\n", fit->b0, fit->b1, fit->n_obs);
    out << loan.orig.loan_id << buf;
  }
}

}  // namespace driftsurv::longitudinal
