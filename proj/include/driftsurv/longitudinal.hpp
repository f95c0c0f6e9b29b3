#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "driftsurv/data_model.hpp"

namespace driftsurv::longitudinal {

/// Converts an annual percentage note rate to a monthly fraction.
inline double monthly_rate(double annual_percent) { return annual_percent / 1200.0; }

/// Balance on a level-payment amortization schedule after `t` payments.
/// For r = 0 the straight-line limit (1 - t/N) * orig_upb is returned.
/// Throws std::domain_error for t outside [0, N] or N < 1.
double scheduled_balance(double monthly_rate, int term, double orig_upb, int t);

/// Relative gap between actual and scheduled balance; positive when the
/// borrower is behind schedule. nullopt when b_sch <= eps_bal.
std::optional<double> balance_deviation(double upb_cur, double b_sch, double eps_bal);

struct MarkerObservation {
  double t = 0;  // loan age, months
  double x = 0;  // t / N
  double y = 0;  // balance deviation
};

struct TrajectoryFit {
  double b0 = 0;
  double b1 = 0;
  int n_obs = 0;
  double lambda = 0;
};

struct TrajectoryOptions {
  double lambda = 1e-6;
  double eps_bal_fraction = 1e-6;  // guard = fraction * orig_upb
};

/// Per-loan least squares line through the marker with a ridge term on the
/// slope only. One observation gives b1 = 0, b0 = y.
TrajectoryFit fit_trajectory(std::span<const MarkerObservation> obs, double lambda);

inline double evaluate_marker(const TrajectoryFit& fit, double t, int term) {
  return fit.b0 + fit.b1 * (t / static_cast<double>(term));
}

/// Marker observations of one loan using records with loan_age <= max_age.
/// Months with missing balance or a near-zero scheduled balance are skipped.
std::vector<MarkerObservation> marker_observations(const data::Loan& loan, int max_age,
                                                   const TrajectoryOptions& opt = {});

/// Fit using only months up to `landmark`; nullopt if no usable month exists.
std::optional<TrajectoryFit> fit_loan_trajectory(const data::Loan& loan, int landmark,
                                                 const TrajectoryOptions& opt = {});

/// CSV dump (loan_id,b0,b1,n_obs) of full-history fits.
void write_trajectories_csv(std::ostream& out, const data::LoanPanel& panel,
                            const TrajectoryOptions& opt = {});

}  // namespace driftsurv::longitudinal
