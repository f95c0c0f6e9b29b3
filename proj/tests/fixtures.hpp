#pragma once

// Small hand-built panels shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "driftsurv/data_model.hpp"
#include "driftsurv/landmarking.hpp"
#include "driftsurv/longitudinal.hpp"
#include "driftsurv/rng.hpp"

namespace fixture {

using namespace driftsurv;

/// Loan observed at ages 1..n_months, paying exactly on schedule, current,
/// with constant rate and ELTV.
inline data::Loan on_schedule_loan(const std::string& id, int n_months, double upb = 100000.0, double rate = 4.0,
                                   int term = 360) {
  data::Loan loan;
  loan.orig.loan_id = id;
  loan.orig.credit_score = 740;
  loan.orig.occupancy = data::Occupancy::Owner;
  loan.orig.dti = 30;
  loan.orig.orig_upb = upb;
  loan.orig.orig_ltv = 80;
  loan.orig.orig_interest_rate = rate;
  loan.orig.loan_purpose = data::LoanPurpose::Purchase;
  loan.orig.orig_loan_term = term;
  loan.orig.num_borrowers = 2;
  const double r = longitudinal::monthly_rate(rate);
  for (int age = 1; age <= n_months; ++age) {
    data::PerformanceRecord rec;
    rec.loan_id = id;
    rec.reporting_period = 202000 + age;
    rec.loan_age = age;
    rec.cur_act_upb = longitudinal::scheduled_balance(r, term, upb, age);
    rec.cur_loan_del = 0;
    rec.cur_int_rate = rate;
    rec.eltv = 80.0;
    rec.cnib_upb = 0.0;
    loan.records.push_back(rec);
  }
  return loan;
}

/// Loan with constant covariates (rate, ELTV, UPB) at whatever ages are given.
inline data::Loan constant_loan(const std::string& id, int n_months, double rate, double eltv, double upb) {
  auto loan = on_schedule_loan(id, n_months, upb, rate);
  for (auto& r : loan.records) {
    r.cur_act_upb = upb;
    r.eltv = eltv;
    r.cur_int_rate = rate;
  }
  return loan;
}

inline data::LoanPanel panel_of(std::vector<data::Loan> loans) {
  data::LoanPanel p;
  p.loans = std::move(loans);
  std::sort(p.loans.begin(), p.loans.end(),
            [](const auto& a, const auto& b) { return a.orig.loan_id < b.orig.loan_id; });
  data::reindex_months(p);
  return p;
}

/// Samples whose default risk rises with the rate and the marker.
inline landmark::LandmarkDataset landmark_samples(std::size_t n_loans, const std::vector<int>& grid, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  landmark::LandmarkDataset ds;
  ds.landmark_grid = grid;
  ds.horizon = 12;
  for (int L : grid)
    for (std::size_t i = 0; i < n_loans; ++i) {
      landmark::LandmarkSample s;
      s.loan_id = "L" + std::to_string(i);
      s.landmark = L;
      s.horizon = 12;
      s.statics.loan_id = s.loan_id;
      s.statics.credit_score = 700 + static_cast<int>(40 * z(rng));
      s.statics.orig_upb = 200000;
      s.statics.orig_interest_rate = 4 + z(rng);
      s.statics.orig_loan_term = 360;
      s.statics.occupancy = i % 3 == 0 ? data::Occupancy::Investment : data::Occupancy::Owner;
      s.statics.loan_purpose = data::LoanPurpose::Purchase;
      s.dynamic.loan_age = L;
      s.dynamic.cur_int_rate = s.statics.orig_interest_rate;
      s.dynamic.eltv = 70 + 10 * z(rng);
      s.marker = 0.02 * z(rng);
      const double eta = -3 + 0.8 * (s.statics.orig_interest_rate - 4) + 40 * *s.marker + 0.02 * L;
      s.label = uniform01(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
      ds.samples.push_back(s);
    }
  return ds;
}

}  // namespace fixture
