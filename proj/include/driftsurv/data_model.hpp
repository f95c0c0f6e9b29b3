#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace driftsurv::data {

enum class Occupancy { Owner, SecondHome, Investment };
enum class LoanPurpose { CashOutRefi, NoCashOutRefi, Purchase };
enum class Assistance { Forbearance, Repayment, Trial };

/// Static covariates of one loan, as delivered in the origination file.
struct LoanOrigination {
  std::string loan_id;
  std::optional<int> credit_score;
  std::optional<Occupancy> occupancy;
  std::optional<double> dti;
  double orig_upb = 0.0;
  std::optional<double> orig_ltv;
  double orig_interest_rate = 0.0;  // annual percent
  std::optional<LoanPurpose> loan_purpose;
  int orig_loan_term = 0;           // months
  std::optional<int> num_borrowers;

  bool operator==(const LoanOrigination&) const = default;
};

/// One monthly servicing observation.
struct PerformanceRecord {
  std::string loan_id;
  std::int64_t reporting_period = 0;  // calendar key as found in the file (e.g. YYYYMM)
  int month_index = 0;                // rank of reporting_period in the panel, 1..T
  int loan_age = 0;
  std::optional<double> cur_act_upb;
  // Numeric delinquency code. Empty fields and non-numeric codes such as "RA"
  // are both stored as nullopt.
  std::optional<int> cur_loan_del;
  // Code before label drift binarised it; only set on drifted panels.
  std::optional<int> orig_loan_del;
  std::optional<double> cur_int_rate;
  std::optional<double> cnib_upb;
  std::optional<double> eltv;
  std::optional<std::string> zero_bal_code;
  std::optional<Assistance> assistance;  // nullopt: no workout plan

  bool operator==(const PerformanceRecord&) const = default;
};

struct Loan {
  LoanOrigination orig;
  std::vector<PerformanceRecord> records;  // strictly increasing loan_age

  bool operator==(const Loan&) const = default;
};

/// Which drift transforms have already been applied to a panel.
struct Provenance {
  std::optional<std::string> covariate_drift;
  std::optional<std::string> label_drift;
  std::optional<std::uint64_t> drift_seed;

  bool operator==(const Provenance&) const = default;
};

struct LoanPanel {
  std::vector<Loan> loans;               // sorted by loan_id
  std::vector<std::int64_t> periods;     // distinct reporting periods, ascending
  Provenance provenance;

  int observation_span() const { return static_cast<int>(periods.size()); }
  std::size_t n_records() const;
  int max_loan_age() const;
  const Loan* find(const std::string& loan_id) const;

  bool operator==(const LoanPanel&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing

using ColumnRef = std::variant<std::size_t, std::string>;

struct TableSchema {
  char delimiter = '|';
  bool header = false;
  std::map<std::string, ColumnRef> columns;  // field name -> position or header name
};

/// Values outside these ranges are stored as missing.
struct PlausibilityRanges {
  int credit_score_min = 300;
  int credit_score_max = 850;
  double dti_max = 100.0;  // dti in (0, dti_max]
  double ltv_max = 250.0;  // orig_ltv and eltv in (0, ltv_max]
};

struct IngestSchema {
  TableSchema origination;
  TableSchema performance;
  PlausibilityRanges ranges;
  double max_malformed_fraction = 0.01;

  /// Freddie Mac single-family loan-level layout ('|' delimited, no header).
  static IngestSchema freddie_mac();
  static IngestSchema from_json(const nlohmann::json& j);
};

struct ParseStats {
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::vector<std::size_t> malformed_lines;  // 1-based, first 20 kept
  std::size_t values_set_missing = 0;
  std::size_t unknown_delinquency_codes = 0;
};

template <class Record>
struct Parsed {
  std::vector<Record> records;
  ParseStats stats;
};

Parsed<LoanOrigination> parse_origination(std::istream& in, const IngestSchema& schema);
Parsed<PerformanceRecord> parse_performance(std::istream& in, const IngestSchema& schema);

// ---------------------------------------------------------------------------
// Join

struct JoinReport {
  std::size_t loans_kept = 0;
  std::size_t orig_dropped = 0;
  std::size_t perf_rows_dropped = 0;
  std::size_t perf_loans_unlinked = 0;
};

struct JoinResult {
  LoanPanel panel;
  JoinReport report;
};

/// Links origination and performance records by loan id. Unlinkable loans on
/// either side are dropped; duplicate (loan_id, loan_age) pairs are an error.
JoinResult join_panel(std::vector<LoanOrigination> origs, std::vector<PerformanceRecord> perf);

/// Reassigns month_index from reporting_period ranks and rebuilds `periods`.
void reindex_months(LoanPanel& panel);

nlohmann::json to_json(const JoinReport& r);

// String codes used by the file formats.
std::optional<Occupancy> parse_occupancy(const std::string& s);
std::optional<LoanPurpose> parse_purpose(const std::string& s);
std::optional<Assistance> parse_assistance(const std::string& s);
char occupancy_code(Occupancy o);
char purpose_code(LoanPurpose p);
char assistance_code(Assistance a);

}  // namespace driftsurv::data
