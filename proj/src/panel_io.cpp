#include "driftsurv/panel_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

#include "driftsurv/error.hpp"

namespace driftsurv::data {

namespace {

constexpr std::string_view kMagic = "#driftsurv-panel|1";

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>)
    return fmt_real(*v);
  else if constexpr (std::is_same_v<T, std::string>)
    return *v;
  else
    return std::to_string(*v);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('|', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <class T>
T num(const std::string& s, std::size_t line_no) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("panel line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

template <class T>
std::optional<T> opt_num(const std::string& s, std::size_t line_no) {
  if (s.empty()) return std::nullopt;
  return num<T>(s, line_no);
}

std::optional<std::string> opt_str(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

void write_panel(std::ostream& out, const LoanPanel& panel) {
  out << kMagic << '\n';
  const auto& pv = panel.provenance;
  out << "#provenance|covariate_drift=" << pv.covariate_drift.value_or("")
      << "|label_drift=" << pv.label_drift.value_or("")
      << "|drift_seed=" << (pv.drift_seed ? std::to_string(*pv.drift_seed) : "") << '\n';
  for (const auto& loan : panel.loans) {
    const auto& o = loan.orig;
    out << "O|" << o.loan_id << '|' << opt(o.credit_score) << '|'
        << (o.occupancy ? std::string(1, occupancy_code(*o.occupancy)) : "") << '|' << opt(o.dti) << '|'
        << fmt_real(o.orig_upb) << '|' << opt(o.orig_ltv) << '|' << fmt_real(o.orig_interest_rate) << '|'
        << (o.loan_purpose ? std::string(1, purpose_code(*o.loan_purpose)) : "") << '|'
        << o.orig_loan_term << '|' << opt(o.num_borrowers) << '\n';
    for (const auto& r : loan.records) {
      out << "P|" << r.loan_id << '|' << r.reporting_period << '|' << r.month_index << '|' << r.loan_age
          << '|' << opt(r.cur_act_upb) << '|' << opt(r.cur_loan_del) << '|' << opt(r.orig_loan_del) << '|'
          << opt(r.cur_int_rate) << '|' << opt(r.cnib_upb) << '|' << opt(r.eltv) << '|'
          << opt(r.zero_bal_code) << '|'
          << (r.assistance ? std::string(1, assistance_code(*r.assistance)) : "") << '\n';
    }
  }
}

LoanPanel read_panel(std::istream& in) {
  LoanPanel panel;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != kMagic) throw DataError("not a driftsurv panel file");
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f[0] == "#provenance") {
      for (std::size_t i = 1; i < f.size(); ++i) {
        const auto eq = f[i].find('=');
        if (eq == std::string::npos) throw DataError("bad provenance entry");
        const auto key = f[i].substr(0, eq);
        const auto val = f[i].substr(eq + 1);
        if (key == "covariate_drift") panel.provenance.covariate_drift = opt_str(val);
        else if (key == "label_drift") panel.provenance.label_drift = opt_str(val);
        else if (key == "drift_seed") panel.provenance.drift_seed = opt_num<std::uint64_t>(val, line_no);
      }
    } else if (f[0] == "O") {
      if (f.size() != 11) throw DataError("panel line " + std::to_string(line_no) + ": expected 11 fields");
      LoanOrigination o;
      o.loan_id = f[1];
      o.credit_score = opt_num<int>(f[2], line_no);
      o.occupancy = f[3].empty() ? std::nullopt : parse_occupancy(f[3]);
      o.dti = opt_num<double>(f[4], line_no);
      o.orig_upb = num<double>(f[5], line_no);
      o.orig_ltv = opt_num<double>(f[6], line_no);
      o.orig_interest_rate = num<double>(f[7], line_no);
      o.loan_purpose = f[8].empty() ? std::nullopt : parse_purpose(f[8]);
      o.orig_loan_term = num<int>(f[9], line_no);
      o.num_borrowers = opt_num<int>(f[10], line_no);
      if (!panel.loans.empty() && !(panel.loans.back().orig.loan_id < o.loan_id))
        throw DataError("panel line " + std::to_string(line_no) + ": loans out of order");
      panel.loans.push_back(Loan{std::move(o), {}});
    } else if (f[0] == "P") {
      if (f.size() != 13) throw DataError("panel line " + std::to_string(line_no) + ": expected 13 fields");
      if (panel.loans.empty() || panel.loans.back().orig.loan_id != f[1])
        throw DataError("panel line " + std::to_string(line_no) + ": record without preceding origination");
      PerformanceRecord r;
      r.loan_id = f[1];
      r.reporting_period = num<std::int64_t>(f[2], line_no);
      r.month_index = num<int>(f[3], line_no);
      r.loan_age = num<int>(f[4], line_no);
      r.cur_act_upb = opt_num<double>(f[5], line_no);
      r.cur_loan_del = opt_num<int>(f[6], line_no);
      r.orig_loan_del = opt_num<int>(f[7], line_no);
      r.cur_int_rate = opt_num<double>(f[8], line_no);
      r.cnib_upb = opt_num<double>(f[9], line_no);
      r.eltv = opt_num<double>(f[10], line_no);
      r.zero_bal_code = opt_str(f[11]);
      r.assistance = f[12].empty() ? std::nullopt : parse_assistance(f[12]);
      auto& recs = panel.loans.back().records;
      if (!recs.empty() && recs.back().loan_age >= r.loan_age)
        throw DataError("panel line " + std::to_string(line_no) + ": loan_age not increasing");
      recs.push_back(std::move(r));
    } else {
      throw DataError("panel line " + std::to_string(line_no) + ": unknown record type '" + f[0] + "'");
    }
  }
  std::set<std::int64_t> periods;
  for (const auto& l : panel.loans)
    for (const auto& r : l.records) periods.insert(r.reporting_period);
  panel.periods.assign(periods.begin(), periods.end());
  return panel;
}

void save_panel(const std::filesystem::path& path, const LoanPanel& panel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_panel(out, panel);
  if (!out) throw DataError("write failed for " + path.string());
}

LoanPanel load_panel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_panel(in);
}

}  // namespace driftsurv::data
