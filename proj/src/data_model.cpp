#include "driftsurv/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "driftsurv/error.hpp"

namespace driftsurv::data {

// ---------------------------------------------------------------------------
// LoanPanel

std::size_t LoanPanel::n_records() const {
  std::size_t n = 0;
  for (const auto& l : loans) n += l.records.size();
  return n;
}

int LoanPanel::max_loan_age() const {
  int m = 0;
  for (const auto& l : loans)
    if (!l.records.empty()) m = std::max(m, l.records.back().loan_age);
  return m;
}

const Loan* LoanPanel::find(const std::string& loan_id) const {
  auto it = std::lower_bound(loans.begin(), loans.end(), loan_id,
                             [](const Loan& l, const std::string& id) { return l.orig.loan_id < id; });
  if (it == loans.end() || it->orig.loan_id != loan_id) return nullptr;
  return &*it;
}

// ---------------------------------------------------------------------------
// Codes

std::optional<Occupancy> parse_occupancy(const std::string& s) {
  if (s == "P" || s == "owner") return Occupancy::Owner;
  if (s == "S" || s == "second-home") return Occupancy::SecondHome;
  if (s == "I" || s == "investment") return Occupancy::Investment;
  return std::nullopt;
}

std::optional<LoanPurpose> parse_purpose(const std::string& s) {
  if (s == "C" || s == "cash-out-refi") return LoanPurpose::CashOutRefi;
  if (s == "N" || s == "no-cash-out-refi") return LoanPurpose::NoCashOutRefi;
  if (s == "P" || s == "purchase") return LoanPurpose::Purchase;
  return std::nullopt;
}

std::optional<Assistance> parse_assistance(const std::string& s) {
  if (s == "F") return Assistance::Forbearance;
  if (s == "R") return Assistance::Repayment;
  if (s == "T") return Assistance::Trial;
  return std::nullopt;
}

char occupancy_code(Occupancy o) {
  switch (o) {
    case Occupancy::Owner: return 'P';
    case Occupancy::SecondHome: return 'S';
    case Occupancy::Investment: return 'I';
  }
  return '?';
}

char purpose_code(LoanPurpose p) {
  switch (p) {
    case LoanPurpose::CashOutRefi: return 'C';
    case LoanPurpose::NoCashOutRefi: return 'N';
    case LoanPurpose::Purchase: return 'P';
  }
  return '?';
}

char assistance_code(Assistance a) {
  switch (a) {
    case Assistance::Forbearance: return 'F';
    case Assistance::Repayment: return 'R';
    case Assistance::Trial: return 'T';
  }
  return '?';
}

// ---------------------------------------------------------------------------
// Schemas

namespace {

TableSchema positional(std::initializer_list<std::pair<const char*, std::size_t>> cols) {
  TableSchema t;
  for (const auto& [name, pos] : cols) t.columns.emplace(name, pos);
  return t;
}

const std::set<std::string> kOrigFields{"loan_id",      "credit_score",       "occupancy",
                                        "dti",          "orig_upb",           "orig_ltv",
                                        "orig_interest_rate", "loan_purpose", "orig_loan_term",
                                        "num_borrowers"};
const std::set<std::string> kPerfFields{"loan_id",      "reporting_period", "cur_act_upb",
                                        "cur_loan_del", "loan_age",         "zero_bal_code",
                                        "cur_int_rate", "cnib_upb",         "eltv",
                                        "assistance_code"};

TableSchema table_from_json(const nlohmann::json& j, const std::set<std::string>& allowed,
                            const char* what) {
  TableSchema t;
  for (const auto& [key, val] : j.items()) {
    if (key == "delimiter") {
      const auto d = val.get<std::string>();
      if (d.size() != 1) throw ConfigError(std::string(what) + ".delimiter must be one character");
      t.delimiter = d[0];
    } else if (key == "header") {
      t.header = val.get<bool>();
    } else if (key == "columns") {
      for (const auto& [field, ref] : val.items()) {
        if (!allowed.count(field))
          throw ConfigError(std::string(what) + ": unknown field '" + field + "'");
        if (ref.is_number_unsigned())
          t.columns.emplace(field, ref.get<std::size_t>());
        else if (ref.is_string())
          t.columns.emplace(field, ref.get<std::string>());
        else
          throw ConfigError(std::string(what) + ": column for '" + field +
                            "' must be an index or a header name");
      }
    } else {
      throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
    }
  }
  return t;
}

}  // namespace

IngestSchema IngestSchema::freddie_mac() {
  IngestSchema s;
  s.origination = positional({{"credit_score", 0},
                              {"occupancy", 7},
                              {"dti", 9},
                              {"orig_upb", 10},
                              {"orig_ltv", 11},
                              {"orig_interest_rate", 12},
                              {"loan_id", 19},
                              {"loan_purpose", 20},
                              {"orig_loan_term", 21},
                              {"num_borrowers", 22}});
  s.performance = positional({{"loan_id", 0},
                              {"reporting_period", 1},
                              {"cur_act_upb", 2},
                              {"cur_loan_del", 3},
                              {"loan_age", 4},
                              {"zero_bal_code", 8},
                              {"cur_int_rate", 10},
                              {"cnib_upb", 11},
                              {"eltv", 26},
                              {"assistance_code", 30}});
  return s;
}

IngestSchema IngestSchema::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("schema must be a JSON object");
  IngestSchema s = freddie_mac();
  for (const auto& [key, val] : j.items()) {
    if (key == "origination") {
      s.origination = table_from_json(val, kOrigFields, "origination");
    } else if (key == "performance") {
      s.performance = table_from_json(val, kPerfFields, "performance");
    } else if (key == "max_malformed_fraction") {
      s.max_malformed_fraction = val.get<double>();
    } else if (key == "ranges") {
      for (const auto& [rk, rv] : val.items()) {
        if (rk == "credit_score_min") s.ranges.credit_score_min = rv.get<int>();
        else if (rk == "credit_score_max") s.ranges.credit_score_max = rv.get<int>();
        else if (rk == "dti_max") s.ranges.dti_max = rv.get<double>();
        else if (rk == "ltv_max") s.ranges.ltv_max = rv.get<double>();
        else throw ConfigError("ranges: unknown key '" + rk + "'");
      }
    } else {
      throw ConfigError("schema: unknown key '" + key + "'");
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

template <class T>
std::optional<T> to_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

/// Column positions resolved against an optional header line.
class Resolver {
 public:
  Resolver(const TableSchema& schema, const std::vector<std::string_view>* header) {
    for (const auto& [field, ref] : schema.columns) {
      if (const auto* idx = std::get_if<std::size_t>(&ref)) {
        pos_[field] = *idx;
        continue;
      }
      const auto& name = std::get<std::string>(ref);
      if (!header) throw ConfigError("column '" + name + "' referenced by name but the file has no header");
      auto it = std::find(header->begin(), header->end(), name);
      if (it == header->end()) throw ConfigError("header has no column '" + name + "'");
      pos_[field] = static_cast<std::size_t>(it - header->begin());
    }
  }

  void require(const char* field) const {
    if (!pos_.count(field)) throw ConfigError(std::string("mandatory column '") + field + "' is not mapped");
  }

  std::string_view get(const std::vector<std::string_view>& f, const char* field) const {
    auto it = pos_.find(field);
    if (it == pos_.end() || it->second >= f.size()) return {};
    return f[it->second];
  }

  bool present(const std::vector<std::string_view>& f, const char* field) const {
    auto it = pos_.find(field);
    return it != pos_.end() && it->second < f.size();
  }

 private:
  std::map<std::string, std::size_t> pos_;
};

template <class Record, class RowFn>
Parsed<Record> parse_table(std::istream& in, const TableSchema& table, double max_malformed,
                           std::initializer_list<const char*> mandatory, RowFn&& row_fn) {
  Parsed<Record> out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<Resolver> resolver;
  std::string header_line;
  std::vector<std::string_view> header_fields;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!resolver) {
      if (table.header) {
        header_line = line;
        header_fields = split(header_line, table.delimiter);
        resolver.emplace(table, &header_fields);
        for (const char* m : mandatory) resolver->require(m);
        continue;
      }
      resolver.emplace(table, nullptr);
      for (const char* m : mandatory) resolver->require(m);
    }
    ++out.stats.lines;
    const auto fields = split(line, table.delimiter);
    bool ok = true;
    for (const char* m : mandatory)
      if (!resolver->present(fields, m) || resolver->get(fields, m).empty()) ok = false;
    std::optional<Record> rec;
    if (ok) rec = row_fn(*resolver, fields, out.stats);
    if (!rec) {
      ++out.stats.malformed;
      if (out.stats.malformed_lines.size() < 20) out.stats.malformed_lines.push_back(line_no);
      continue;
    }
    out.records.push_back(std::move(*rec));
  }
  if (!resolver && table.header == false) {
    // Empty input: still validate the mapping so configuration errors surface.
    Resolver r(table, nullptr);
    for (const char* m : mandatory) r.require(m);
  }

  if (out.stats.malformed > 0) {
    const double frac = static_cast<double>(out.stats.malformed) / static_cast<double>(out.stats.lines);
    std::ostringstream msg;
    msg << out.stats.malformed << " malformed line(s) of " << out.stats.lines << " (lines";
    for (auto l : out.stats.malformed_lines) msg << ' ' << l;
    if (out.stats.malformed > out.stats.malformed_lines.size()) msg << " ...";
    msg << ')';
    if (frac > max_malformed) throw DataError(msg.str());
    spdlog::warn("skipped {}", msg.str());
  }
  return out;
}

}  // namespace

Parsed<LoanOrigination> parse_origination(std::istream& in, const IngestSchema& schema) {
  const auto& rg = schema.ranges;
  auto row = [&rg](const Resolver& r, const std::vector<std::string_view>& f,
                   ParseStats& st) -> std::optional<LoanOrigination> {
    LoanOrigination o;
    o.loan_id = std::string(r.get(f, "loan_id"));
    const auto upb = to_number<double>(r.get(f, "orig_upb"));
    const auto rate = to_number<double>(r.get(f, "orig_interest_rate"));
    const auto term = to_number<int>(r.get(f, "orig_loan_term"));
    if (!upb || *upb <= 0 || !rate || *rate < 0 || !term || *term <= 0) return std::nullopt;
    o.orig_upb = *upb;
    o.orig_interest_rate = *rate;
    o.orig_loan_term = *term;

    auto note_missing = [&st](std::string_view raw, bool valid) {
      if (!raw.empty() && !valid) ++st.values_set_missing;
    };
    const auto cs_raw = r.get(f, "credit_score");
    if (auto cs = to_number<int>(cs_raw); cs && *cs >= rg.credit_score_min && *cs <= rg.credit_score_max)
      o.credit_score = *cs;
    else
      note_missing(cs_raw, false);
    const auto dti_raw = r.get(f, "dti");
    if (auto d = to_number<double>(dti_raw); d && *d > 0 && *d <= rg.dti_max)
      o.dti = *d;
    else
      note_missing(dti_raw, false);
    const auto ltv_raw = r.get(f, "orig_ltv");
    if (auto v = to_number<double>(ltv_raw); v && *v > 0 && *v <= rg.ltv_max)
      o.orig_ltv = *v;
    else
      note_missing(ltv_raw, false);
    const auto nb_raw = r.get(f, "num_borrowers");
    if (auto nb = to_number<int>(nb_raw); nb && *nb >= 1)
      o.num_borrowers = *nb;
    else
      note_missing(nb_raw, false);
    const auto occ_raw = r.get(f, "occupancy");
    o.occupancy = parse_occupancy(std::string(occ_raw));
    note_missing(occ_raw, o.occupancy.has_value());
    const auto pur_raw = r.get(f, "loan_purpose");
    o.loan_purpose = parse_purpose(std::string(pur_raw));
    note_missing(pur_raw, o.loan_purpose.has_value());
    return o;
  };
  return parse_table<LoanOrigination>(in, schema.origination, schema.max_malformed_fraction,
                                      {"loan_id", "orig_upb", "orig_interest_rate", "orig_loan_term"}, row);
}

Parsed<PerformanceRecord> parse_performance(std::istream& in, const IngestSchema& schema) {
  const auto& rg = schema.ranges;
  auto row = [&rg](const Resolver& r, const std::vector<std::string_view>& f,
                   ParseStats& st) -> std::optional<PerformanceRecord> {
    PerformanceRecord p;
    p.loan_id = std::string(r.get(f, "loan_id"));
    const auto period = to_number<std::int64_t>(r.get(f, "reporting_period"));
    const auto age = to_number<int>(r.get(f, "loan_age"));
    if (!period || !age || *age < 0) return std::nullopt;
    p.reporting_period = *period;
    p.loan_age = *age;

    auto nonneg = [&st](std::string_view raw) -> std::optional<double> {
      auto v = to_number<double>(raw);
      if (v && *v >= 0) return v;
      if (!raw.empty()) ++st.values_set_missing;
      return std::nullopt;
    };
    p.cur_act_upb = nonneg(r.get(f, "cur_act_upb"));
    p.cur_int_rate = nonneg(r.get(f, "cur_int_rate"));
    p.cnib_upb = nonneg(r.get(f, "cnib_upb"));
    const auto eltv_raw = r.get(f, "eltv");
    if (auto v = to_number<double>(eltv_raw); v && *v > 0 && *v <= rg.ltv_max)
      p.eltv = *v;
    else if (!eltv_raw.empty())
      ++st.values_set_missing;

    const auto del_raw = r.get(f, "cur_loan_del");
    if (auto d = to_number<int>(del_raw); d && *d >= 0) {
      p.cur_loan_del = *d;
    } else if (!del_raw.empty()) {
      ++st.unknown_delinquency_codes;
    }
    if (const auto z = r.get(f, "zero_bal_code"); !z.empty()) p.zero_bal_code = std::string(z);
    p.assistance = parse_assistance(std::string(r.get(f, "assistance_code")));
    return p;
  };
  return parse_table<PerformanceRecord>(in, schema.performance, schema.max_malformed_fraction,
                                        {"loan_id", "reporting_period", "loan_age"}, row);
}

// ---------------------------------------------------------------------------
// Join

void reindex_months(LoanPanel& panel) {
  std::set<std::int64_t> periods;
  for (const auto& l : panel.loans)
    for (const auto& r : l.records) periods.insert(r.reporting_period);
  panel.periods.assign(periods.begin(), periods.end());
  for (auto& l : panel.loans)
    for (auto& r : l.records) {
      auto it = std::lower_bound(panel.periods.begin(), panel.periods.end(), r.reporting_period);
      r.month_index = static_cast<int>(it - panel.periods.begin()) + 1;
    }
}

JoinResult join_panel(std::vector<LoanOrigination> origs, std::vector<PerformanceRecord> perf) {
  JoinResult res;
  std::unordered_map<std::string, std::size_t> orig_index;
  orig_index.reserve(origs.size());
  for (std::size_t i = 0; i < origs.size(); ++i) {
    if (!orig_index.emplace(origs[i].loan_id, i).second)
      throw DataError("duplicate origination record for loan '" + origs[i].loan_id + "'");
  }

  std::vector<std::vector<PerformanceRecord>> grouped(origs.size());
  std::set<std::string> unlinked;
  for (auto& p : perf) {
    auto it = orig_index.find(p.loan_id);
    if (it == orig_index.end()) {
      ++res.report.perf_rows_dropped;
      unlinked.insert(p.loan_id);
      continue;
    }
    if (p.loan_age > origs[it->second].orig_loan_term) {
      ++res.report.perf_rows_dropped;
      continue;
    }
    grouped[it->second].push_back(std::move(p));
  }
  res.report.perf_loans_unlinked = unlinked.size();

  std::vector<std::string> duplicates;
  for (std::size_t i = 0; i < origs.size(); ++i) {
    auto& recs = grouped[i];
    if (recs.empty()) {
      ++res.report.orig_dropped;
      continue;
    }
    std::stable_sort(recs.begin(), recs.end(),
                     [](const auto& a, const auto& b) { return a.loan_age < b.loan_age; });
    for (std::size_t k = 1; k < recs.size(); ++k)
      if (recs[k].loan_age == recs[k - 1].loan_age && duplicates.size() < 20)
        duplicates.push_back(origs[i].loan_id + "@" + std::to_string(recs[k].loan_age));
    res.panel.loans.push_back(Loan{std::move(origs[i]), std::move(recs)});
  }
  if (!duplicates.empty()) {
    std::string msg = "duplicate (loan_id, loan_age) pairs:";
    for (const auto& d : duplicates) msg += " " + d;
    throw DataError(msg);
  }
  std::sort(res.panel.loans.begin(), res.panel.loans.end(),
            [](const Loan& a, const Loan& b) { return a.orig.loan_id < b.orig.loan_id; });
  reindex_months(res.panel);
  res.report.loans_kept = res.panel.loans.size();
  if (res.report.perf_rows_dropped > 0 || res.report.orig_dropped > 0)
    spdlog::info("join: kept {} loans, dropped {} originations and {} performance rows",
                 res.report.loans_kept, res.report.orig_dropped, res.report.perf_rows_dropped);
  return res;
}

nlohmann::json to_json(const JoinReport& r) {
  return nlohmann::json{{"loans_kept", r.loans_kept},
                        {"orig_dropped", r.orig_dropped},
                        {"perf_rows_dropped", r.perf_rows_dropped},
                        {"perf_loans_unlinked", r.perf_loans_unlinked}};
}

}  // namespace driftsurv::data
