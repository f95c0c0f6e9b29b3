#include "driftsurv/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "driftsurv/error.hpp"
#include "driftsurv/kernels.hpp"

namespace driftsurv::hazard {

using landmark::LandmarkDataset;
using landmark::LandmarkSample;

// ---------------------------------------------------------------------------
// Feature access

namespace {

const std::set<std::string> kNumeric{"credit_score", "dti",          "orig_upb",     "orig_ltv",
                                     "orig_interest_rate", "orig_loan_term", "num_borrowers",
                                     "cur_int_rate", "eltv",         "cur_act_upb",  "cnib_upb",
                                     "age_frac",     "assistance"};
const std::set<std::string> kCategorical{"occupancy", "loan_purpose"};

template <class T>
std::optional<double> as_double(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return static_cast<double>(*v);
}

std::optional<double> numeric_value(const LandmarkSample& s, const std::string& name) {
  const auto& o = s.statics;
  const auto& d = s.dynamic;
  if (name == "credit_score") return as_double(o.credit_score);
  if (name == "dti") return o.dti;
  if (name == "orig_upb") return o.orig_upb;
  if (name == "orig_ltv") return o.orig_ltv;
  if (name == "orig_interest_rate") return o.orig_interest_rate;
  if (name == "orig_loan_term") return static_cast<double>(o.orig_loan_term);
  if (name == "num_borrowers") return as_double(o.num_borrowers);
  if (name == "cur_int_rate") return d.cur_int_rate;
  if (name == "eltv") return d.eltv;
  if (name == "cur_act_upb") return d.cur_act_upb;
  if (name == "cnib_upb") return d.cnib_upb;
  if (name == "age_frac") return static_cast<double>(s.landmark) / o.orig_loan_term;
  if (name == "assistance") return d.assistance ? 1.0 : 0.0;
  throw ConfigError("unknown numeric feature '" + name + "'");
}

std::optional<std::string> categorical_value(const LandmarkSample& s, const std::string& name) {
  if (name == "occupancy") {
    if (!s.statics.occupancy) return std::nullopt;
    return std::string(1, data::occupancy_code(*s.statics.occupancy));
  }
  if (name == "loan_purpose") {
    if (!s.statics.loan_purpose) return std::nullopt;
    return std::string(1, data::purpose_code(*s.statics.loan_purpose));
  }
  throw ConfigError("unknown categorical feature '" + name + "'");
}

}  // namespace

void FeatureSelection::validate() const {
  for (const auto& n : numeric)
    if (!kNumeric.count(n)) throw ConfigError("unknown numeric feature '" + n + "'");
  for (const auto& n : categorical)
    if (!kCategorical.count(n)) throw ConfigError("unknown categorical feature '" + n + "'");
}

// ---------------------------------------------------------------------------
// Encoding

std::size_t FeatureEncodingSpec::n_columns() const { return column_names().size(); }

std::vector<std::string> FeatureEncodingSpec::column_names() const {
  std::vector<std::string> names;
  for (const auto& f : numeric) {
    names.push_back(f.name);
    if (f.missing_indicator) names.push_back(f.name + ":missing");
  }
  for (const auto& f : categorical) {
    for (std::size_t k = 1; k < f.levels.size(); ++k) names.push_back(f.name + "=" + f.levels[k]);
    if (f.missing_indicator) names.push_back(f.name + ":missing");
  }
  if (include_marker) {
    names.push_back("marker");
    if (marker_missing_indicator) names.push_back("marker:missing");
  }
  if (include_landmark_onehot)
    for (std::size_t k = 1; k < landmark_levels.size(); ++k)
      names.push_back("landmark=" + std::to_string(landmark_levels[k]));
  return names;
}

std::optional<std::size_t> FeatureEncodingSpec::marker_column() const {
  if (!include_marker) return std::nullopt;
  const auto names = column_names();
  return static_cast<std::size_t>(std::find(names.begin(), names.end(), "marker") - names.begin());
}

std::optional<std::size_t> FeatureEncodingSpec::landmark_column_offset() const {
  if (!include_landmark_onehot || landmark_levels.size() < 2) return std::nullopt;
  return n_columns() - (landmark_levels.size() - 1);
}

std::vector<std::size_t> all_rows(const LandmarkDataset& ds) {
  std::vector<std::size_t> rows(ds.samples.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

FeatureEncodingSpec fit_encoding(const LandmarkDataset& ds, std::span<const std::size_t> rows,
                                 const FeatureSelection& features, bool include_marker,
                                 bool include_landmark_onehot) {
  features.validate();
  FeatureEncodingSpec spec;
  for (const auto& name : features.numeric) {
    NumericEncoding e;
    e.name = name;
    double sum = 0;
    std::size_t n = 0;
    for (auto r : rows) {
      if (auto v = numeric_value(ds.samples[r], name)) {
        sum += *v;
        ++n;
      } else {
        e.missing_indicator = true;
      }
    }
    e.mean = n ? sum / n : 0.0;
    double ss = 0;
    for (auto r : rows)
      if (auto v = numeric_value(ds.samples[r], name)) ss += (*v - e.mean) * (*v - e.mean);
    const double sd = n ? std::sqrt(ss / n) : 0.0;
    e.sd = sd > 0 ? sd : 1.0;
    spec.numeric.push_back(e);
  }
  for (const auto& name : features.categorical) {
    CategoricalEncoding e;
    e.name = name;
    std::set<std::string> levels;
    for (auto r : rows) {
      if (auto v = categorical_value(ds.samples[r], name))
        levels.insert(*v);
      else
        e.missing_indicator = true;
    }
    e.levels.assign(levels.begin(), levels.end());
    spec.categorical.push_back(e);
  }
  spec.include_marker = include_marker;
  if (include_marker)
    for (auto r : rows)
      if (!ds.samples[r].marker) spec.marker_missing_indicator = true;
  spec.include_landmark_onehot = include_landmark_onehot;
  if (include_landmark_onehot) {
    std::set<int> lv;
    for (auto r : rows) lv.insert(ds.samples[r].landmark);
    spec.landmark_levels.assign(lv.begin(), lv.end());
  }
  return spec;
}

Encoded encode(const LandmarkDataset& ds, std::span<const std::size_t> rows, const FeatureEncodingSpec& spec) {
  const std::size_t cols = spec.n_columns();
  Encoded out{DesignMatrix(rows.size(), cols), std::vector<double>(rows.size())};
  std::size_t unseen = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = ds.samples[rows[i]];
    auto row = out.x.row(i);
    std::size_t c = 0;
    for (const auto& f : spec.numeric) {
      const auto v = numeric_value(s, f.name);
      row[c++] = v ? (*v - f.mean) / f.sd : 0.0;
      if (f.missing_indicator) row[c++] = v ? 0.0 : 1.0;
    }
    for (const auto& f : spec.categorical) {
      const auto v = categorical_value(s, f.name);
      if (v) {
        auto it = std::find(f.levels.begin(), f.levels.end(), *v);
        if (it == f.levels.end())
          ++unseen;
        else if (it != f.levels.begin())
          row[c + static_cast<std::size_t>(it - f.levels.begin()) - 1] = 1.0;
      }
      c += f.levels.empty() ? 0 : f.levels.size() - 1;
      if (f.missing_indicator) row[c++] = v ? 0.0 : 1.0;
    }
    if (spec.include_marker) {
      row[c++] = s.marker.value_or(0.0);
      if (spec.marker_missing_indicator) row[c++] = s.marker ? 0.0 : 1.0;
    }
    if (spec.include_landmark_onehot) {
      auto it = std::find(spec.landmark_levels.begin(), spec.landmark_levels.end(), s.landmark);
      if (it == spec.landmark_levels.end())
        ++unseen;
      else if (it != spec.landmark_levels.begin())
        row[c + static_cast<std::size_t>(it - spec.landmark_levels.begin()) - 1] = 1.0;
    }
    out.y[i] = s.label;
  }
  if (unseen > 0) spdlog::debug("encode: {} value(s) with levels unseen at fit time mapped to reference", unseen);
  return out;
}

Encoded encode(const LandmarkDataset& ds, const FeatureEncodingSpec& spec) {
  const auto rows = all_rows(ds);
  return encode(ds, rows, spec);
}

// ---------------------------------------------------------------------------
// Logistic regression

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sigmoid_complement(double z) { return sigmoid(-z); }

namespace {

// log(1 + exp(z))
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_inputs(const DesignMatrix& x, std::span<const double> y, std::span<const double> w) {
  if (y.size() != x.rows || w.size() != x.rows) throw std::invalid_argument("fit_logistic: size mismatch");
  for (double v : x.values)
    if (!std::isfinite(v)) throw DataError("fit_logistic: non-finite design entry");
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw DataError("fit_logistic: labels must be 0/1");
    if (!(w[i] > 0) || !std::isfinite(w[i])) throw DataError("fit_logistic: weights must be positive and finite");
    (y[i] == 1.0 ? pos : neg) = true;
  }
  if (!pos || !neg) throw DataError("fit_logistic: labels contain a single class");
}

struct Evaluation {
  double objective = 0;
  std::vector<double> grad;  // intercept first
  double grad_max = 0;
};

Evaluation evaluate(const DesignMatrix& x, std::span<const double> y, std::span<const double> w, double l2,
                    double b0, std::span<const double> beta, std::vector<double>& eta, Eigen::MatrixXd* hess) {
  const auto& k = simd::kernels();
  const std::size_t p = x.cols;
  eta.resize(x.rows);
  k.gemv(x.values.data(), x.rows, p, beta.data(), eta.data());
  Evaluation ev;
  ev.grad.assign(p + 1, 0.0);
  std::vector<double> h_upper;
  if (hess) h_upper.assign(p * p, 0.0);
  double h00 = 0;
  std::vector<double> h0(p, 0.0);
  // Neumaier summation: near the optimum, Newton decreases are far below the
  // rounding error of a naive sum over all rows.
  double nll = 0, nll_c = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double z = eta[i] + b0;
    const double pr = sigmoid(z);
    const double term = w[i] * (softplus(z) - y[i] * z);
    const double tsum = nll + term;
    nll_c += std::abs(nll) >= std::abs(term) ? (nll - tsum) + term : (term - tsum) + nll;
    nll = tsum;
    const double r = w[i] * (pr - y[i]);
    const double* xi = x.values.data() + i * p;
    ev.grad[0] += r;
    k.axpy(r, xi, ev.grad.data() + 1, p);
    if (hess) {
      const double c = w[i] * pr * (1.0 - pr);
      h00 += c;
      k.axpy(c, xi, h0.data(), p);
      k.syr_upper(c, xi, h_upper.data(), p);
    }
  }
  const double pen = k.dot(beta.data(), beta.data(), p);
  ev.objective = (nll + nll_c) + 0.5 * l2 * pen;
  k.axpy(l2, beta.data(), ev.grad.data() + 1, p);
  for (double g : ev.grad) ev.grad_max = std::max(ev.grad_max, std::abs(g));
  if (hess) {
    hess->resize(static_cast<Eigen::Index>(p + 1), static_cast<Eigen::Index>(p + 1));
    (*hess)(0, 0) = h00;
    for (std::size_t a = 0; a < p; ++a) {
      const auto ia = static_cast<Eigen::Index>(a + 1);
      (*hess)(0, ia) = (*hess)(ia, 0) = h0[a];
      for (std::size_t b = a; b < p; ++b) {
        const auto ib = static_cast<Eigen::Index>(b + 1);
        (*hess)(ia, ib) = (*hess)(ib, ia) = h_upper[a * p + b];
      }
      (*hess)(ia, ia) += l2;
    }
  }
  return ev;
}

Eigen::VectorXd solve_spd(Eigen::MatrixXd h, const Eigen::VectorXd& rhs) {
  const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
  for (double jitter = 0.0; jitter < 1e6 * scale; jitter = jitter == 0.0 ? 1e-12 * scale : jitter * 100) {
    Eigen::MatrixXd hj = h;
    hj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(hj);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd d = llt.solve(rhs);
      if (d.allFinite()) return d;
    }
  }
  throw NumericError("fit_logistic: Hessian is not positive definite");
}

}  // namespace

double logistic_objective(const DesignMatrix& x, std::span<const double> y, std::span<const double> w, double l2,
                          double intercept, std::span<const double> coef, std::vector<double>* gradient) {
  std::vector<double> eta;
  auto ev = evaluate(x, y, w, l2, intercept, coef, eta, nullptr);
  if (gradient) *gradient = std::move(ev.grad);
  return ev.objective;
}

LogisticFit fit_logistic(const DesignMatrix& x, std::span<const double> y, std::span<const double> w,
                         const FitOptions& opt) {
  if (opt.l2 < 0) throw ConfigError("fit_logistic: l2 must be >= 0");
  check_inputs(x, y, w);
  const std::size_t p = x.cols;
  LogisticFit fit;
  fit.coef.assign(p, 0.0);
  std::vector<double> eta;
  Eigen::MatrixXd hess;
  auto ev = evaluate(x, y, w, opt.l2, fit.intercept, fit.coef, eta, &hess);
  fit.objective_trace.push_back(ev.objective);

  for (fit.n_iter = 0; fit.n_iter < opt.max_iter; ++fit.n_iter) {
    if (ev.grad_max <= opt.grad_tol) {
      fit.converged = true;
      break;
    }
    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(ev.grad.data(), static_cast<Eigen::Index>(p + 1));
    const Eigen::VectorXd step = solve_spd(hess, -g);
    const double slope = g.dot(step);

    // Backtracking line search on the penalised objective.
    double t = 1.0;
    bool accepted = false;
    double cand_b0 = 0;
    std::vector<double> cand(p);
    Evaluation cand_ev;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      cand_b0 = fit.intercept + t * step[0];
      for (std::size_t j = 0; j < p; ++j) cand[j] = fit.coef[j] + t * step[static_cast<Eigen::Index>(j + 1)];
      cand_ev = evaluate(x, y, w, opt.l2, cand_b0, cand, eta, nullptr);
      if (!std::isfinite(cand_ev.objective)) continue;
      if (cand_ev.objective <= ev.objective + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      // Close to the optimum the objective change falls below rounding; accept
      // a full step that still shrinks the gradient.
      const double noise = 8 * std::numeric_limits<double>::epsilon() * std::abs(ev.objective);
      if (t == 1.0 && cand_ev.objective <= ev.objective + noise && cand_ev.grad_max < ev.grad_max) {
        accepted = true;
        break;
      }
    }
    spdlog::trace("newton {}: objective {:.12g}, |grad| {:.3g}, step {}", fit.n_iter, cand_ev.objective,
                  cand_ev.grad_max, accepted ? t : 0.0);
    if (!accepted) break;
    fit.intercept = cand_b0;
    fit.coef = cand;
    ev = evaluate(x, y, w, opt.l2, fit.intercept, fit.coef, eta, &hess);
    fit.objective_trace.push_back(ev.objective);
  }
  if (!fit.converged && ev.grad_max <= opt.grad_tol) fit.converged = true;
  fit.grad_max_norm = ev.grad_max;
  for (double c : fit.coef)
    if (!std::isfinite(c)) throw NumericError("fit_logistic: non-finite coefficient");
  return fit;
}

std::vector<double> standard_errors(const DesignMatrix& x, std::span<const double> w, double l2,
                                    const LogisticFit& fit) {
  std::vector<double> y(x.rows, 0.0), eta;
  Eigen::MatrixXd hess;
  evaluate(x, y, w, l2, fit.intercept, fit.coef, eta, &hess);
  const Eigen::MatrixXd inv = hess.llt().solve(Eigen::MatrixXd::Identity(hess.rows(), hess.cols()));
  std::vector<double> se(static_cast<std::size_t>(hess.rows()));
  for (Eigen::Index i = 0; i < hess.rows(); ++i) se[static_cast<std::size_t>(i)] = std::sqrt(inv(i, i));
  return se;
}

// ---------------------------------------------------------------------------
// Variants

Variant parse_variant(const std::string& name) {
  if (name == "M1") return Variant::M1;
  if (name == "M1-Joint") return Variant::M1Joint;
  if (name == "M1-LM") return Variant::M1LM;
  if (name == "M1-TD") return Variant::M1TD;
  if (name == "M1-IW") return Variant::M1IW;
  if (name == "M1-LMISO" || name == "M1-LMISO-base") return Variant::M1LMISO;
  throw ConfigError("unknown model variant '" + name + "'");
}

ClassWeight parse_class_weight(const std::string& s) {
  if (s == "none") return ClassWeight::None;
  if (s == "balanced") return ClassWeight::Balanced;
  throw ConfigError("class_weight must be none or balanced, got '" + s + "'");
}

std::string class_weight_name(ClassWeight c) { return c == ClassWeight::Balanced ? "balanced" : "none"; }

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::M1: return "M1";
    case Variant::M1Joint: return "M1-Joint";
    case Variant::M1LM: return "M1-LM";
    case Variant::M1TD: return "M1-TD";
    case Variant::M1IW: return "M1-IW";
    case Variant::M1LMISO: return "M1-LMISO";
  }
  return "?";
}

std::optional<double> HazardModel::marker_coef() const {
  const auto c = encoding.marker_column();
  if (!c) return std::nullopt;
  return coef[*c];
}

std::vector<double> HazardModel::landmark_coefs() const {
  const auto off = encoding.landmark_column_offset();
  if (!off) return {};
  return {coef.begin() + static_cast<std::ptrdiff_t>(*off), coef.end()};
}

double HazardModel::baseline(int landmark) const {
  const auto off = encoding.landmark_column_offset();
  if (!off) return intercept;
  const auto& lv = encoding.landmark_levels;
  auto it = std::find(lv.begin(), lv.end(), landmark);
  if (it == lv.end() || it == lv.begin()) return intercept;
  return intercept + coef[*off + static_cast<std::size_t>(it - lv.begin()) - 1];
}

std::vector<double> linear_predictor(const HazardModel& m, const DesignMatrix& x) {
  if (x.cols != m.coef.size()) throw std::invalid_argument("linear_predictor: column mismatch");
  std::vector<double> eta(x.rows);
  simd::kernels().gemv(x.values.data(), x.rows, x.cols, m.coef.data(), eta.data());
  for (auto& e : eta) e += m.intercept;
  return eta;
}

std::vector<double> predict(const HazardModel& m, const LandmarkDataset& ds, std::span<const std::size_t> rows) {
  const auto enc = encode(ds, rows, m.encoding);
  auto eta = linear_predictor(m, enc.x);
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  for (auto& e : eta) e = std::clamp(sigmoid(e), lo, hi);
  return eta;
}

std::vector<double> predict(const HazardModel& m, const LandmarkDataset& ds) {
  const auto rows = all_rows(ds);
  return predict(m, ds, rows);
}

namespace {

void rescale_mean_one(std::vector<double>& w) {
  if (w.empty()) return;
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  for (auto& v : w) v /= mean;
}

}  // namespace

TrainingWeights time_decay_weights(const LandmarkDataset& ds, std::span<const std::size_t> rows, double half_life) {
  if (!(half_life > 0)) throw ConfigError("time_decay_weights: half_life must be > 0");
  TrainingWeights tw;
  tw.scheme = WeightScheme::TimeDecay;
  int lmax = std::numeric_limits<int>::min();
  for (auto r : rows) lmax = std::max(lmax, ds.samples[r].landmark);
  tw.w.reserve(rows.size());
  for (auto r : rows) tw.w.push_back(std::exp2(-static_cast<double>(lmax - ds.samples[r].landmark) / half_life));
  rescale_mean_one(tw.w);
  return tw;
}

TrainingWeights importance_weights(const DesignMatrix& train, const DesignMatrix& test,
                                   std::pair<double, double> clip, double l2) {
  const auto [lo, hi] = clip;
  if (!(lo > 0) || hi < lo) throw ConfigError("importance_weights: clip must satisfy 0 < lo <= hi");
  if (train.cols != test.cols) throw std::invalid_argument("importance_weights: column mismatch");
  const std::size_t n_train = train.rows;
  const std::size_t n_test = test.rows;
  auto fallback = [&](const char* why) {
    spdlog::warn("importance_weights: {}; using uniform weights", why);
    auto u = TrainingWeights::uniform(n_train);
    u.scheme = WeightScheme::Importance;
    return u;
  };
  if (n_train == 0 || n_test == 0) return fallback("empty train or test design");

  DesignMatrix both(n_train + n_test, train.cols);
  std::copy(train.values.begin(), train.values.end(), both.values.begin());
  std::copy(test.values.begin(), test.values.end(), both.values.begin() + static_cast<std::ptrdiff_t>(train.values.size()));
  std::vector<double> dom(n_train + n_test, 0.0);
  std::fill(dom.begin() + static_cast<std::ptrdiff_t>(n_train), dom.end(), 1.0);
  const std::vector<double> uw(dom.size(), 1.0);
  LogisticFit fit;
  try {
    fit = fit_logistic(both, dom, uw, FitOptions{l2, 500, 1e-8});
  } catch (const std::exception& e) {
    return fallback(e.what());
  }
  if (!fit.converged) return fallback("domain classifier did not converge");

  TrainingWeights tw;
  tw.scheme = WeightScheme::Importance;
  tw.w.resize(n_train);
  const double ratio = static_cast<double>(n_train) / static_cast<double>(n_test);
  std::vector<double> eta(n_train);
  simd::kernels().gemv(train.values.data(), n_train, train.cols, fit.coef.data(), eta.data());
  for (std::size_t i = 0; i < n_train; ++i) {
    // p/(1-p) = exp(eta) for the domain logit.
    const double odds = std::exp(std::min(eta[i] + fit.intercept, 700.0));
    tw.w[i] = std::clamp(odds * ratio, lo, hi);
  }
  rescale_mean_one(tw.w);
  return tw;
}

HazardModel make_variant(const LandmarkDataset& ds, std::span<const std::size_t> train_rows, Variant variant,
                         const HazardConfig& cfg, std::span<const std::size_t> test_rows) {
  HazardModel m;
  m.variant = variant;
  m.encoding = fit_encoding(ds, train_rows, cfg.features, uses_marker(variant), uses_landmark_onehot(variant));
  const auto enc = encode(ds, train_rows, m.encoding);

  TrainingWeights weights = TrainingWeights::uniform(train_rows.size());
  if (variant == Variant::M1TD) {
    weights = time_decay_weights(ds, train_rows, cfg.td_half_life);
  } else if (variant == Variant::M1IW) {
    if (test_rows.empty()) throw ConfigError("M1-IW needs the evaluation rows for its domain classifier");
    const auto test_enc = encode(ds, test_rows, m.encoding);
    weights = importance_weights(enc.x, test_enc.x, cfg.iw_clip, cfg.iw_l2);
  }
  if (cfg.class_weight == ClassWeight::Balanced) {
    const double n = static_cast<double>(enc.y.size());
    const double n_pos = std::accumulate(enc.y.begin(), enc.y.end(), 0.0);
    if (n_pos > 0 && n_pos < n)
      for (std::size_t i = 0; i < enc.y.size(); ++i) weights.w[i] *= n / (2.0 * (enc.y[i] == 1.0 ? n_pos : n - n_pos));
  }
  const auto fit = fit_logistic(enc.x, enc.y, weights.w, FitOptions{cfg.l2, cfg.max_iter, cfg.grad_tol});
  if (!fit.converged)
    spdlog::warn("{}: optimizer stopped after {} iterations, gradient {:.3g}", variant_name(variant), fit.n_iter,
                 fit.grad_max_norm);
  m.intercept = fit.intercept;
  m.coef = fit.coef;
  m.l2 = cfg.l2;
  m.converged = fit.converged;
  m.n_iter = fit.n_iter;
  m.grad_max_norm = fit.grad_max_norm;
  return m;
}

}  // namespace driftsurv::hazard
