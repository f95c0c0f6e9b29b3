#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "driftsurv/landmarking.hpp"

namespace driftsurv::hazard {

// ---------------------------------------------------------------------------
// Design matrices

/// Row-major dense matrix without an intercept column.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DesignMatrix() = default;
  DesignMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// ---------------------------------------------------------------------------
// Feature encoding

/// Which sample fields enter X(L). Numeric names: credit_score, dti, orig_upb,
/// orig_ltv, orig_interest_rate, orig_loan_term, num_borrowers, cur_int_rate,
/// eltv, cur_act_upb, cnib_upb, age_frac, assistance. Categorical names:
/// occupancy, loan_purpose.
struct FeatureSelection {
  std::vector<std::string> numeric{"credit_score", "dti",          "orig_upb", "orig_ltv",
                                   "orig_interest_rate", "orig_loan_term", "num_borrowers",
                                   "cur_int_rate", "eltv",         "age_frac", "assistance"};
  std::vector<std::string> categorical{"occupancy", "loan_purpose"};

  void validate() const;
};

struct NumericEncoding {
  std::string name;
  double mean = 0;
  double sd = 1;
  bool missing_indicator = false;

  bool operator==(const NumericEncoding&) const = default;
};

struct CategoricalEncoding {
  std::string name;
  std::vector<std::string> levels;  // levels[0] is the reference
  bool missing_indicator = false;

  bool operator==(const CategoricalEncoding&) const = default;
};

struct FeatureEncodingSpec {
  std::vector<NumericEncoding> numeric;
  std::vector<CategoricalEncoding> categorical;
  bool include_marker = false;
  bool marker_missing_indicator = false;
  bool include_landmark_onehot = false;
  std::vector<int> landmark_levels;  // ascending; first is the reference

  std::size_t n_columns() const;
  std::vector<std::string> column_names() const;
  /// Column of the marker, if included.
  std::optional<std::size_t> marker_column() const;
  /// First landmark indicator column (levels[1]), if included.
  std::optional<std::size_t> landmark_column_offset() const;

  bool operator==(const FeatureEncodingSpec&) const = default;
};

/// Standardization statistics, category levels and landmark levels, all
/// computed from the given training rows only.
FeatureEncodingSpec fit_encoding(const landmark::LandmarkDataset& ds, std::span<const std::size_t> rows,
                                 const FeatureSelection& features, bool include_marker,
                                 bool include_landmark_onehot);

struct Encoded {
  DesignMatrix x;
  std::vector<double> y;
};

/// Unseen categorical levels encode as the reference (all zeros).
Encoded encode(const landmark::LandmarkDataset& ds, std::span<const std::size_t> rows,
               const FeatureEncodingSpec& spec);
Encoded encode(const landmark::LandmarkDataset& ds, const FeatureEncodingSpec& spec);

std::vector<std::size_t> all_rows(const landmark::LandmarkDataset& ds);

// ---------------------------------------------------------------------------
// Logistic fitting

enum class WeightScheme { Uniform, TimeDecay, Importance };

struct TrainingWeights {
  std::vector<double> w;
  WeightScheme scheme = WeightScheme::Uniform;

  static TrainingWeights uniform(std::size_t n) { return {std::vector<double>(n, 1.0), WeightScheme::Uniform}; }
};

struct FitOptions {
  double l2 = 1e-4;
  int max_iter = 500;
  double grad_tol = 1e-8;
};

struct LogisticFit {
  double intercept = 0;
  std::vector<double> coef;
  bool converged = false;
  int n_iter = 0;
  double grad_max_norm = 0;
  std::vector<double> objective_trace;  // penalised weighted NLL after each accepted step
};

/// Weighted penalised logistic regression by damped Newton from zero. The
/// intercept is unpenalised. Throws DataError for one-class labels or
/// non-finite inputs.
LogisticFit fit_logistic(const DesignMatrix& x, std::span<const double> y, std::span<const double> w,
                         const FitOptions& opt);

/// Objective and gradient at (intercept, coef); gradient[0] is the intercept.
double logistic_objective(const DesignMatrix& x, std::span<const double> y, std::span<const double> w,
                          double l2, double intercept, std::span<const double> coef,
                          std::vector<double>* gradient = nullptr);

/// Standard errors from the inverse penalised Hessian (intercept first).
std::vector<double> standard_errors(const DesignMatrix& x, std::span<const double> w, double l2,
                                    const LogisticFit& fit);

double sigmoid(double z);
/// 1 - sigmoid(z) without cancellation.
double sigmoid_complement(double z);

// ---------------------------------------------------------------------------
// Model variants

enum class Variant { M1, M1Joint, M1LM, M1TD, M1IW, M1LMISO };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);
inline bool uses_marker(Variant v) { return v != Variant::M1; }
inline bool uses_landmark_onehot(Variant v) { return v == Variant::M1LM || v == Variant::M1LMISO; }
inline bool uses_isotonic(Variant v) { return v == Variant::M1LMISO; }

enum class ClassWeight { None, Balanced };

ClassWeight parse_class_weight(const std::string& s);
std::string class_weight_name(ClassWeight c);

struct HazardConfig {
  double l2 = 1e-4;
  /// Balanced: each class gets total weight n/2, multiplied into the scheme
  /// weights.
  ClassWeight class_weight = ClassWeight::None;
  double td_half_life = 12.0;
  std::pair<double, double> iw_clip{0.1, 10.0};
  double iw_l2 = 1e-4;
  int max_iter = 500;
  double grad_tol = 1e-8;
  FeatureSelection features;
};

struct HazardModel {
  Variant variant = Variant::M1;
  FeatureEncodingSpec encoding;
  double intercept = 0;
  std::vector<double> coef;  // one per encoded column, in column order
  double l2 = 0;
  bool converged = false;
  int n_iter = 0;
  double grad_max_norm = 0;

  std::optional<double> marker_coef() const;
  /// delta for landmark_levels[1..].
  std::vector<double> landmark_coefs() const;
  /// alpha0(L) = alpha0 + delta . Z_L
  double baseline(int landmark) const;

  bool operator==(const HazardModel&) const = default;
};

/// Linear predictor for each row of an encoded design.
std::vector<double> linear_predictor(const HazardModel& m, const DesignMatrix& x);
std::vector<double> predict(const HazardModel& m, const landmark::LandmarkDataset& ds,
                            std::span<const std::size_t> rows);
std::vector<double> predict(const HazardModel& m, const landmark::LandmarkDataset& ds);

/// w = 2^(-(L_max - L)/half_life) over the given rows, rescaled to mean 1.
TrainingWeights time_decay_weights(const landmark::LandmarkDataset& ds, std::span<const std::size_t> rows,
                                   double half_life);

/// Odds of a train/test domain classifier, clipped to [lo, hi] and rescaled
/// to mean 1. Falls back to uniform weights if the classifier fails.
TrainingWeights importance_weights(const DesignMatrix& train, const DesignMatrix& test,
                                   std::pair<double, double> clip, double l2 = 1e-4);

/// Fits one ablation variant on `train_rows`. M1-IW needs `test_rows` to
/// build its domain classifier; M1-LMISO returns the uncalibrated M1-LM base.
HazardModel make_variant(const landmark::LandmarkDataset& ds, std::span<const std::size_t> train_rows,
                         Variant variant, const HazardConfig& cfg,
                         std::span<const std::size_t> test_rows = {});

// ---------------------------------------------------------------------------
// Serialization (versioned JSON)

nlohmann::json to_json(const FeatureEncodingSpec& spec);
FeatureEncodingSpec encoding_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HazardModel& m);
HazardModel model_from_json(const nlohmann::json& j);

}  // namespace driftsurv::hazard
