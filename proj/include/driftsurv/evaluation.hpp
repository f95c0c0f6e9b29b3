#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftsurv/landmarking.hpp"

namespace driftsurv::eval {

// ---------------------------------------------------------------------------
// Grouped folds

struct FoldAssignment {
  int k = 5;
  std::map<std::string, int> loan_to_fold;
  std::uint64_t seed = 42;

  /// Throws DataError for a loan that was not assigned.
  int fold_of(const std::string& loan_id) const;
  std::vector<std::size_t> test_rows(const landmark::LandmarkDataset& ds, int fold) const;
  std::vector<std::size_t> train_rows(const landmark::LandmarkDataset& ds, int fold) const;
};

/// Deterministic shuffle of the distinct ids by seed, then round-robin
/// assignment, so fold sizes differ by at most one loan.
FoldAssignment grouped_kfold(std::span<const std::string> loan_ids, int k, std::uint64_t seed);

/// Splits `rows` by loan: about `fraction` of the distinct loans (at least one,
/// and at least one left over) go to the second set.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> grouped_holdout(
    const landmark::LandmarkDataset& ds, std::span<const std::size_t> rows, double fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metrics

/// Mann-Whitney AUC by rank sums, ties counting one half. nullopt (with a
/// warning) when only one class is present.
std::optional<double> auc(std::span<const double> labels, std::span<const double> scores);

double brier(std::span<const double> labels, std::span<const double> probs);

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};
Confusion confusion(std::span<const double> labels, std::span<const double> probs, double threshold);

/// Predicted positive iff p >= threshold. 0 when nothing is predicted
/// positive or there are no positives.
double f1(std::span<const double> labels, std::span<const double> probs, double threshold);
double f1(const Confusion& c);

/// Sample mean and SD (n - 1 denominator; 0 for a single value).
struct MeanSd {
  double mean = 0;
  double sd = 0;
  std::size_t n = 0;
};
MeanSd mean_sd(std::span<const double> values);

}  // namespace driftsurv::eval
