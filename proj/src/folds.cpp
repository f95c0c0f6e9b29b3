#include <algorithm>
#include <set>

#include "driftsurv/error.hpp"
#include "driftsurv/evaluation.hpp"
#include "driftsurv/rng.hpp"

namespace driftsurv::eval {

namespace {

// Fisher-Yates with our own index draws; std::shuffle is not portable across
// standard libraries.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

}  // namespace

int FoldAssignment::fold_of(const std::string& loan_id) const {
  const auto it = loan_to_fold.find(loan_id);
  if (it == loan_to_fold.end()) throw DataError("loan '" + loan_id + "' has no fold");
  return it->second;
}

std::vector<std::size_t> FoldAssignment::test_rows(const landmark::LandmarkDataset& ds, int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    if (fold_of(ds.samples[i].loan_id) == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::train_rows(const landmark::LandmarkDataset& ds, int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    if (fold_of(ds.samples[i].loan_id) != fold) out.push_back(i);
  return out;
}

FoldAssignment grouped_kfold(std::span<const std::string> loan_ids, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("grouped_kfold: k must be at least 2, got " + std::to_string(k));
  std::set<std::string> distinct(loan_ids.begin(), loan_ids.end());
  if (distinct.size() < static_cast<std::size_t>(k))
    throw ConfigError("grouped_kfold: " + std::to_string(distinct.size()) + " loans cannot fill " +
                      std::to_string(k) + " folds");
  std::vector<std::string> ids(distinct.begin(), distinct.end());
  Rng rng(derive_seed(seed, 0xf01d));
  shuffle(ids, rng);
  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  for (std::size_t i = 0; i < ids.size(); ++i) fa.loan_to_fold.emplace(ids[i], static_cast<int>(i % k));
  return fa;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> grouped_holdout(
    const landmark::LandmarkDataset& ds, std::span<const std::size_t> rows, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("grouped_holdout: fraction must be in (0,1)");
  std::set<std::string> distinct;
  for (auto r : rows) distinct.insert(ds.samples.at(r).loan_id);
  if (distinct.size() < 2) throw DataError("grouped_holdout: need at least two loans");
  std::vector<std::string> ids(distinct.begin(), distinct.end());
  Rng rng(derive_seed(seed, 0xca1b));
  shuffle(ids, rng);
  auto n_hold = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ids.size())));
  n_hold = std::clamp<std::size_t>(n_hold, 1, ids.size() - 1);
  const std::set<std::string> held(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_hold));
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (auto r : rows) (held.count(ds.samples[r].loan_id) ? out.second : out.first).push_back(r);
  return out;
}

}  // namespace driftsurv::eval
