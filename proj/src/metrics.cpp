#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "driftsurv/error.hpp"
#include "driftsurv/evaluation.hpp"
#include "driftsurv/kernels.hpp"

namespace driftsurv::eval {

namespace {
void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DataError(std::string(what) + ": labels and scores differ in length");
}
}  // namespace

std::optional<double> auc(std::span<const double> labels, std::span<const double> scores) {
  check_sizes(labels.size(), scores.size(), "auc");
  const std::size_t n = labels.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  // Twice the mid-rank keeps tie ranks integral.
  double pos_rank2 = 0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double rank2 = static_cast<double>(i + j + 1);  // 2 * mean of ranks i+1..j
    for (std::size_t q = i; q < j; ++q)
      if (labels[idx[q]] == 1.0) {
        pos_rank2 += rank2;
        ++n_pos;
      }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    spdlog::warn("auc: only one class present in {} samples; metric undefined", n);
    return std::nullopt;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  const double u = 0.5 * pos_rank2 - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

double brier(std::span<const double> labels, std::span<const double> probs) {
  check_sizes(labels.size(), probs.size(), "brier");
  if (labels.empty()) throw DataError("brier: empty input");
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("brier: probability outside [0,1]");
  return simd::sum_sq_diff(probs, labels) / static_cast<double>(labels.size());
}

Confusion confusion(std::span<const double> labels, std::span<const double> probs, double threshold) {
  check_sizes(labels.size(), probs.size(), "f1");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = probs[i] >= threshold, pos = labels[i] == 1.0;
    if (pred && pos) ++c.tp;
    else if (pred) ++c.fp;
    else if (pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1(const Confusion& c) {
  if (c.tp + c.fp == 0 || c.tp + c.fn == 0) return 0.0;
  return 2.0 * c.tp / (2.0 * c.tp + c.fp + c.fn);
}

double f1(std::span<const double> labels, std::span<const double> probs, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("f1: threshold must be in (0,1)");
  return f1(confusion(labels, probs, threshold));
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd r;
  r.n = values.size();
  if (r.n == 0) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(r.n - 1));
  }
  return r;
}

}  // namespace driftsurv::eval
