#pragma once

// Brute-force reference implementations used to check the metric kernels.

#include "gsh/graph_store.hpp"
#include "gsh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace gsh::oracle {

struct ClassStats {
  double accuracy = 0;
  std::vector<std::optional<double>> recall;
  double balanced_accuracy = 0;
  double macro_f1 = 0;
};

// Loops over units per class; never builds a confusion matrix.
inline ClassStats class_stats(const std::vector<ClassId>& pred, const std::vector<ClassId>& actual, ClassId classes) {
  ClassStats s;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == actual[i];
  s.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  double recall_sum = 0, f1_sum = 0;
  int supported = 0;
  for (ClassId c = 0; c < classes; ++c) {
    std::size_t tp = 0, support = 0, predicted = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      support += actual[i] == c;
      predicted += pred[i] == c;
      tp += actual[i] == c && pred[i] == c;
    }
    if (support == 0) {
      s.recall.push_back(std::nullopt);
      continue;
    }
    const double r = static_cast<double>(tp) / static_cast<double>(support);
    const double p = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    s.recall.push_back(r);
    recall_sum += r;
    f1_sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    ++supported;
  }
  s.balanced_accuracy = recall_sum / supported;
  s.macro_f1 = f1_sum / supported;
  return s;
}

// O(n^2) Mann-Whitney: every (positive, negative) pair scores 1, 0.5 or 0.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1;
      if (scores[i] > scores[j]) wins += 1;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Sorts all kept candidates by descending score and reads off the position
// range of the answer's tie group.
inline double sorted_rank(const std::vector<double>& scores, std::size_t answer, TieRule rule,
                          const std::vector<std::uint8_t>& filtered = {}) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (i == answer || filtered.empty() || !filtered[i]) kept.push_back(i);
  std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t first = kept.size(), last = 0;
  for (std::size_t pos = 0; pos < kept.size(); ++pos) {
    if (scores[kept[pos]] == scores[answer]) {
      first = std::min(first, pos + 1);
      last = std::max(last, pos + 1);
    }
  }
  switch (rule) {
    case TieRule::optimistic: return static_cast<double>(first);
    case TieRule::pessimistic: return static_cast<double>(last);
    case TieRule::average: break;
  }
  return (static_cast<double>(first) + static_cast<double>(last)) / 2.0;
}

inline double two_pass_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace gsh::oracle
