#include "gsh/fairness.hpp"
#include "gsh/error.hpp"
#include "gsh/log.hpp"

#include <algorithm>
#include <cmath>

namespace gsh {

HeadTailGroups head_tail_groups(std::span<const NodeId> test_nodes, std::span<const std::uint32_t> degrees,
                                double q) {
  if (!(q > 0.0 && q <= 0.5)) throw Error(ErrorCode::BadQuantile, "q must lie in (0, 0.5]");
  std::vector<NodeId> order(test_nodes.begin(), test_nodes.end());
  for (NodeId v : order)
    if (v >= degrees.size()) throw Error(ErrorCode::BadId, "test node " + std::to_string(v));
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return degrees[a] != degrees[b] ? degrees[a] < degrees[b] : a < b;
  });
  order.erase(std::unique(order.begin(), order.end()), order.end());
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(order.size()) + 1e-9));
  HeadTailGroups g;
  g.tail.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  g.head.assign(order.end() - static_cast<std::ptrdiff_t>(k), order.end());
  std::sort(g.tail.begin(), g.tail.end());
  std::sort(g.head.begin(), g.head.end());
  if (k == 0) log::warn("EmptyGroup: head/tail groups are empty for " + std::to_string(order.size()) + " test nodes");
  return g;
}

double head_tail_gap(const PredictionTable& preds, std::span<const ClassId> labels, ClassId num_classes,
                     const HeadTailGroups& groups) {
  if (groups.empty()) throw Error(ErrorCode::EmptyGroup, "head or tail group is empty");
  const double head = accuracy(preds, labels, num_classes, groups.head);
  const double tail = accuracy(preds, labels, num_classes, groups.tail);
  return head_tail_gap(100.0 * head, 100.0 * tail);
}

DemographicGaps demographic_gaps(std::span<const std::uint8_t> binary_preds, std::span<const double> scores,
                                 std::span<const std::uint8_t> labels, std::span<const std::uint8_t> sensitive) {
  const std::size_t n = binary_preds.size();
  if (scores.size() != n || labels.size() != n || sensitive.size() != n)
    throw Error(ErrorCode::LengthMismatch, "demographic inputs differ in length");

  struct Group {
    std::size_t size = 0, predicted_pos = 0, actual_pos = 0, true_pos = 0;
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
  } g[2];
  for (std::size_t i = 0; i < n; ++i) {
    if (sensitive[i] > 1) throw Error(ErrorCode::BadArgument, "sensitive attribute must be 0 or 1");
    Group& grp = g[sensitive[i]];
    ++grp.size;
    grp.predicted_pos += binary_preds[i] ? 1 : 0;
    grp.actual_pos += labels[i] ? 1 : 0;
    grp.true_pos += (labels[i] && binary_preds[i]) ? 1 : 0;
    grp.scores.push_back(scores[i]);
    grp.labels.push_back(labels[i] ? 1 : 0);
  }
  if (g[0].size == 0 || g[1].size == 0) throw Error(ErrorCode::DegenerateGroup, "a sensitive group is empty");

  DemographicGaps out;
  auto rate = [](std::size_t a, std::size_t b) { return static_cast<double>(a) / static_cast<double>(b); };
  out.statistical_parity = std::abs(rate(g[0].predicted_pos, g[0].size) - rate(g[1].predicted_pos, g[1].size));
  if (g[0].actual_pos > 0 && g[1].actual_pos > 0)
    out.equal_opportunity = std::abs(rate(g[0].true_pos, g[0].actual_pos) - rate(g[1].true_pos, g[1].actual_pos));
  const bool both_labels = g[0].actual_pos > 0 && g[0].actual_pos < g[0].size && g[1].actual_pos > 0 &&
                           g[1].actual_pos < g[1].size;
  if (both_labels) out.utility = std::abs(roc_auc(g[0].scores, g[0].labels) - roc_auc(g[1].scores, g[1].labels));
  return out;
}

std::vector<std::uint8_t> binary_predictions(const PredictionTable& preds, std::span<const std::uint32_t> units,
                                             double threshold) {
  std::vector<std::uint8_t> out;
  out.reserve(units.size());
  for (std::uint32_t u : units) {
    if (preds.is_scores())
      out.push_back(preds.row(u)[0] >= threshold ? 1 : 0);
    else
      out.push_back(preds.predicted_class(u) == 1 ? 1 : 0);
  }
  return out;
}

}  // namespace gsh
