#pragma once

#include "gsh/graph_store.hpp"
#include "gsh/metrics.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gsh {

inline constexpr double kHeadTailQuantile = 0.2;

struct HeadTailGroups {
  std::vector<NodeId> head;  // highest (degree, id), listed by id
  std::vector<NodeId> tail;  // lowest (degree, id), listed by id
  bool empty() const { return head.empty() || tail.empty(); }
};

/// Test nodes sorted by (degree, node id); the top floor(q n) form the head,
/// the bottom floor(q n) the tail, the middle is unassigned. Throws
/// BadQuantile unless 0 < q <= 0.5. Logs a warning if the groups are empty.
HeadTailGroups head_tail_groups(std::span<const NodeId> test_nodes, std::span<const std::uint32_t> degrees,
                                double q = kHeadTailQuantile);

/// acc_head - acc_tail in percentage points. Throws EmptyGroup.
double head_tail_gap(const PredictionTable& preds, std::span<const ClassId> labels, ClassId num_classes,
                     const HeadTailGroups& groups);
inline double head_tail_gap(double acc_head, double acc_tail) { return acc_head - acc_tail; }

// nullopt marks a gap whose conditioning group is degenerate; it must never
// be read as zero disparity.
struct DemographicGaps {
  std::optional<double> statistical_parity;
  std::optional<double> equal_opportunity;
  std::optional<double> utility;
};

/// |P(yhat=1|s=0) - P(yhat=1|s=1)|, |TPR_0 - TPR_1|, |AUC_0 - AUC_1|.
/// Throws DegenerateGroup when a sensitive group is empty.
DemographicGaps demographic_gaps(std::span<const std::uint8_t> binary_preds, std::span<const double> scores,
                                 std::span<const std::uint8_t> labels, std::span<const std::uint8_t> sensitive);

/// Hard {0,1} decisions: argmax == 1 for probability tables, score >=
/// threshold for single-score tables.
std::vector<std::uint8_t> binary_predictions(const PredictionTable& preds, std::span<const std::uint32_t> units,
                                             double threshold = 0.5);

}  // namespace gsh
