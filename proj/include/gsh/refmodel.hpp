#pragma once

#include "gsh/graph_store.hpp"
#include "gsh/metrics.hpp"

#include <span>
#include <vector>

namespace gsh {

// Label-propagation scorer: a node's class distribution is proportional to
// alpha + (number of train-labelled nodes of that class within `hops`
// undirected hops, the node itself excluded). No learned parameters and no
// feature input, so it serves as a deterministic stand-in model.
struct PropagationConfig {
  unsigned hops = 2;
  double alpha = 1.0;
};

/// Per-node train label, or num_classes for nodes that do not supervise.
std::vector<ClassId> train_label_view(std::span<const ClassId> labels, ClassId num_classes,
                                      std::span<const NodeId> train_nodes);

/// Probability rows for every node. Throws NoTrainLabels.
PredictionTable propagate_predict(const Graph& graph, std::span<const ClassId> train_labels, ClassId num_classes,
                                  const PropagationConfig& config = {}, unsigned workers = 1);

/// One node's row, ignoring the canonical edges in `removed` (sorted).
Eigen::RowVectorXd propagate_node(const Graph& graph, std::span<const ClassId> train_labels, ClassId num_classes,
                                  NodeId node, const PropagationConfig& config = {},
                                  std::span<const Edge> removed = {});

/// Node saliency used with this scorer: 1 for train-labelled nodes, else 0.
std::vector<std::pair<std::uint64_t, double>> refmodel_saliency(std::span<const ClassId> train_labels,
                                                                ClassId num_classes);

}  // namespace gsh
