#include "gsh/refmodel.hpp"
#include "gsh/error.hpp"
#include "gsh/parallel.hpp"

#include <algorithm>

namespace gsh {
namespace {

// BFS scratch reused across nodes; stamp[v] == epoch marks v as visited.
class Propagator {
 public:
  Propagator(const Graph& graph, std::span<const ClassId> train_labels, ClassId num_classes,
             const PropagationConfig& config)
      : graph_(graph), labels_(train_labels), classes_(num_classes), config_(config), stamp_(graph.num_nodes(), 0) {}

  void row(NodeId node, std::span<const Edge> removed, double* out) {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    std::vector<double> counts(classes_, 0.0);
    stamp_[node] = epoch_;
    frontier_.assign(1, node);
    for (unsigned h = 0; h < config_.hops && !frontier_.empty(); ++h) {
      next_.clear();
      for (NodeId u : frontier_) {
        for (NodeId v : graph_.neighbors(u)) {
          if (stamp_[v] == epoch_) continue;
          if (!removed.empty() && std::binary_search(removed.begin(), removed.end(), Edge{std::min(u, v), std::max(u, v)}))
            continue;
          stamp_[v] = epoch_;
          next_.push_back(v);
          if (labels_[v] < classes_) counts[labels_[v]] += 1.0;
        }
      }
      std::swap(frontier_, next_);
    }
    double total = 0;
    for (ClassId c = 0; c < classes_; ++c) total += config_.alpha + counts[c];
    for (ClassId c = 0; c < classes_; ++c) out[c] = (config_.alpha + counts[c]) / total;
  }

 private:
  const Graph& graph_;
  std::span<const ClassId> labels_;
  ClassId classes_;
  PropagationConfig config_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> frontier_;
  std::vector<NodeId> next_;
};

void check(const Graph& graph, std::span<const ClassId> train_labels, ClassId num_classes,
           const PropagationConfig& config) {
  if (config.hops < 1 || !(config.alpha > 0)) throw Error(ErrorCode::BadArgument, "need hops >= 1 and alpha > 0");
  if (train_labels.size() != graph.num_nodes()) throw Error(ErrorCode::LengthMismatch, "one train label per node");
  if (num_classes < 1) throw Error(ErrorCode::BadArgument, "num_classes must be >= 1");
  if (std::none_of(train_labels.begin(), train_labels.end(), [&](ClassId c) { return c < num_classes; }))
    throw Error(ErrorCode::NoTrainLabels, "no train-labelled nodes");
}

}  // namespace

std::vector<ClassId> train_label_view(std::span<const ClassId> labels, ClassId num_classes,
                                      std::span<const NodeId> train_nodes) {
  std::vector<ClassId> out(labels.size(), num_classes);
  for (NodeId v : train_nodes)
    if (v < labels.size()) out[v] = labels[v];
  return out;
}

PredictionTable propagate_predict(const Graph& graph, std::span<const ClassId> train_labels, ClassId num_classes,
                                  const PropagationConfig& config, unsigned workers) {
  check(graph, train_labels, num_classes, config);
  const Graph& g = graph.undirected() ? graph : symmetrized(graph);
  PredictionTable::Matrix probs(graph.num_nodes(), num_classes);
  parallel_for(graph.num_nodes(), workers, [&](std::size_t begin, std::size_t end) {
    Propagator p(g, train_labels, num_classes, config);
    for (std::size_t v = begin; v < end; ++v) p.row(static_cast<NodeId>(v), {}, probs.row(static_cast<Eigen::Index>(v)).data());
  });
  return PredictionTable(std::move(probs));
}

Eigen::RowVectorXd propagate_node(const Graph& graph, std::span<const ClassId> train_labels, ClassId num_classes,
                                  NodeId node, const PropagationConfig& config, std::span<const Edge> removed) {
  check(graph, train_labels, num_classes, config);
  if (node >= graph.num_nodes()) throw Error(ErrorCode::BadId, "node " + std::to_string(node));
  if (!graph.undirected()) return propagate_node(symmetrized(graph), train_labels, num_classes, node, config, removed);
  Eigen::RowVectorXd row(num_classes);
  Propagator(graph, train_labels, num_classes, config).row(node, removed, row.data());
  return row;
}

std::vector<std::pair<std::uint64_t, double>> refmodel_saliency(std::span<const ClassId> train_labels,
                                                                ClassId num_classes) {
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(train_labels.size());
  for (std::size_t v = 0; v < train_labels.size(); ++v) out.emplace_back(v, train_labels[v] < num_classes ? 1.0 : 0.0);
  return out;
}

}  // namespace gsh
