#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gsh {

using NodeId = std::uint32_t;
using ClassId = std::uint32_t;
using ArcOffset = std::uint64_t;

/// Node features, one row per node.
using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::int32_t kNoYear = std::numeric_limits<std::int32_t>::min();
inline constexpr std::int8_t kNoSensitive = -1;

struct Arc {
  NodeId src = 0;
  NodeId dst = 0;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Undirected edge in canonical form, u <= v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Compressed sparse row topology plus optional per-node attributes.
//
// Topology invariants (checked by every factory): offsets nondecreasing with
// offsets[0] == 0 and offsets[n] == |neighbors|; neighbor ids < n; each
// neighbor list strictly ascending; undirected graphs hold the reverse of
// every non-self-loop arc.
//
// Attributes are plain members. When present, labels/years/sensitive have
// one entry per node; an unlabeled node carries the label num_classes.
class Graph {
 public:
  Graph() = default;

  /// Sorts and deduplicates `arcs`, then validates.
  static Graph from_arcs(NodeId num_nodes, std::vector<Arc> arcs, bool undirected);
  static Graph from_csr(NodeId num_nodes, std::vector<ArcOffset> offsets,
                        std::vector<NodeId> neighbors, bool undirected);
  /// Undirected graph with both arcs of every edge plus one arc per self-loop.
  static Graph from_edges(NodeId num_nodes, std::span<const Edge> edges,
                          std::span<const NodeId> self_loops = {});

  NodeId num_nodes() const { return num_nodes_; }
  std::size_t num_arcs() const { return neighbors_.size(); }
  bool undirected() const { return undirected_; }

  std::span<const ArcOffset> offsets() const { return offsets_; }
  std::span<const NodeId> neighbor_array() const { return neighbors_; }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(NodeId v) const {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }
  bool has_arc(NodeId u, NodeId v) const;

  /// Copy of this graph's attributes on top of a different topology.
  Graph with_topology(const Graph& topology) const;

  bool has_features() const { return features.has_value(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_years() const { return !years.empty(); }
  bool has_sensitive() const { return !sensitive.empty(); }
  bool is_labeled(NodeId v) const { return has_labels() && labels[v] < num_classes; }

  std::optional<FeatureMatrix> features;
  std::vector<ClassId> labels;
  ClassId num_classes = 0;
  std::vector<std::int32_t> years;
  std::vector<std::int8_t> sensitive;

 private:
  void validate() const;

  NodeId num_nodes_ = 0;
  bool undirected_ = true;
  std::vector<ArcOffset> offsets_{0};
  std::vector<NodeId> neighbors_;
};

/// degree[i] = offsets[i+1] - offsets[i]; a self-loop counts once.
std::vector<std::uint32_t> compute_degrees(const Graph& graph);

struct CanonicalEdges {
  std::vector<Edge> edges;           // u < v, ascending
  std::vector<NodeId> self_loops;    // ascending
};

/// Each undirected edge once as (min, max). Throws DirectedGraph.
CanonicalEdges canonical_undirected_edges(const Graph& graph);

/// Undirected view of a directed graph (identity copy for undirected input).
Graph symmetrized(const Graph& graph);

struct Triple {
  std::uint32_t head = 0;
  std::uint32_t relation = 0;
  std::uint32_t tail = 0;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleStore {
  std::uint32_t num_entities = 0;
  std::uint32_t num_relations = 0;
  std::vector<Triple> triples;  // sorted, unique

  /// Sorts, deduplicates and range-checks.
  static TripleStore make(std::uint32_t num_entities, std::uint32_t num_relations,
                          std::vector<Triple> triples);
  bool contains(const Triple& t) const;
};

struct GraphCollection {
  std::vector<Graph> graphs;
  /// One row per graph, one column per task; NaN marks a missing label.
  Eigen::MatrixXf graph_labels;
  /// Empty, or one group id per graph.
  std::vector<std::int64_t> scaffold_ids;

  void validate() const;
};

enum class Role : std::uint8_t { train, val, test, ood_val, ood_test, excluded };

std::string_view to_string(Role role);
Role parse_role(std::string_view text);

// One role per unit (node, graph, or entity); the role vector is the
// partition.
struct SplitAssignment {
  std::vector<Role> roles;

  SplitAssignment() = default;
  explicit SplitAssignment(std::size_t num_units, Role fill = Role::excluded)
      : roles(num_units, fill) {}

  std::size_t size() const { return roles.size(); }
  std::vector<std::uint32_t> units_with(Role role) const;
  std::size_t count(Role role) const;
  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

enum class DatasetKind { node_graph, triples, graph_collection };

std::string_view to_string(DatasetKind kind);

struct Dataset {
  std::string name;
  DatasetKind kind = DatasetKind::node_graph;
  Graph graph;
  TripleStore triples;
  GraphCollection collection;
  SplitAssignment split;
};

/// Reads a JSON manifest and the files it references (paths relative to the
/// manifest's directory). Validates all graph invariants.
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes `dataset` as manifest.json plus data files into `dir`.
/// Returns the manifest path.
std::filesystem::path save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace gsh
