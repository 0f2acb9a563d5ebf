#pragma once

#include "gsh/determinism.hpp"
#include "gsh/graph_store.hpp"
#include "gsh/report.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gsh {

inline constexpr std::array<double, 4> kSparsityLevels{5.0, 10.0, 20.0, 50.0};
inline constexpr unsigned kReceptiveHops = 2;
inline constexpr double kAtomAblationPercent = 20.0;
inline constexpr double kCharEpsilon = 1e-8;

// ---------------------------------------------------------------------------
// Receptive fields

struct Subgraph {
  std::vector<NodeId> nodes;  // ascending, includes the center
  std::vector<Edge> edges;    // canonical (u < v), ascending; self-loops excluded
};

/// Nodes within `hops` undirected hops of `center` and the edges induced
/// among them.
Subgraph khop_subgraph(const Graph& graph, NodeId center, unsigned hops = kReceptiveHops);

// ---------------------------------------------------------------------------
// Saliency

enum class SaliencyKind { node_grad_norm, edge_score, atom_score };

std::string_view to_string(SaliencyKind kind);

// Externally computed attribution scores. Node scores are keyed by node id;
// edge scores by (u << 32 | v) with u < v; atom scores by
// (graph_id << 32 | atom).
class SaliencyTable {
 public:
  SaliencyTable() = default;
  SaliencyTable(SaliencyKind kind, std::vector<std::pair<std::uint64_t, double>> scores);

  static constexpr std::uint64_t pack(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }

  SaliencyKind kind() const { return kind_; }
  std::size_t size() const { return scores_.size(); }
  std::optional<double> find(std::uint64_t unit) const;

 private:
  SaliencyKind kind_ = SaliencyKind::node_grad_norm;
  std::vector<std::pair<std::uint64_t, double>> scores_;  // sorted by unit
};

/// Header "kind<TAB>node_grad_norm|edge_score|atom_score", then
/// "node<TAB>score" or "a<TAB>b<TAB>score" rows.
SaliencyTable read_saliency(const std::filesystem::path& path);
void write_saliency(const std::filesystem::path& path, const SaliencyTable& table,
                    std::span<const std::pair<std::uint64_t, double>> rows);

/// S(u, v) = s(u) + s(v). Throws MissingNodeScore.
std::vector<double> edge_saliency_from_node_grads(const SaliencyTable& node_scores, std::span<const Edge> edges);

/// Edge scores for `edges` from a node or edge table.
std::vector<double> edge_scores_for(const SaliencyTable& table, std::span<const Edge> edges);

// ---------------------------------------------------------------------------
// Ranking and masking

enum class Ranking { saliency, random };

std::string_view to_string(Ranking ranking);

/// max(1, ceil(k m / 100)), capped at m.
std::size_t mask_count(double k_percent, std::size_t m);

/// Element order used for masking: saliency sorts by (score desc, index asc);
/// random is keyed_permutation(key, m). Prefixes of one order nest across k.
std::vector<std::uint32_t> ranked_order(std::span<const double> scores, Ranking ranking, StreamKey key);

struct MaskSplit {
  std::vector<std::uint32_t> masked;      // ascending element indices
  std::vector<std::uint32_t> complement;  // ascending element indices
};

/// Top mask_count(k, m) elements of ranked_order vs the rest.
/// Throws EmptySubgraph when there are no elements.
MaskSplit rank_and_mask(std::span<const double> scores, double k_percent, StreamKey key, Ranking ranking);

// ---------------------------------------------------------------------------
// Fidelity

struct FidelityRecord {
  double p0 = 0;
  double p_plus = 0;
  double p_minus = 0;
  double fid_plus = 0;   // p0 - p_plus, unclamped
  double fid_minus = 0;  // p0 - p_minus, unclamped
  double characterization = 0;
};

/// char = 2 a b / (a + b + eps) with a = clamp(Fid+) and b = clamp(1 - Fid-)
/// on [0, 1]. Throws BadProbability for inputs outside [0, 1].
FidelityRecord fidelity(double p0, double p_plus, double p_minus, double epsilon = kCharEpsilon);

/// mean_sal - mean_rand with std sqrt(std_sal^2 + std_rand^2). Undefined
/// when either side has no value. Throws SeedCountMismatch.
MetricCell char_lift(const MetricCell& saliency, const MetricCell& random);

/// Adds a "lift:<rest>" cell for every pair of "saliency:<rest>" and
/// "random:<rest>" subconditions on the interpretation axis.
void add_lift_cells(Report& report, const std::string& axis = "interpretation");

// ---------------------------------------------------------------------------
// Ablation manifests

enum class AblationUnit { edge, atom };

struct AblationCondition {
  Ranking ranking = Ranking::saliency;
  double k_percent = 10.0;
  std::vector<std::uint32_t> masked;          // top-k element indices
  std::vector<std::uint32_t> complement;      // remaining element indices
  std::vector<std::uint32_t> removed_bonds;   // atom unit: bonds touching `masked`
  std::vector<std::uint32_t> complement_bonds;  // atom unit: bonds touching `complement`
};

// For one target: the elements that can be masked (subgraph edges, or atoms
// of one molecule) and every (ranking, k) condition.
struct AblationEntry {
  std::uint64_t target = 0;
  AblationUnit unit = AblationUnit::edge;
  std::vector<NodeId> nodes;   // edge unit: subgraph nodes; atom unit: 0..atoms-1
  std::vector<Edge> edges;     // edge unit: maskable edges; atom unit: bonds
  std::vector<AblationCondition> conditions;

  std::size_t num_elements() const { return unit == AblationUnit::edge ? edges.size() : nodes.size(); }
};

/// Condition names in probability files: "clean", or
/// "<ranking>:<k>:plus" (top-k masked) / "<ranking>:<k>:minus" (complement masked).
std::string condition_name(Ranking ranking, double k_percent, bool plus);

/// Entry for one node-level target; nullopt (logged) when its receptive field
/// has no edges. The random ranking uses sub_key(key, target).
std::optional<AblationEntry> node_ablation_entry(const Graph& graph, NodeId target, const SaliencyTable& saliency,
                                                 std::span<const double> k_percents, StreamKey key,
                                                 unsigned hops = kReceptiveHops);

/// Entries for all targets, computed in parallel, in target order.
std::vector<AblationEntry> node_ablation_manifests(const Graph& graph, std::span<const NodeId> targets,
                                                   const SaliencyTable& saliency, std::span<const double> k_percents,
                                                   StreamKey key, unsigned workers = 1);

// Masked-graph spec for one atom-removal condition.
struct AtomAblation {
  std::vector<std::uint32_t> removed_atoms;    // ascending
  std::vector<std::uint32_t> kept_atoms;       // ascending
  std::vector<Edge> removed_bonds;             // every bond touching a removed atom
  Graph masked_graph;                          // same atom ids, removed atoms isolated
  std::vector<std::uint8_t> pool_mask;         // 0 for removed atoms
};

/// Removes the top-k atoms under `ranking` with their incident bonds.
/// Throws EmptyMolecule.
AtomAblation atom_ablation_manifest(const Graph& molecule, std::span<const double> atom_scores,
                                    double k_percent, StreamKey key, Ranking ranking);

/// Entry for one molecule with both rankings at each k.
AblationEntry atom_ablation_entry(std::uint64_t graph_id, const Graph& molecule, std::span<const double> atom_scores,
                                  std::span<const double> k_percents, StreamKey key);

/// Graph-level targets: test molecules that are positive and predicted
/// correctly; all positive test molecules when fewer than `min_targets`.
std::vector<std::uint32_t> graph_level_targets(std::span<const std::uint32_t> test_graphs,
                                               std::span<const std::uint8_t> labels,
                                               std::span<const std::uint8_t> clean_predictions,
                                               std::size_t min_targets = 10);

std::string format_manifest(const AblationEntry& entry);
AblationEntry parse_manifest(std::string_view text);

/// Writes target_<id>.txt per entry into `dir`.
void write_manifests(const std::filesystem::path& dir, std::span<const AblationEntry> entries);
std::vector<AblationEntry> read_manifests(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Scoring

struct ConditionProbabilities {
  std::uint64_t target = 0;
  std::string condition;
  double prob = 0;
};

/// "target_id<TAB>condition<TAB>prob".
std::vector<ConditionProbabilities> read_condition_probs(const std::filesystem::path& path);

struct FidelityRow {
  std::uint64_t target = 0;
  Ranking ranking = Ranking::saliency;
  double k_percent = 0;
  FidelityRecord record;
};

struct FidelitySummary {
  std::vector<FidelityRow> rows;
  // Per (ranking, k): mean Fid+, Fid-, char over targets, keyed by
  // "<ranking>:<k>".
  std::map<std::string, std::array<double, 3>> means;
};

/// Joins manifests with per-condition probabilities. Throws MissingInput when
/// a required (target, condition) probability is absent.
FidelitySummary score_fidelity(std::span<const AblationEntry> entries,
                               std::span<const ConditionProbabilities> probs);

}  // namespace gsh
