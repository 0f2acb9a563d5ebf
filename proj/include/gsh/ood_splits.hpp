#pragma once

#include "gsh/determinism.hpp"
#include "gsh/graph_store.hpp"
#include "gsh/metrics.hpp"

#include <optional>
#include <span>
#include <string>

namespace gsh {

/// Labelled nodes sorted by (degree desc, node id asc): the first
/// floor(0.6n) train, next floor(0.2n) ood_val, rest ood_test. Unlabelled
/// nodes are excluded. Uses no randomness.
SplitAssignment degree_shift_split(const Graph& graph, std::span<const NodeId> labeled);

inline constexpr std::int32_t kTemporalTrainMax = 2010;
inline constexpr std::int32_t kTemporalOodMin = 2017;

/// year <= train_max -> train, year >= ood_min -> ood_test, otherwise ood_val.
/// Units outside `labeled` are excluded.
SplitAssignment temporal_split(std::span<const std::int32_t> years, std::span<const NodeId> labeled,
                               std::int32_t train_max = kTemporalTrainMax,
                               std::int32_t ood_min = kTemporalOodMin);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct ScaffoldSplit {
  SplitAssignment split;  // train / val / test per graph
  std::vector<std::string> warnings;
};

/// Scaffold groups in keyed order fill train until it holds >= 80% of the
/// molecules, then val until train+val >= 90%, then test. A group never
/// straddles two partitions.
ScaffoldSplit scaffold_split(std::span<const std::int64_t> scaffold_ids, SplitRatios ratios, StreamKey key);

enum class CorruptSide : std::uint8_t { head, tail };

struct KgQuery {
  Triple triple;
  CorruptSide side = CorruptSide::tail;  // the held-out (test-pool) endpoint
  std::uint32_t answer() const { return side == CorruptSide::head ? triple.head : triple.tail; }
};

// Candidate set of every query is the full entity vocabulary.
struct KgInductiveSplit {
  std::vector<Triple> train_triples;
  std::vector<KgQuery> test_queries;
  std::vector<std::uint32_t> train_entities;  // ascending
  std::vector<std::uint32_t> test_entities;   // ascending
  std::size_t discarded = 0;                  // triples with both endpoints held out
};

/// Entities in keyed order, first floor(f * E) form the train pool.
KgInductiveSplit inductive_entity_split(const TripleStore& store, double train_fraction, StreamKey key);

/// Rank of each query's answer among all entities, using the scores in
/// `ranking` keyed by query index. Entities without a score rank below every
/// scored one. With `filtered`, other candidates forming a known triple are
/// dropped before ranking. Throws MissingPrediction for an unscored query.
std::vector<double> kg_query_ranks(const KgInductiveSplit& split, const TripleStore& store,
                                   const RankingTable& ranking, bool filtered, TieRule rule = TieRule::average);

/// "query_id<TAB>head<TAB>relation<TAB>tail<TAB>head|tail".
void write_kg_queries(const std::filesystem::path& path, const KgInductiveSplit& split);
std::vector<KgQuery> read_kg_queries(const std::filesystem::path& path);

/// AUC_random - AUC_scaffold. Both on [0,1] or both on [0,100].
double scaffold_gap(double auc_random, double auc_scaffold);

}  // namespace gsh
