#include "gsh/ood_splits.hpp"
#include "gsh/error.hpp"
#include "gsh/io.hpp"
#include "gsh/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gsh {

SplitAssignment degree_shift_split(const Graph& graph, std::span<const NodeId> labeled) {
  if (labeled.empty()) throw Error(ErrorCode::EmptyLabeledSet, "degree split needs labelled nodes");
  std::vector<NodeId> order(labeled.begin(), labeled.end());
  for (NodeId v : order)
    if (v >= graph.num_nodes()) throw Error(ErrorCode::BadId, "labelled node " + std::to_string(v));
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const auto da = graph.degree(a);
    const auto db = graph.degree(b);
    return da != db ? da > db : a < b;
  });
  order.erase(std::unique(order.begin(), order.end()), order.end());

  const std::size_t n = order.size();
  const std::size_t n_train = n * 3 / 5;
  const std::size_t n_val = n / 5;
  SplitAssignment split(graph.num_nodes());
  for (std::size_t i = 0; i < n; ++i)
    split.roles[order[i]] = i < n_train ? Role::train : (i < n_train + n_val ? Role::ood_val : Role::ood_test);
  return split;
}

SplitAssignment temporal_split(std::span<const std::int32_t> years, std::span<const NodeId> labeled,
                               std::int32_t train_max, std::int32_t ood_min) {
  SplitAssignment split(years.size());
  for (NodeId v : labeled) {
    if (v >= years.size() || years[v] == kNoYear)
      throw Error(ErrorCode::MissingYear, "labelled node " + std::to_string(v) + " has no year");
    const auto y = years[v];
    split.roles[v] = y <= train_max ? Role::train : (y >= ood_min ? Role::ood_test : Role::ood_val);
  }
  return split;
}

ScaffoldSplit scaffold_split(std::span<const std::int64_t> scaffold_ids, SplitRatios ratios, StreamKey key) {
  std::map<std::int64_t, std::vector<std::uint32_t>> groups;
  for (std::size_t i = 0; i < scaffold_ids.size(); ++i) {
    if (scaffold_ids[i] < 0) throw Error(ErrorCode::MissingScaffoldId, "graph " + std::to_string(i));
    groups[scaffold_ids[i]].push_back(static_cast<std::uint32_t>(i));
  }
  std::vector<std::uint64_t> ids;
  ids.reserve(groups.size());
  for (const auto& [gid, members] : groups) ids.push_back(static_cast<std::uint64_t>(gid));

  const double total = static_cast<double>(scaffold_ids.size());
  // Small slack so that exact ratios like 8/10 are not lost to rounding.
  const double train_cut = ratios.train * total - 1e-9;
  const double val_cut = (ratios.train + ratios.val) * total - 1e-9;

  ScaffoldSplit out{SplitAssignment(scaffold_ids.size()), {}};
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  for (std::uint64_t gid : keyed_order(key, ids)) {
    const auto& members = groups[static_cast<std::int64_t>(gid)];
    Role role;
    if (static_cast<double>(n_train) < train_cut) {
      role = Role::train;
      n_train += members.size();
    } else if (static_cast<double>(n_train + n_val) < val_cut) {
      role = Role::val;
      n_val += members.size();
    } else {
      role = Role::test;
    }
    for (std::uint32_t m : members) out.split.roles[m] = role;
  }
  for (Role r : {Role::val, Role::test}) {
    if (out.split.count(r) == 0 && !scaffold_ids.empty()) {
      out.warnings.push_back(std::string("scaffold split left ") + std::string(to_string(r)) + " empty");
      log::warn(out.warnings.back());
    }
  }
  return out;
}

KgInductiveSplit inductive_entity_split(const TripleStore& store, double train_fraction, StreamKey key) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::BadArgument, "train_fraction must lie in (0, 1)");
  const auto order = keyed_permutation(key, store.num_entities);
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * store.num_entities));
  std::vector<std::uint8_t> in_train(store.num_entities, 0);
  KgInductiveSplit out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto e = static_cast<std::uint32_t>(order[i]);
    if (i < n_train) {
      in_train[e] = 1;
      out.train_entities.push_back(e);
    } else {
      out.test_entities.push_back(e);
    }
  }
  std::sort(out.train_entities.begin(), out.train_entities.end());
  std::sort(out.test_entities.begin(), out.test_entities.end());

  for (const Triple& t : store.triples) {
    const bool h = in_train[t.head];
    const bool tl = in_train[t.tail];
    if (h && tl)
      out.train_triples.push_back(t);
    else if (h)
      out.test_queries.push_back({t, CorruptSide::tail});
    else if (tl)
      out.test_queries.push_back({t, CorruptSide::head});
    else
      ++out.discarded;
  }
  if (out.discarded > 0)
    log::info("inductive split discarded " + std::to_string(out.discarded) + " triples with both endpoints held out");
  return out;
}

std::vector<double> kg_query_ranks(const KgInductiveSplit& split, const TripleStore& store,
                                   const RankingTable& ranking, bool filtered, TieRule rule) {
  if (split.test_queries.empty()) throw Error(ErrorCode::EmptyQuerySet, "no inductive test queries");
  const double floor_score = -std::numeric_limits<double>::infinity();
  std::vector<double> scores(store.num_entities);
  std::vector<std::uint8_t> skip(store.num_entities);
  std::vector<double> ranks;
  ranks.reserve(split.test_queries.size());
  for (std::size_t q = 0; q < split.test_queries.size(); ++q) {
    const KgQuery& query = split.test_queries[q];
    const auto* entries = ranking.find(static_cast<std::uint32_t>(q));
    if (entries == nullptr) throw Error(ErrorCode::MissingPrediction, "no ranking for query " + std::to_string(q));
    std::fill(scores.begin(), scores.end(), floor_score);
    for (const auto& e : *entries) {
      if (e.candidate >= store.num_entities) throw Error(ErrorCode::BadId, "candidate " + std::to_string(e.candidate));
      scores[e.candidate] = e.score;
    }
    std::fill(skip.begin(), skip.end(), 0);
    if (filtered) {
      for (std::uint32_t c = 0; c < store.num_entities; ++c) {
        Triple t = query.triple;
        (query.side == CorruptSide::head ? t.head : t.tail) = c;
        if (c != query.answer() && store.contains(t)) skip[c] = 1;
      }
    }
    ranks.push_back(rank_of(scores, query.answer(), rule, skip));
  }
  return ranks;
}

void write_kg_queries(const std::filesystem::path& path, const KgInductiveSplit& split) {
  std::string out;
  for (std::size_t q = 0; q < split.test_queries.size(); ++q) {
    const auto& k = split.test_queries[q];
    out += std::to_string(q) + '\t' + std::to_string(k.triple.head) + '\t' + std::to_string(k.triple.relation) +
           '\t' + std::to_string(k.triple.tail) + '\t' + (k.side == CorruptSide::head ? "head" : "tail") + '\n';
  }
  io::write_text(path, out);
}

std::vector<KgQuery> read_kg_queries(const std::filesystem::path& path) {
  std::vector<KgQuery> out;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() != 5 || io::parse_u64(f[0], "query id") != out.size())
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    KgQuery k;
    k.triple = {static_cast<std::uint32_t>(io::parse_u64(f[1], "head")),
                static_cast<std::uint32_t>(io::parse_u64(f[2], "relation")),
                static_cast<std::uint32_t>(io::parse_u64(f[3], "tail"))};
    if (f[4] == "head")
      k.side = CorruptSide::head;
    else if (f[4] == "tail")
      k.side = CorruptSide::tail;
    else
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    out.push_back(k);
  });
  return out;
}

double scaffold_gap(double auc_random, double auc_scaffold) {
  const bool unit_a = auc_random >= 0.0 && auc_random <= 1.0;
  const bool unit_b = auc_scaffold >= 0.0 && auc_scaffold <= 1.0;
  const bool pct_a = auc_random >= 0.0 && auc_random <= 100.0;
  const bool pct_b = auc_scaffold >= 0.0 && auc_scaffold <= 100.0;
  if (!pct_a || !pct_b) throw Error(ErrorCode::ScaleMismatch, "AUC outside [0, 100]");
  if (unit_a != unit_b) throw Error(ErrorCode::ScaleMismatch, "one AUC is a fraction, the other a percentage");
  return auc_random - auc_scaffold;
}

}  // namespace gsh
