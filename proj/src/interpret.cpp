#include "gsh/interpret.hpp"
#include "gsh/error.hpp"
#include "gsh/io.hpp"
#include "gsh/log.hpp"
#include "gsh/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

namespace gsh {

Subgraph khop_subgraph(const Graph& graph, NodeId center, unsigned hops) {
  if (center >= graph.num_nodes()) throw Error(ErrorCode::BadId, "center " + std::to_string(center));
  if (!graph.undirected()) return khop_subgraph(symmetrized(graph), center, hops);

  std::unordered_set<NodeId> seen{center};
  std::vector<NodeId> frontier{center};
  for (unsigned h = 0; h < hops && !frontier.empty(); ++h) {
    std::vector<NodeId> next;
    for (NodeId u : frontier)
      for (NodeId v : graph.neighbors(u))
        if (seen.insert(v).second) next.push_back(v);
    frontier = std::move(next);
  }
  Subgraph sg;
  sg.nodes.assign(seen.begin(), seen.end());
  std::sort(sg.nodes.begin(), sg.nodes.end());
  for (NodeId u : sg.nodes)
    for (NodeId v : graph.neighbors(u))
      if (v > u && seen.contains(v)) sg.edges.push_back({u, v});
  return sg;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SaliencyKind kind) {
  switch (kind) {
    case SaliencyKind::node_grad_norm: return "node_grad_norm";
    case SaliencyKind::edge_score: return "edge_score";
    case SaliencyKind::atom_score: return "atom_score";
  }
  return "node_grad_norm";
}

SaliencyTable::SaliencyTable(SaliencyKind kind, std::vector<std::pair<std::uint64_t, double>> scores)
    : kind_(kind), scores_(std::move(scores)) {
  std::sort(scores_.begin(), scores_.end());
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (!std::isfinite(scores_[i].second) || scores_[i].second < 0)
      throw Error(ErrorCode::BadArgument, "saliency scores must be finite and nonnegative");
    if (i > 0 && scores_[i - 1].first == scores_[i].first)
      throw Error(ErrorCode::ParseError, "duplicate saliency unit");
  }
}

std::optional<double> SaliencyTable::find(std::uint64_t unit) const {
  const auto it = std::lower_bound(scores_.begin(), scores_.end(), std::pair<std::uint64_t, double>{unit, -1.0});
  if (it == scores_.end() || it->first != unit) return std::nullopt;
  return it->second;
}

SaliencyTable read_saliency(const std::filesystem::path& path) {
  std::optional<SaliencyKind> kind;
  std::vector<std::pair<std::uint64_t, double>> rows;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (!kind) {
      if (f.size() != 2 || f[0] != "kind") throw Error(ErrorCode::ParseError, path.string() + ": first line must be kind<TAB>...");
      for (auto k : {SaliencyKind::node_grad_norm, SaliencyKind::edge_score, SaliencyKind::atom_score})
        if (to_string(k) == f[1]) kind = k;
      if (!kind) throw Error(ErrorCode::ParseError, "unknown saliency kind '" + std::string(f[1]) + "'");
      return;
    }
    const std::size_t want = *kind == SaliencyKind::node_grad_norm ? 2 : 3;
    if (f.size() != want) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    if (want == 2) {
      rows.emplace_back(io::parse_u64(f[0], "node id"), io::parse_f64(f[1], "saliency"));
    } else {
      auto a = static_cast<std::uint32_t>(io::parse_u64(f[0], "saliency unit"));
      auto b = static_cast<std::uint32_t>(io::parse_u64(f[1], "saliency unit"));
      if (*kind == SaliencyKind::edge_score && a > b) std::swap(a, b);
      rows.emplace_back(SaliencyTable::pack(a, b), io::parse_f64(f[2], "saliency"));
    }
  });
  if (!kind) throw Error(ErrorCode::ParseError, path.string() + ": empty saliency file");
  return SaliencyTable(*kind, std::move(rows));
}

void write_saliency(const std::filesystem::path& path, const SaliencyTable& table,
                    std::span<const std::pair<std::uint64_t, double>> rows) {
  std::string out = "kind\t" + std::string(to_string(table.kind())) + "\n";
  for (const auto& [unit, score] : rows) {
    if (table.kind() == SaliencyKind::node_grad_norm)
      out += std::to_string(unit);
    else
      out += std::to_string(unit >> 32) + '\t' + std::to_string(unit & 0xffffffffULL);
    out += '\t' + io::format_double(score) + '\n';
  }
  io::write_text(path, out);
}

std::vector<double> edge_saliency_from_node_grads(const SaliencyTable& node_scores, std::span<const Edge> edges) {
  std::vector<double> out;
  out.reserve(edges.size());
  for (const Edge& e : edges) {
    const auto su = node_scores.find(e.u);
    const auto sv = node_scores.find(e.v);
    if (!su || !sv)
      throw Error(ErrorCode::MissingNodeScore, "no saliency for node " + std::to_string(su ? e.v : e.u));
    out.push_back(*su + *sv);
  }
  return out;
}

std::vector<double> edge_scores_for(const SaliencyTable& table, std::span<const Edge> edges) {
  if (table.kind() == SaliencyKind::node_grad_norm) return edge_saliency_from_node_grads(table, edges);
  if (table.kind() != SaliencyKind::edge_score)
    throw Error(ErrorCode::BadArgument, "atom saliency cannot score graph edges");
  std::vector<double> out;
  out.reserve(edges.size());
  for (const Edge& e : edges) {
    const auto s = table.find(SaliencyTable::pack(e.u, e.v));
    if (!s) throw Error(ErrorCode::MissingNodeScore, "no saliency for edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
    out.push_back(*s);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Ranking ranking) {
  return ranking == Ranking::saliency ? "saliency" : "random";
}

std::size_t mask_count(double k_percent, std::size_t m) {
  if (!(k_percent > 0.0 && k_percent <= 100.0)) throw Error(ErrorCode::BadArgument, "k must lie in (0, 100]");
  const auto raw = static_cast<std::size_t>(std::ceil(k_percent * static_cast<double>(m) / 100.0 - 1e-9));
  return std::min(m, std::max<std::size_t>(1, raw));
}

std::vector<std::uint32_t> ranked_order(std::span<const double> scores, Ranking ranking, StreamKey key) {
  std::vector<std::uint32_t> order;
  if (ranking == Ranking::random) {
    for (std::uint64_t i : keyed_permutation(key, scores.size())) order.push_back(static_cast<std::uint32_t>(i));
    return order;
  }
  order.resize(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return scores[a] > scores[b]; });
  return order;
}

namespace {

MaskSplit split_prefix(const std::vector<std::uint32_t>& order, std::size_t count) {
  MaskSplit out;
  out.masked.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  out.complement.assign(order.begin() + static_cast<std::ptrdiff_t>(count), order.end());
  std::sort(out.masked.begin(), out.masked.end());
  std::sort(out.complement.begin(), out.complement.end());
  return out;
}

}  // namespace

MaskSplit rank_and_mask(std::span<const double> scores, double k_percent, StreamKey key, Ranking ranking) {
  if (scores.empty()) throw Error(ErrorCode::EmptySubgraph, "nothing to mask");
  return split_prefix(ranked_order(scores, ranking, key), mask_count(k_percent, scores.size()));
}

// ---------------------------------------------------------------------------

FidelityRecord fidelity(double p0, double p_plus, double p_minus, double epsilon) {
  for (double p : {p0, p_plus, p_minus})
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::BadProbability, "probabilities must lie in [0, 1]");
  FidelityRecord r{p0, p_plus, p_minus, p0 - p_plus, p0 - p_minus, 0.0};
  const double a = std::clamp(r.fid_plus, 0.0, 1.0);
  const double b = std::clamp(1.0 - r.fid_minus, 0.0, 1.0);
  r.characterization = 2.0 * a * b / (a + b + epsilon);
  return r;
}

MetricCell char_lift(const MetricCell& saliency, const MetricCell& random) {
  if (saliency.state == CellState::inapplicable && random.state == CellState::inapplicable)
    return MetricCell::inapplicable();
  if (!saliency.has_value() || !random.has_value()) return MetricCell::undefined();
  if (saliency.n != random.n)
    throw Error(ErrorCode::SeedCountMismatch,
                "saliency has " + std::to_string(saliency.n) + " seeds, random " + std::to_string(random.n));
  MetricCell out;
  out.mean = saliency.mean - random.mean;
  out.std = std::sqrt(saliency.std * saliency.std + random.std * random.std);
  out.n = saliency.n;
  return out;
}

void add_lift_cells(Report& report, const std::string& axis) {
  std::vector<std::pair<CellKey, MetricCell>> added;
  for (const auto& [key, cell] : report.cells) {
    if (key.axis != axis || !key.subcondition.starts_with("saliency:") || !key.subcondition.ends_with(":char"))
      continue;
    const std::string rest = key.subcondition.substr(std::string_view("saliency:").size());
    CellKey rand_key = key;
    rand_key.subcondition = "random:" + rest;
    const auto it = report.cells.find(rand_key);
    if (it == report.cells.end()) continue;
    CellKey lift_key = key;
    lift_key.subcondition = "lift:" + rest;
    const MetricCell& rnd = it->second;
    if (cell.has_value() && rnd.has_value() && cell.n == rnd.n)
      added.emplace_back(lift_key, char_lift(cell, rnd));
    else if (cell.state == CellState::inapplicable && rnd.state == CellState::inapplicable)
      added.emplace_back(lift_key, MetricCell::inapplicable());
    else
      added.emplace_back(lift_key, MetricCell::undefined());
  }
  for (auto& [k, c] : added) report.cells[k] = c;
}

// ---------------------------------------------------------------------------

std::string condition_name(Ranking ranking, double k_percent, bool plus) {
  return std::string(to_string(ranking)) + ":" + io::format_double(k_percent) + (plus ? ":plus" : ":minus");
}

std::optional<AblationEntry> node_ablation_entry(const Graph& graph, NodeId target, const SaliencyTable& saliency,
                                                 std::span<const double> k_percents, StreamKey key, unsigned hops) {
  Subgraph sg = khop_subgraph(graph, target, hops);
  if (sg.edges.empty()) {
    log::info("EmptySubgraph: target " + std::to_string(target) + " skipped");
    return std::nullopt;
  }
  const auto scores = edge_scores_for(saliency, sg.edges);
  AblationEntry entry;
  entry.target = target;
  entry.unit = AblationUnit::edge;
  entry.nodes = std::move(sg.nodes);
  entry.edges = std::move(sg.edges);
  for (Ranking ranking : {Ranking::saliency, Ranking::random}) {
    const auto order = ranked_order(scores, ranking, sub_key(key, target));
    for (double k : k_percents) {
      MaskSplit split = split_prefix(order, mask_count(k, scores.size()));
      entry.conditions.push_back({ranking, k, std::move(split.masked), std::move(split.complement), {}, {}});
    }
  }
  return entry;
}

std::vector<AblationEntry> node_ablation_manifests(const Graph& graph, std::span<const NodeId> targets,
                                                   const SaliencyTable& saliency, std::span<const double> k_percents,
                                                   StreamKey key, unsigned workers) {
  const Graph& g = graph.undirected() ? graph : symmetrized(graph);
  std::vector<std::optional<AblationEntry>> slots(targets.size());
  parallel_for(targets.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) slots[i] = node_ablation_entry(g, targets[i], saliency, k_percents, key);
  });
  std::vector<AblationEntry> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

namespace {

std::vector<std::uint32_t> bonds_touching(const std::vector<Edge>& bonds, const std::vector<std::uint32_t>& atoms,
                                          std::size_t num_atoms) {
  std::vector<std::uint8_t> hit(num_atoms, 0);
  for (auto a : atoms) hit[a] = 1;
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < bonds.size(); ++i)
    if (hit[bonds[i].u] || hit[bonds[i].v]) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

std::vector<Edge> molecule_bonds(const Graph& molecule) {
  return canonical_undirected_edges(molecule.undirected() ? molecule : symmetrized(molecule)).edges;
}

}  // namespace

AtomAblation atom_ablation_manifest(const Graph& molecule, std::span<const double> atom_scores,
                                    double k_percent, StreamKey key, Ranking ranking) {
  const std::size_t n = molecule.num_nodes();
  if (n == 0) throw Error(ErrorCode::EmptyMolecule, "molecule has no atoms");
  if (atom_scores.size() != n) throw Error(ErrorCode::LengthMismatch, "one saliency score per atom required");
  const MaskSplit split = rank_and_mask(atom_scores, k_percent, key, ranking);
  const auto bonds = molecule_bonds(molecule);

  AtomAblation out;
  out.removed_atoms = split.masked;
  out.kept_atoms = split.complement;
  out.pool_mask.assign(n, 1);
  for (auto a : out.removed_atoms) out.pool_mask[a] = 0;
  std::vector<Edge> kept;
  for (const Edge& b : bonds) (out.pool_mask[b.u] && out.pool_mask[b.v] ? kept : out.removed_bonds).push_back(b);
  out.masked_graph = molecule.with_topology(Graph::from_edges(static_cast<NodeId>(n), kept));
  return out;
}

AblationEntry atom_ablation_entry(std::uint64_t graph_id, const Graph& molecule, std::span<const double> atom_scores,
                                  std::span<const double> k_percents, StreamKey key) {
  const std::size_t n = molecule.num_nodes();
  if (n == 0) throw Error(ErrorCode::EmptyMolecule, "molecule " + std::to_string(graph_id) + " has no atoms");
  if (atom_scores.size() != n) throw Error(ErrorCode::LengthMismatch, "one saliency score per atom required");
  AblationEntry entry;
  entry.target = graph_id;
  entry.unit = AblationUnit::atom;
  entry.nodes.resize(n);
  std::iota(entry.nodes.begin(), entry.nodes.end(), NodeId{0});
  entry.edges = molecule_bonds(molecule);
  for (Ranking ranking : {Ranking::saliency, Ranking::random}) {
    const auto order = ranked_order(atom_scores, ranking, sub_key(key, graph_id));
    for (double k : k_percents) {
      MaskSplit split = split_prefix(order, mask_count(k, n));
      AblationCondition c{ranking, k, std::move(split.masked), std::move(split.complement), {}, {}};
      c.removed_bonds = bonds_touching(entry.edges, c.masked, n);
      c.complement_bonds = bonds_touching(entry.edges, c.complement, n);
      entry.conditions.push_back(std::move(c));
    }
  }
  return entry;
}

std::vector<std::uint32_t> graph_level_targets(std::span<const std::uint32_t> test_graphs,
                                               std::span<const std::uint8_t> labels,
                                               std::span<const std::uint8_t> clean_predictions,
                                               std::size_t min_targets) {
  std::vector<std::uint32_t> correct;
  std::vector<std::uint32_t> positives;
  for (std::uint32_t g : test_graphs) {
    if (!labels[g]) continue;
    positives.push_back(g);
    if (!clean_predictions.empty() && clean_predictions[g]) correct.push_back(g);
  }
  return correct.size() >= min_targets ? correct : positives;
}

// ---------------------------------------------------------------------------
// Manifest text format

namespace {

std::string join(const std::vector<std::uint32_t>& v) {
  if (v.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::uint32_t> split_list(std::string_view s) {
  std::vector<std::uint32_t> out;
  if (s == "-") return out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(static_cast<std::uint32_t>(io::parse_u64(s.substr(0, comma), "index list")));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

std::string format_manifest(const AblationEntry& entry) {
  std::string out = "target\t" + std::to_string(entry.target) + "\n";
  out += std::string("unit\t") + (entry.unit == AblationUnit::edge ? "edge" : "atom") + "\n";
  out += "nodes\t" + join(std::vector<std::uint32_t>(entry.nodes.begin(), entry.nodes.end())) + "\n";
  for (const Edge& e : entry.edges) out += "edge\t" + std::to_string(e.u) + '\t' + std::to_string(e.v) + '\n';
  for (const AblationCondition& c : entry.conditions) {
    out += "mask\t" + std::string(to_string(c.ranking)) + ':' + io::format_double(c.k_percent) + '\t' + join(c.masked) +
           '\t' + join(c.complement);
    if (entry.unit == AblationUnit::atom) out += '\t' + join(c.removed_bonds) + '\t' + join(c.complement_bonds);
    out += '\n';
  }
  return out;
}

AblationEntry parse_manifest(std::string_view text) {
  AblationEntry entry;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    for (;;) {
      const auto tab = line.find('\t');
      f.push_back(line.substr(0, tab));
      if (tab == std::string_view::npos) break;
      line.remove_prefix(tab + 1);
    }
    auto bad = [&] { return Error(ErrorCode::ParseError, "manifest line " + std::to_string(line_no)); };
    if (f[0] == "target" && f.size() == 2) {
      entry.target = io::parse_u64(f[1], "target");
    } else if (f[0] == "unit" && f.size() == 2) {
      if (f[1] != "edge" && f[1] != "atom") throw bad();
      entry.unit = f[1] == "edge" ? AblationUnit::edge : AblationUnit::atom;
    } else if (f[0] == "nodes" && f.size() == 2) {
      const auto nodes = split_list(f[1]);
      entry.nodes.assign(nodes.begin(), nodes.end());
    } else if (f[0] == "edge" && f.size() == 3) {
      entry.edges.push_back({static_cast<NodeId>(io::parse_u64(f[1], "edge")),
                             static_cast<NodeId>(io::parse_u64(f[2], "edge"))});
    } else if (f[0] == "mask" && (f.size() == 4 || f.size() == 6)) {
      const auto colon = f[1].find(':');
      if (colon == std::string_view::npos) throw bad();
      AblationCondition c;
      const auto r = f[1].substr(0, colon);
      if (r == "saliency")
        c.ranking = Ranking::saliency;
      else if (r == "random")
        c.ranking = Ranking::random;
      else
        throw bad();
      c.k_percent = io::parse_f64(f[1].substr(colon + 1), "k");
      c.masked = split_list(f[2]);
      c.complement = split_list(f[3]);
      if (f.size() == 6) {
        c.removed_bonds = split_list(f[4]);
        c.complement_bonds = split_list(f[5]);
      }
      entry.conditions.push_back(std::move(c));
    } else {
      throw bad();
    }
  }
  return entry;
}

void write_manifests(const std::filesystem::path& dir, std::span<const AblationEntry> entries) {
  std::filesystem::create_directories(dir);
  for (const AblationEntry& e : entries)
    io::write_text(dir / ("target_" + std::to_string(e.target) + ".txt"), format_manifest(e));
}

std::vector<AblationEntry> read_manifests(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::MissingFile, dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& de : std::filesystem::directory_iterator(dir))
    if (de.path().extension() == ".txt" && de.path().filename().string().starts_with("target_")) files.push_back(de.path());
  std::vector<AblationEntry> out;
  for (const auto& f : files) out.push_back(parse_manifest(io::read_text(f)));
  std::sort(out.begin(), out.end(), [](const AblationEntry& a, const AblationEntry& b) { return a.target < b.target; });
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ConditionProbabilities> read_condition_probs(const std::filesystem::path& path) {
  std::vector<ConditionProbabilities> out;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() != 3) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    out.push_back({io::parse_u64(f[0], "target id"), std::string(f[1]), io::parse_f64(f[2], "probability")});
  });
  return out;
}

FidelitySummary score_fidelity(std::span<const AblationEntry> entries,
                               std::span<const ConditionProbabilities> probs) {
  std::map<std::pair<std::uint64_t, std::string>, double> lookup;
  for (const auto& p : probs) lookup[{p.target, p.condition}] = p.prob;
  auto need = [&](std::uint64_t target, const std::string& cond) {
    const auto it = lookup.find({target, cond});
    if (it == lookup.end())
      throw Error(ErrorCode::MissingInput, "no probability for target " + std::to_string(target) + " condition " + cond);
    return it->second;
  };

  FidelitySummary out;
  std::map<std::string, std::array<double, 4>> sums;  // fid+, fid-, char, count
  for (const AblationEntry& e : entries) {
    const double p0 = need(e.target, "clean");
    for (const AblationCondition& c : e.conditions) {
      const double plus = need(e.target, condition_name(c.ranking, c.k_percent, true));
      const double minus = need(e.target, condition_name(c.ranking, c.k_percent, false));
      FidelityRow row{e.target, c.ranking, c.k_percent, fidelity(p0, plus, minus)};
      auto& s = sums[std::string(to_string(c.ranking)) + ":" + io::format_double(c.k_percent)];
      s[0] += row.record.fid_plus;
      s[1] += row.record.fid_minus;
      s[2] += row.record.characterization;
      s[3] += 1;
      out.rows.push_back(row);
    }
  }
  for (const auto& [k, s] : sums) out.means[k] = {s[0] / s[3], s[1] / s[3], s[2] / s[3]};
  return out;
}

}  // namespace gsh
