#include "gsh/error.hpp"
#include "gsh/interpret.hpp"
#include "gsh/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <queue>
#include <random>
#include <set>

using namespace gsh;

namespace {

// Plain BFS over the arc lists, then every arc between reached nodes.
Subgraph bfs_oracle(const Graph& g, NodeId center, unsigned hops) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::queue<NodeId> q;
  dist[center] = 0;
  q.push(center);
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop();
    if (dist[v] == static_cast<int>(hops)) continue;
    for (NodeId w : g.neighbors(v))
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
  }
  Subgraph s;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (dist[v] >= 0) s.nodes.push_back(v);
  std::set<Edge> edges;
  for (NodeId v : s.nodes)
    for (NodeId w : g.neighbors(v))
      if (v < w && dist[w] >= 0) edges.insert({v, w});
  s.edges.assign(edges.begin(), edges.end());
  return s;
}

}  // namespace

TEST_CASE("khop subgraph fixtures") {
  const Graph star = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto s = khop_subgraph(star, 0, 2);
  CHECK(s.nodes.size() == 5);
  CHECK(s.edges.size() == 4);
  const auto leaf = khop_subgraph(star, 3, 2);
  CHECK(leaf.nodes.size() == 5);

  const Graph iso = Graph::from_edges(3, std::vector<Edge>{{0, 1}}, std::vector<NodeId>{2});
  const auto lone = khop_subgraph(iso, 2, 2);
  CHECK(lone.nodes == std::vector<NodeId>{2});
  CHECK(lone.edges.empty());
}

TEST_CASE("khop subgraph matches the BFS oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = testing::random_graph(120, 200, seed, {5});
    for (NodeId c : {0u, 5u, 17u, 119u}) {
      const auto s = khop_subgraph(g, c, 2);
      const auto o = bfs_oracle(g, c, 2);
      CHECK(s.nodes == o.nodes);
      CHECK(s.edges == o.edges);
    }
  }
}

TEST_CASE("edge saliency from node gradients") {
  const SaliencyTable t(SaliencyKind::node_grad_norm, {{0, 0.2}, {1, 0.3}, {2, 0.0}});
  const auto e = edge_saliency_from_node_grads(t, std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(e[0] == doctest::Approx(0.5));
  CHECK(e[1] == doctest::Approx(0.3));
  CHECK_THROWS_AS(edge_saliency_from_node_grads(t, std::vector<Edge>{{0, 9}}), Error);

  std::mt19937_64 rng(3);
  std::vector<std::pair<std::uint64_t, double>> rows;
  std::vector<double> raw(60);
  for (std::uint64_t v = 0; v < 60; ++v) {
    raw[v] = static_cast<double>(rng() % 1000) / 1000.0;
    rows.push_back({v, raw[v]});
  }
  const SaliencyTable big(SaliencyKind::node_grad_norm, rows);
  std::vector<Edge> edges;
  for (int i = 0; i < 100; ++i) {
    NodeId a = rng() % 60, b = rng() % 60;
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  const auto scores = edge_saliency_from_node_grads(big, edges);
  for (std::size_t i = 0; i < edges.size(); ++i) CHECK(scores[i] == raw[edges[i].u] + raw[edges[i].v]);

  const SaliencyTable zero(SaliencyKind::node_grad_norm, {{0, 0.0}, {1, 0.0}});
  CHECK(edge_scores_for(zero, std::vector<Edge>{{0, 1}})[0] == 0.0);
  const SaliencyTable direct(SaliencyKind::edge_score, {{SaliencyTable::pack(0, 1), 0.7}});
  CHECK(edge_scores_for(direct, std::vector<Edge>{{0, 1}})[0] == 0.7);
}

TEST_CASE("mask counts") {
  CHECK(mask_count(10, 10) == 1);
  CHECK(mask_count(5, 10) == 1);
  CHECK(mask_count(20, 10) == 2);
  CHECK(mask_count(50, 3) == 2);
  CHECK(mask_count(5, 1) == 1);
  CHECK(mask_count(100, 7) == 7);
}

TEST_CASE("rank and mask") {
  const auto key = derive_key("interpretation", "d", "random_rank", 0, 0);
  const std::vector<double> equal(10, 1.0);
  const auto m = rank_and_mask(equal, 20, key, Ranking::saliency);
  CHECK(m.masked == std::vector<std::uint32_t>{0, 1});
  CHECK(m.complement.size() == 8);

  const std::vector<double> s{0.1, 0.9, 0.5, 0.9};
  CHECK(rank_and_mask(s, 50, key, Ranking::saliency).masked == std::vector<std::uint32_t>{1, 3});
  CHECK_THROWS_AS(rank_and_mask({}, 10, key, Ranking::saliency), Error);

  // Random prefixes nest across k.
  std::vector<double> many(40, 0.0);
  std::vector<std::uint32_t> prev;
  for (double k : kSparsityLevels) {
    const auto r = rank_and_mask(many, k, key, Ranking::random);
    CHECK(std::includes(r.masked.begin(), r.masked.end(), prev.begin(), prev.end()));
    prev = r.masked;
  }
}

TEST_CASE("fidelity fixtures") {
  const auto best = fidelity(1.0, 0.0, 1.0);
  CHECK(best.fid_plus == 1.0);
  CHECK(best.fid_minus == 0.0);
  CHECK(best.characterization == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fidelity(0.6, 0.6, 0.2).characterization == 0.0);
  const auto r = fidelity(0.9, 0.4, 0.85);
  CHECK(r.fid_plus == doctest::Approx(0.5));
  CHECK(r.fid_minus == doctest::Approx(0.05));
  CHECK(r.characterization == doctest::Approx(2 * 0.5 * 0.95 / 1.45).epsilon(1e-6));
  // Negative raw Fid+ is kept for audit and clamped for char.
  const auto neg = fidelity(0.4, 0.5, 0.4);
  CHECK(neg.fid_plus == doctest::Approx(-0.1));
  CHECK(neg.characterization == 0.0);
  CHECK_THROWS_AS(fidelity(1.2, 0.0, 0.0), Error);
}

TEST_CASE("char is symmetric in its clamped components") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    // a = Fid+ = p0 - p+, b = 1 - Fid- = 1 - p0 + p-.
    const auto x = fidelity(1.0, 1.0 - a, b);
    const auto y = fidelity(1.0, 1.0 - b, a);
    CHECK(x.characterization == doctest::Approx(y.characterization).epsilon(1e-12));
    CHECK(x.characterization >= 0.0);
    CHECK(x.characterization <= 1.0);
  }
}

TEST_CASE("char lift") {
  const MetricCell sal{30.6, 3.0, 5, CellState::value};
  const MetricCell rnd{0.0, 4.0, 5, CellState::value};
  const auto d = char_lift(sal, rnd);
  CHECK(d.mean == doctest::Approx(30.6));
  CHECK(d.std == doctest::Approx(5.0));
  const auto self = char_lift(sal, sal);
  CHECK(self.mean == 0.0);
  CHECK(self.std == doctest::Approx(std::sqrt(2.0) * 3.0));
  CHECK_THROWS_AS(char_lift(sal, MetricCell{0.0, 4.0, 3, CellState::value}), Error);
  CHECK(char_lift(sal, MetricCell::undefined()).state == CellState::undefined);
}

TEST_CASE("lift cells join saliency and random") {
  Report rep;
  rep.cells[{"interpretation", "saliency:10:char", "cora", "gcn"}] = {40, 3, 5, CellState::value};
  rep.cells[{"interpretation", "random:10:char", "cora", "gcn"}] = {10, 4, 5, CellState::value};
  rep.cells[{"interpretation", "saliency:10:fid_plus", "cora", "gcn"}] = {40, 3, 5, CellState::value};
  add_lift_cells(rep);
  const auto& c = rep.cells.at({"interpretation", "lift:10:char", "cora", "gcn"});
  CHECK(c.mean == 30.0);
  CHECK(c.std == doctest::Approx(5.0));
  CHECK(rep.cells.count({"interpretation", "lift:10:fid_plus", "cora", "gcn"}) == 0);
}

TEST_CASE("node ablation entries partition the receptive field") {
  const Graph g = testing::random_graph(80, 200, 4);
  std::vector<std::pair<std::uint64_t, double>> rows;
  for (std::uint64_t v = 0; v < 80; ++v) rows.push_back({v, static_cast<double>(v % 7)});
  const SaliencyTable sal(SaliencyKind::node_grad_norm, rows);
  const auto key = derive_key("interpretation", "g", "random_rank", 0, 0);
  for (NodeId t = 0; t < 80; t += 9) {
    const auto e = node_ablation_entry(g, t, sal, kSparsityLevels, key);
    if (!e) continue;
    const auto sub = khop_subgraph(g, t, 2);
    CHECK(e->edges == sub.edges);
    CHECK(e->conditions.size() == 2 * kSparsityLevels.size());
    for (const auto& c : e->conditions) {
      CHECK(c.masked.size() == mask_count(c.k_percent, e->edges.size()));
      std::vector<std::uint32_t> all = c.masked;
      all.insert(all.end(), c.complement.begin(), c.complement.end());
      std::sort(all.begin(), all.end());
      CHECK(all.size() == e->edges.size());
      for (std::uint32_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    }
  }
  const Graph iso = Graph::from_edges(3, std::vector<Edge>{{0, 1}});
  CHECK_FALSE(node_ablation_entry(iso, 2, sal, kSparsityLevels, key).has_value());
}

TEST_CASE("manifests are identical across worker counts and survive a round trip") {
  const Graph g = testing::random_graph(300, 900, 8);
  std::vector<std::pair<std::uint64_t, double>> rows;
  for (std::uint64_t v = 0; v < 300; ++v) rows.push_back({v, static_cast<double>((v * 37) % 11)});
  const SaliencyTable sal(SaliencyKind::node_grad_norm, rows);
  std::vector<NodeId> targets;
  for (NodeId v = 0; v < 300; v += 3) targets.push_back(v);
  const auto key = derive_key("interpretation", "g", "random_rank", 0, 1);
  const auto a = node_ablation_manifests(g, targets, sal, kSparsityLevels, key, 1);
  const auto b = node_ablation_manifests(g, targets, sal, kSparsityLevels, key, 8);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(format_manifest(a[i]) == format_manifest(b[i]));

  const auto dir = testing::scratch_dir("manifests");
  write_manifests(dir, a);
  const auto back = read_manifests(dir);
  REQUIRE(back.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(format_manifest(back[i]) == format_manifest(a[i]));
}

TEST_CASE("atom ablation") {
  // Path 0-1-2-3-4; atom 2 is an articulation point.
  const Graph mol = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const std::vector<double> scores{0.1, 0.2, 0.9, 0.3, 0.0};
  const auto key = derive_key("interpretation", "m", "random_rank", 0, 0);
  const auto a = atom_ablation_manifest(mol, scores, 20, key, Ranking::saliency);
  CHECK(a.removed_atoms == std::vector<std::uint32_t>{2});
  CHECK(a.removed_bonds == std::vector<Edge>{{1, 2}, {2, 3}});
  CHECK(a.masked_graph.num_nodes() == 5);
  CHECK(a.masked_graph.degree(2) == 0);
  CHECK(a.pool_mask == std::vector<std::uint8_t>{1, 1, 0, 1, 1});
  CHECK_THROWS_AS(atom_ablation_manifest(Graph::from_edges(0, {}), {}, 20, key, Ranking::saliency), Error);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph m = testing::random_graph(12 + rng() % 20, 20, trial);
    std::vector<double> s(m.num_nodes());
    for (auto& x : s) x = static_cast<double>(rng() % 100);
    for (Ranking r : {Ranking::saliency, Ranking::random}) {
      const auto ab = atom_ablation_manifest(m, s, 20, key, r);
      std::set<Edge> oracle;
      const std::set<std::uint32_t> removed(ab.removed_atoms.begin(), ab.removed_atoms.end());
      for (const Edge& e : canonical_undirected_edges(m).edges)
        if (removed.count(e.u) || removed.count(e.v)) oracle.insert(e);
      CHECK(std::vector<Edge>(oracle.begin(), oracle.end()) == ab.removed_bonds);
      CHECK(ab.removed_atoms.size() == mask_count(20, m.num_nodes()));
      CHECK(ab.removed_atoms.size() + ab.kept_atoms.size() == m.num_nodes());
    }
  }
}

TEST_CASE("graph-level targets") {
  const std::vector<std::uint32_t> test{0, 1, 2, 3, 4, 5};
  const std::vector<std::uint8_t> labels{1, 1, 0, 1, 1, 1};
  const std::vector<std::uint8_t> correct{1, 0, 1, 1, 0, 0};
  CHECK(graph_level_targets(test, labels, correct, 2) == std::vector<std::uint32_t>{0, 3});
  CHECK(graph_level_targets(test, labels, correct, 10) == std::vector<std::uint32_t>{0, 1, 3, 4, 5});
  CHECK(graph_level_targets(test, labels, {}, 2) == std::vector<std::uint32_t>{0, 1, 3, 4, 5});
}

TEST_CASE("fidelity scoring joins manifests and probabilities") {
  AblationEntry e;
  e.target = 4;
  e.nodes = {3, 4, 5};
  e.edges = {{3, 4}, {4, 5}};
  AblationCondition c;
  c.ranking = Ranking::saliency;
  c.k_percent = 50;
  c.masked = {0};
  c.complement = {1};
  e.conditions.push_back(c);
  std::vector<ConditionProbabilities> probs{{4, "clean", 0.9}, {4, "saliency:50:plus", 0.4}};
  const std::vector<AblationEntry> entries{e};
  CHECK_THROWS_AS(score_fidelity(entries, probs), Error);
  probs.push_back({4, "saliency:50:minus", 0.85});
  const auto s = score_fidelity(entries, probs);
  REQUIRE(s.rows.size() == 1);
  CHECK(s.rows[0].record.fid_plus == doctest::Approx(0.5));
  CHECK(s.means.at("saliency:50")[2] == doctest::Approx(2 * 0.5 * 0.95 / 1.45).epsilon(1e-6));

  const auto dir = testing::scratch_dir("probs");
  io::write_text(dir / "p.tsv", "4\tclean\t0.9\n4\tsaliency:50:plus\t0.4\n4\tsaliency:50:minus\t0.85\n");
  CHECK(read_condition_probs(dir / "p.tsv").size() == 3);
  CHECK(condition_name(Ranking::random, 5, false) == "random:5:minus");
}

TEST_CASE("saliency file round trip") {
  const auto dir = testing::scratch_dir("saliency");
  const std::vector<std::pair<std::uint64_t, double>> rows{{SaliencyTable::pack(1, 2), 0.25}};
  write_saliency(dir / "s.tsv", SaliencyTable(SaliencyKind::edge_score, rows), rows);
  const auto t = read_saliency(dir / "s.tsv");
  CHECK(t.kind() == SaliencyKind::edge_score);
  CHECK(*t.find(SaliencyTable::pack(1, 2)) == 0.25);
  io::write_text(dir / "bad.tsv", "kind\tnode_grad_norm\n0\t-1\n");
  CHECK_THROWS_AS(read_saliency(dir / "bad.tsv"), Error);
}
