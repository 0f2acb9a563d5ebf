#pragma once

// Synthetic fixtures shared by the unit and acceptance tests.

#include "gsh/graph_store.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace gsh::testing {

// Undirected graph with `m` distinct random non-loop edges (m must be well
// below n(n-1)/2) plus the given self-loops.
inline Graph random_graph(NodeId n, std::size_t m, std::uint64_t seed, std::vector<NodeId> loops = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  std::vector<Edge> edges;
  edges.reserve(m + m / 8);
  while (edges.size() < m) {
    const std::size_t want = m - edges.size();
    for (std::size_t i = 0; i < want + want / 8 + 1; ++i) {
      NodeId a = pick(rng), b = pick(rng);
      if (a == b) continue;
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.size() > m) {
      std::shuffle(edges.begin(), edges.end(), rng);
      edges.resize(m);
      std::sort(edges.begin(), edges.end());
    }
  }
  std::sort(loops.begin(), loops.end());
  loops.erase(std::unique(loops.begin(), loops.end()), loops.end());
  return Graph::from_edges(n, edges, loops);
}

struct SyntheticOptions {
  NodeId nodes = 1000;
  ClassId classes = 2;
  double avg_degree = 8;
  double homophily = 0.8;
  int feature_dim = 8;
  bool years = true;
  bool sensitive = true;
  std::uint64_t seed = 1;
};

// Planted-partition labelled graph with a 60/20/20 random split.
inline Dataset synthetic_dataset(const SyntheticOptions& o, std::string name = "synth") {
  std::mt19937_64 rng(o.seed);
  std::vector<ClassId> labels(o.nodes);
  std::vector<std::vector<NodeId>> members(o.classes);
  for (NodeId v = 0; v < o.nodes; ++v) {
    labels[v] = static_cast<ClassId>(rng() % o.classes);
    members[labels[v]].push_back(v);
  }
  std::vector<Edge> edges;
  const auto target = static_cast<std::size_t>(o.avg_degree * o.nodes / 2);
  std::uniform_real_distribution<double> unit(0, 1);
  while (edges.size() < target * 11 / 10) {
    const NodeId a = static_cast<NodeId>(rng() % o.nodes);
    NodeId b;
    if (unit(rng) < o.homophily) {
      const auto& same = members[labels[a]];
      b = same[rng() % same.size()];
    } else {
      b = static_cast<NodeId>(rng() % o.nodes);
    }
    if (a != b) edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Dataset ds;
  ds.name = std::move(name);
  ds.kind = DatasetKind::node_graph;
  ds.graph = Graph::from_edges(o.nodes, edges);
  ds.graph.labels = labels;
  ds.graph.num_classes = o.classes;
  if (o.feature_dim > 0) {
    std::normal_distribution<float> gauss(0.f, 1.f);
    FeatureMatrix x(o.nodes, o.feature_dim);
    for (NodeId v = 0; v < o.nodes; ++v)
      for (int c = 0; c < o.feature_dim; ++c) x(v, c) = gauss(rng) + (c % static_cast<int>(o.classes) == static_cast<int>(labels[v]) ? 1.f : 0.f);
    ds.graph.features = std::move(x);
  }
  if (o.years) {
    ds.graph.years.resize(o.nodes);
    for (auto& y : ds.graph.years) y = 2000 + static_cast<std::int32_t>(rng() % 21);
  }
  if (o.sensitive) {
    ds.graph.sensitive.resize(o.nodes);
    for (auto& s : ds.graph.sensitive) s = static_cast<std::int8_t>(rng() % 2);
  }
  std::vector<NodeId> perm(o.nodes);
  for (NodeId v = 0; v < o.nodes; ++v) perm[v] = v;
  std::shuffle(perm.begin(), perm.end(), rng);
  ds.split = SplitAssignment(o.nodes);
  for (NodeId i = 0; i < o.nodes; ++i)
    ds.split.roles[perm[i]] = i < o.nodes * 3 / 5 ? Role::train : i < o.nodes * 4 / 5 ? Role::val : Role::test;
  return ds;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gsh_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gsh::testing
