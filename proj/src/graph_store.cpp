#include "gsh/graph_store.hpp"
#include "gsh/error.hpp"
#include "gsh/io.hpp"
#include "gsh/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace gsh {
namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Graph

Graph Graph::from_arcs(NodeId num_nodes, std::vector<Arc> arcs, bool undirected) {
  for (const Arc& a : arcs) {
    if (a.src >= num_nodes || a.dst >= num_nodes)
      throw Error(ErrorCode::BadId, "arc (" + std::to_string(a.src) + "," + std::to_string(a.dst) +
                                        ") in a graph with " + std::to_string(num_nodes) + " nodes");
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  std::vector<ArcOffset> offsets(static_cast<std::size_t>(num_nodes) + 1, 0);
  for (const Arc& a : arcs) ++offsets[a.src + 1];
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  std::vector<NodeId> neighbors;
  neighbors.reserve(arcs.size());
  for (const Arc& a : arcs) neighbors.push_back(a.dst);
  return from_csr(num_nodes, std::move(offsets), std::move(neighbors), undirected);
}

Graph Graph::from_csr(NodeId num_nodes, std::vector<ArcOffset> offsets,
                      std::vector<NodeId> neighbors, bool undirected) {
  Graph g;
  g.num_nodes_ = num_nodes;
  g.undirected_ = undirected;
  g.offsets_ = std::move(offsets);
  g.neighbors_ = std::move(neighbors);
  g.validate();
  return g;
}

Graph Graph::from_edges(NodeId num_nodes, std::span<const Edge> edges,
                        std::span<const NodeId> self_loops) {
  std::vector<Arc> arcs;
  arcs.reserve(2 * edges.size() + self_loops.size());
  for (const Edge& e : edges) {
    arcs.push_back({e.u, e.v});
    if (e.u != e.v) arcs.push_back({e.v, e.u});
  }
  for (NodeId s : self_loops) arcs.push_back({s, s});
  return from_arcs(num_nodes, std::move(arcs), true);
}

void Graph::validate() const {
  if (offsets_.size() != static_cast<std::size_t>(num_nodes_) + 1)
    throw Error(ErrorCode::LengthMismatch, "offsets length must be num_nodes + 1");
  if (offsets_.front() != 0 || offsets_.back() != neighbors_.size())
    throw Error(ErrorCode::LengthMismatch, "offsets do not span the neighbor array");
  for (NodeId v = 0; v < num_nodes_; ++v) {
    if (offsets_[v] > offsets_[v + 1])
      throw Error(ErrorCode::LengthMismatch, "offsets decrease at node " + std::to_string(v));
    const auto nb = neighbors(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] >= num_nodes_)
        throw Error(ErrorCode::BadId, "neighbor " + std::to_string(nb[i]) + " of node " + std::to_string(v));
      if (i > 0 && nb[i - 1] >= nb[i])
        throw Error(ErrorCode::ParseError,
                    "neighbor list of node " + std::to_string(v) + " is not strictly ascending");
    }
  }
  if (!undirected_) return;
  for (NodeId v = 0; v < num_nodes_; ++v) {
    for (NodeId w : neighbors(v)) {
      if (w != v && !has_arc(w, v))
        throw Error(ErrorCode::AsymmetricGraph,
                    "arc (" + std::to_string(v) + "," + std::to_string(w) + ") has no reverse");
    }
  }
}

bool Graph::has_arc(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Graph Graph::with_topology(const Graph& topology) const {
  Graph g = topology;
  g.features = features;
  g.labels = labels;
  g.num_classes = num_classes;
  g.years = years;
  g.sensitive = sensitive;
  return g;
}

std::vector<std::uint32_t> compute_degrees(const Graph& graph) {
  std::vector<std::uint32_t> deg(graph.num_nodes());
  for (NodeId v = 0; v < graph.num_nodes(); ++v) deg[v] = graph.degree(v);
  return deg;
}

CanonicalEdges canonical_undirected_edges(const Graph& graph) {
  if (!graph.undirected()) throw Error(ErrorCode::DirectedGraph, "canonical edges need an undirected graph");
  CanonicalEdges out;
  out.edges.reserve(graph.num_arcs() / 2);
  for (NodeId u = 0; u < graph.num_nodes(); ++u) {
    for (NodeId v : graph.neighbors(u)) {
      if (v == u)
        out.self_loops.push_back(u);
      else if (u < v)
        out.edges.push_back({u, v});
    }
  }
  return out;
}

Graph symmetrized(const Graph& graph) {
  if (graph.undirected()) return graph;
  std::vector<Arc> arcs;
  arcs.reserve(2 * graph.num_arcs());
  for (NodeId u = 0; u < graph.num_nodes(); ++u) {
    for (NodeId v : graph.neighbors(u)) {
      arcs.push_back({u, v});
      arcs.push_back({v, u});
    }
  }
  return graph.with_topology(Graph::from_arcs(graph.num_nodes(), std::move(arcs), true));
}

// ---------------------------------------------------------------------------
// TripleStore, GraphCollection, SplitAssignment

TripleStore TripleStore::make(std::uint32_t num_entities, std::uint32_t num_relations,
                              std::vector<Triple> triples) {
  for (const Triple& t : triples) {
    if (t.head >= num_entities || t.tail >= num_entities || t.relation >= num_relations)
      throw Error(ErrorCode::BadId, "triple (" + std::to_string(t.head) + "," + std::to_string(t.relation) +
                                        "," + std::to_string(t.tail) + ") out of range");
  }
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return TripleStore{num_entities, num_relations, std::move(triples)};
}

bool TripleStore::contains(const Triple& t) const {
  return std::binary_search(triples.begin(), triples.end(), t);
}

void GraphCollection::validate() const {
  if (static_cast<std::size_t>(graph_labels.rows()) != graphs.size())
    throw Error(ErrorCode::LengthMismatch, "graph label rows must equal the number of graphs");
  if (!scaffold_ids.empty() && scaffold_ids.size() != graphs.size())
    throw Error(ErrorCode::LengthMismatch, "scaffold ids must cover every graph");
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::train: return "train";
    case Role::val: return "val";
    case Role::test: return "test";
    case Role::ood_val: return "ood_val";
    case Role::ood_test: return "ood_test";
    case Role::excluded: return "excluded";
  }
  return "excluded";
}

Role parse_role(std::string_view text) {
  for (Role r : {Role::train, Role::val, Role::test, Role::ood_val, Role::ood_test, Role::excluded})
    if (to_string(r) == text) return r;
  throw Error(ErrorCode::ParseError, "unknown role '" + std::string(text) + "'");
}

std::vector<std::uint32_t> SplitAssignment::units_with(Role role) const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < roles.size(); ++i)
    if (roles[i] == role) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

std::size_t SplitAssignment::count(Role role) const {
  return static_cast<std::size_t>(std::count(roles.begin(), roles.end(), role));
}

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::node_graph: return "node_graph";
    case DatasetKind::triples: return "triples";
    case DatasetKind::graph_collection: return "graph_collection";
  }
  return "node_graph";
}

// ---------------------------------------------------------------------------
// Manifest ingestion

namespace {

struct Manifest {
  json doc;
  fs::path base;

  bool has(const char* key) const { return doc.contains(key) && !doc[key].is_null(); }
  fs::path path(const char* key) const { return base / doc.at(key).get<std::string>(); }
  template <typename T>
  T get(const char* key, T fallback) const {
    return has(key) ? doc.at(key).get<T>() : fallback;
  }
  template <typename T>
  T require(const char* key) const {
    if (!has(key)) throw Error(ErrorCode::ParseError, std::string("manifest lacks '") + key + "'");
    return doc.at(key).get<T>();
  }
};

std::vector<Arc> read_arcs(const fs::path& path) {
  std::vector<Arc> arcs;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() < 2) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    const auto u = io::parse_u64(f[0], "arc source");
    const auto v = io::parse_u64(f[1], "arc target");
    if (u > UINT32_MAX || v > UINT32_MAX) throw Error(ErrorCode::BadId, "arc id exceeds 32 bits");
    arcs.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  });
  return arcs;
}

void check_finite(const FeatureMatrix& x, const fs::path& path) {
  if (!x.allFinite()) throw Error(ErrorCode::NonFiniteFeature, path.string());
}

void load_node_labels(Graph& g, const fs::path& path, ClassId declared_classes) {
  const NodeId n = g.num_nodes();
  std::vector<std::int64_t> raw(n, -1);
  std::int64_t max_label = -1;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() < 2) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    const auto node = io::parse_u64(f[0], "label node id");
    if (node >= n) throw Error(ErrorCode::BadId, "label for node " + std::to_string(node));
    const auto label = io::parse_i64(f[1], "label");
    if (label < 0) throw Error(ErrorCode::ParseError, "negative label at " + path.string());
    raw[node] = label;
    max_label = std::max(max_label, label);
  });
  const ClassId classes = declared_classes > 0 ? declared_classes : static_cast<ClassId>(max_label + 1);
  if (max_label >= static_cast<std::int64_t>(classes))
    throw Error(ErrorCode::BadId, "label " + std::to_string(max_label) + " >= num_classes");
  g.num_classes = classes;
  g.labels.assign(n, classes);
  for (NodeId v = 0; v < n; ++v)
    if (raw[v] >= 0) g.labels[v] = static_cast<ClassId>(raw[v]);
}

// Meta records: node_id<TAB>year<TAB>sensitive, "-" marks an absent field.
void load_meta(Graph& g, const fs::path& path) {
  const NodeId n = g.num_nodes();
  std::vector<std::int32_t> years(n, kNoYear);
  std::vector<std::int8_t> sensitive(n, kNoSensitive);
  bool any_year = false;
  bool any_sensitive = false;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() < 3) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    const auto node = io::parse_u64(f[0], "meta node id");
    if (node >= n) throw Error(ErrorCode::BadId, "meta for node " + std::to_string(node));
    if (f[1] != "-") {
      years[node] = static_cast<std::int32_t>(io::parse_i64(f[1], "year"));
      any_year = true;
    }
    if (f[2] != "-") {
      const auto s = io::parse_i64(f[2], "sensitive attribute");
      if (s != 0 && s != 1) throw Error(ErrorCode::ParseError, "sensitive attribute must be 0 or 1");
      sensitive[node] = static_cast<std::int8_t>(s);
      any_sensitive = true;
    }
  });
  if (any_year) g.years = std::move(years);
  if (any_sensitive) g.sensitive = std::move(sensitive);
}

Graph load_node_graph(const Manifest& m, std::size_t& num_units) {
  const auto n = m.require<std::uint64_t>("num_nodes");
  if (n > UINT32_MAX) throw Error(ErrorCode::BadId, "num_nodes exceeds 32 bits");
  const bool undirected = m.get<bool>("undirected", true);
  std::vector<Arc> arcs = m.has("edges") ? read_arcs(m.path("edges")) : std::vector<Arc>{};
  const std::size_t listed = arcs.size();
  Graph g = Graph::from_arcs(static_cast<NodeId>(n), std::move(arcs), undirected);
  if (g.num_arcs() != listed)
    log::warn(m.path("edges").string() + ": dropped " + std::to_string(listed - g.num_arcs()) + " duplicate arcs");
  if (m.has("features")) {
    FeatureMatrix x = io::read_features(m.path("features"));
    if (static_cast<std::uint64_t>(x.rows()) != n)
      throw Error(ErrorCode::LengthMismatch, "feature rows != num_nodes");
    if (m.has("feature_dim") && static_cast<std::uint64_t>(x.cols()) != m.require<std::uint64_t>("feature_dim"))
      throw Error(ErrorCode::LengthMismatch, "feature cols != feature_dim");
    check_finite(x, m.path("features"));
    g.features = std::move(x);
  }
  if (m.has("labels")) load_node_labels(g, m.path("labels"), m.get<ClassId>("num_classes", 0));
  if (m.has("meta")) load_meta(g, m.path("meta"));
  num_units = n;
  return g;
}

TripleStore load_triples(const Manifest& m, std::size_t& num_units) {
  const auto ents = m.require<std::uint32_t>("num_entities");
  const auto rels = m.require<std::uint32_t>("num_relations");
  std::vector<Triple> triples;
  const fs::path path = m.path("triples");
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() < 3) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    const auto h = io::parse_u64(f[0], "head");
    const auto r = io::parse_u64(f[1], "relation");
    const auto t = io::parse_u64(f[2], "tail");
    if (h >= ents || t >= ents || r >= rels) throw Error(ErrorCode::BadId, path.string() + ":" + std::to_string(line));
    triples.push_back({static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(t)});
  });
  num_units = ents;
  return TripleStore::make(ents, rels, std::move(triples));
}

// graphs file: graph_id<TAB>num_atoms; edges: graph_id<TAB>u<TAB>v with
// graph-local atom ids; features: all atoms stacked in graph order;
// labels: graph_id<TAB>task0<TAB>task1... ("nan" = missing);
// scaffolds: graph_id<TAB>group.
GraphCollection load_collection(const Manifest& m, std::size_t& num_units) {
  const fs::path graphs_path = m.path("graphs");
  std::map<std::uint64_t, std::uint64_t> sizes;
  io::for_each_record(graphs_path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() < 2) throw Error(ErrorCode::ParseError, graphs_path.string() + ":" + std::to_string(line));
    sizes[io::parse_u64(f[0], "graph id")] = io::parse_u64(f[1], "atom count");
  });
  const std::size_t count = sizes.size();
  if (!sizes.empty() && sizes.rbegin()->first != count - 1)
    throw Error(ErrorCode::LengthMismatch, "graph ids must be 0..G-1");
  const bool undirected = m.get<bool>("undirected", true);

  std::vector<std::vector<Arc>> arcs(count);
  if (m.has("edges")) {
    const fs::path p = m.path("edges");
    io::for_each_record(p, [&](std::span<const std::string_view> f, std::size_t line) {
      if (f.size() < 3) throw Error(ErrorCode::ParseError, p.string() + ":" + std::to_string(line));
      const auto gid = io::parse_u64(f[0], "graph id");
      if (gid >= count) throw Error(ErrorCode::BadId, "graph id " + std::to_string(gid));
      arcs[gid].push_back({static_cast<NodeId>(io::parse_u64(f[1], "atom")),
                           static_cast<NodeId>(io::parse_u64(f[2], "atom"))});
    });
  }
  GraphCollection c;
  c.graphs.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    c.graphs.push_back(Graph::from_arcs(static_cast<NodeId>(sizes[i]), std::move(arcs[i]), undirected));

  if (m.has("features")) {
    const FeatureMatrix x = io::read_features(m.path("features"));
    check_finite(x, m.path("features"));
    std::uint64_t total = 0;
    for (const auto& [id, n] : sizes) total += n;
    if (static_cast<std::uint64_t>(x.rows()) != total)
      throw Error(ErrorCode::LengthMismatch, "feature rows != total atom count");
    Eigen::Index row = 0;
    for (Graph& g : c.graphs) {
      g.features = x.middleRows(row, g.num_nodes());
      row += g.num_nodes();
    }
  }

  const auto tasks = m.get<std::uint32_t>("num_tasks", 1);
  c.graph_labels = Eigen::MatrixXf::Constant(static_cast<Eigen::Index>(count), tasks, std::nanf(""));
  if (m.has("labels")) {
    const fs::path p = m.path("labels");
    io::for_each_record(p, [&](std::span<const std::string_view> f, std::size_t line) {
      const auto gid = io::parse_u64(f[0], "graph id");
      if (gid >= count) throw Error(ErrorCode::BadId, "label for graph " + std::to_string(gid));
      if (f.size() != tasks + 1) throw Error(ErrorCode::LengthMismatch, p.string() + ":" + std::to_string(line));
      for (std::uint32_t t = 0; t < tasks; ++t) {
        const auto v = f[t + 1];
        c.graph_labels(static_cast<Eigen::Index>(gid), t) =
            (v == "nan" || v.empty()) ? std::nanf("") : static_cast<float>(io::parse_f64(v, "graph label"));
      }
    });
  }
  if (m.has("scaffolds")) {
    const fs::path p = m.path("scaffolds");
    std::vector<std::int64_t> ids(count, -1);
    io::for_each_record(p, [&](std::span<const std::string_view> f, std::size_t line) {
      if (f.size() < 2) throw Error(ErrorCode::ParseError, p.string() + ":" + std::to_string(line));
      const auto gid = io::parse_u64(f[0], "graph id");
      if (gid >= count) throw Error(ErrorCode::BadId, "scaffold for graph " + std::to_string(gid));
      ids[gid] = io::parse_i64(f[1], "scaffold id");
    });
    if (std::find(ids.begin(), ids.end(), -1) != ids.end())
      throw Error(ErrorCode::MissingScaffoldId, "scaffold ids must cover every graph");
    c.scaffold_ids = std::move(ids);
  }
  c.validate();
  num_units = count;
  return c;
}

DatasetKind parse_kind(const std::string& s) {
  if (s == "node_graph") return DatasetKind::node_graph;
  if (s == "triples") return DatasetKind::triples;
  if (s == "graph_collection") return DatasetKind::graph_collection;
  throw Error(ErrorCode::ParseError, "unknown dataset kind '" + s + "'");
}

}  // namespace

Dataset load_dataset(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) throw Error(ErrorCode::MissingFile, manifest_path.string());
  Manifest m;
  m.base = manifest_path.parent_path();
  try {
    m.doc = json::parse(io::read_text(manifest_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, manifest_path.string() + ": " + e.what());
  }
  Dataset ds;
  ds.name = m.get<std::string>("name", manifest_path.parent_path().filename().string());
  ds.kind = parse_kind(m.get<std::string>("kind", "node_graph"));
  std::size_t units = 0;
  try {
    switch (ds.kind) {
      case DatasetKind::node_graph: ds.graph = load_node_graph(m, units); break;
      case DatasetKind::triples: ds.triples = load_triples(m, units); break;
      case DatasetKind::graph_collection: ds.collection = load_collection(m, units); break;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, manifest_path.string() + ": " + e.what());
  }
  ds.split = m.has("split") ? io::read_split(m.path("split"), units) : SplitAssignment(units);
  return ds;
}

namespace {

std::string arcs_text(const Graph& g, std::string_view prefix) {
  std::string out;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      out += prefix;
      out += std::to_string(u);
      out += '\t';
      out += std::to_string(v);
      out += '\n';
    }
  }
  return out;
}

}  // namespace

fs::path save_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  json m;
  m["name"] = ds.name;
  m["kind"] = std::string(to_string(ds.kind));
  std::size_t units = 0;
  if (ds.kind == DatasetKind::node_graph) {
    const Graph& g = ds.graph;
    units = g.num_nodes();
    m["num_nodes"] = g.num_nodes();
    m["undirected"] = g.undirected();
    m["edges"] = "edges.tsv";
    io::write_text(dir / "edges.tsv", arcs_text(g, ""));
    if (g.has_features()) {
      m["features"] = "features.bin";
      m["feature_dim"] = g.features->cols();
      io::write_features(dir / "features.bin", *g.features);
    }
    if (g.has_labels()) {
      m["labels"] = "labels.tsv";
      m["num_classes"] = g.num_classes;
      std::string out;
      for (NodeId v = 0; v < g.num_nodes(); ++v)
        if (g.is_labeled(v)) out += std::to_string(v) + '\t' + std::to_string(g.labels[v]) + '\n';
      io::write_text(dir / "labels.tsv", out);
    }
    if (g.has_years() || g.has_sensitive()) {
      m["meta"] = "meta.tsv";
      std::string out;
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const bool y = g.has_years() && g.years[v] != kNoYear;
        const bool s = g.has_sensitive() && g.sensitive[v] != kNoSensitive;
        if (!y && !s) continue;
        out += std::to_string(v) + '\t' + (y ? std::to_string(g.years[v]) : "-") + '\t' +
               (s ? std::to_string(g.sensitive[v]) : "-") + '\n';
      }
      io::write_text(dir / "meta.tsv", out);
    }
  } else if (ds.kind == DatasetKind::triples) {
    units = ds.triples.num_entities;
    m["num_entities"] = ds.triples.num_entities;
    m["num_relations"] = ds.triples.num_relations;
    m["triples"] = "triples.tsv";
    std::string out;
    for (const Triple& t : ds.triples.triples)
      out += std::to_string(t.head) + '\t' + std::to_string(t.relation) + '\t' + std::to_string(t.tail) + '\n';
    io::write_text(dir / "triples.tsv", out);
  } else {
    const GraphCollection& c = ds.collection;
    units = c.graphs.size();
    m["graphs"] = "graphs.tsv";
    m["edges"] = "edges.tsv";
    m["labels"] = "labels.tsv";
    m["num_tasks"] = c.graph_labels.cols();
    m["undirected"] = c.graphs.empty() || c.graphs.front().undirected();
    std::string graphs, edges, labels;
    Eigen::Index atoms = 0;
    bool features = !c.graphs.empty();
    for (std::size_t i = 0; i < c.graphs.size(); ++i) {
      const Graph& g = c.graphs[i];
      graphs += std::to_string(i) + '\t' + std::to_string(g.num_nodes()) + '\n';
      edges += arcs_text(g, std::to_string(i) + '\t');
      labels += std::to_string(i);
      for (Eigen::Index t = 0; t < c.graph_labels.cols(); ++t) {
        const float v = c.graph_labels(static_cast<Eigen::Index>(i), t);
        labels += '\t';
        labels += std::isnan(v) ? std::string("nan") : io::format_double(v);
      }
      labels += '\n';
      atoms += g.num_nodes();
      features = features && g.has_features();
    }
    io::write_text(dir / "graphs.tsv", graphs);
    io::write_text(dir / "edges.tsv", edges);
    io::write_text(dir / "labels.tsv", labels);
    if (features) {
      FeatureMatrix x(atoms, c.graphs.front().features->cols());
      Eigen::Index row = 0;
      for (const Graph& g : c.graphs) {
        x.middleRows(row, g.num_nodes()) = *g.features;
        row += g.num_nodes();
      }
      m["features"] = "features.bin";
      io::write_features(dir / "features.bin", x);
    }
    if (!c.scaffold_ids.empty()) {
      m["scaffolds"] = "scaffolds.tsv";
      std::string out;
      for (std::size_t i = 0; i < c.scaffold_ids.size(); ++i)
        out += std::to_string(i) + '\t' + std::to_string(c.scaffold_ids[i]) + '\n';
      io::write_text(dir / "scaffolds.tsv", out);
    }
  }
  if (ds.split.size() == units && units > 0) {
    m["split"] = "split.tsv";
    io::write_split(dir / "split.tsv", ds.split);
  }
  const fs::path manifest = dir / "manifest.json";
  io::write_text(manifest, m.dump(2) + "\n");
  return manifest;
}

}  // namespace gsh
