// stress: command-line front end for the gsh operators and pipeline.

#include "gsh/corruption.hpp"
#include "gsh/error.hpp"
#include "gsh/fairness.hpp"
#include "gsh/imbalance.hpp"
#include "gsh/interpret.hpp"
#include "gsh/io.hpp"
#include "gsh/log.hpp"
#include "gsh/ood_splits.hpp"
#include "gsh/pipeline.hpp"
#include "gsh/refmodel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace gsh;

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string pct_text(double x) { return io::format_double(100.0 * x); }

std::string opt_text(const std::optional<double>& x) { return x ? io::format_double(*x) : "undefined"; }

const Graph& node_graph(const Dataset& ds) {
  if (ds.kind != DatasetKind::node_graph)
    throw Error(ErrorCode::BadArgument, ds.name + " is not a node-level graph dataset");
  return ds.graph;
}

std::vector<NodeId> labeled_with(const Dataset& ds, Role role) {
  std::vector<NodeId> out;
  for (auto v : ds.split.units_with(role))
    if (ds.graph.is_labeled(v)) out.push_back(v);
  return out;
}

void write_sidecar(const fs::path& path, const nlohmann::ordered_json& doc) { io::write_text(path, doc.dump(2) + "\n"); }

// ---- subcommands -----------------------------------------------------------

struct CorruptArgs {
  std::string dataset, channel, out;
  std::size_t severity = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

void corrupt(const CorruptArgs& a) {
  Dataset ds = load_dataset(a.dataset);
  const bool feature = a.channel == "feature";
  const auto schedule = SeveritySchedule::defaults(feature ? CorruptionChannel::feature_noise : CorruptionChannel::edge_deletion);
  const double level = schedule.level(a.severity);
  const std::string op = feature ? "feature_noise" : "edge_deletion";
  const StreamKey key = cell_key("corruption", ds.name, op, a.severity, a.seed);
  Graph& g = ds.graph;
  if (ds.kind != DatasetKind::node_graph) throw Error(ErrorCode::BadArgument, "corruption needs a node-level graph");
  if (feature) {
    if (!g.has_features()) throw Error(ErrorCode::BadArgument, ds.name + " has no features");
    g.features = feature_noise(*g.features, ds.split.units_with(Role::train), level, key, a.workers);
  } else {
    Graph perturbed = edge_delete(g, level, key, a.workers);
    g = std::move(perturbed);
  }
  save_dataset(ds, a.out);
  nlohmann::ordered_json side;
  side["axis"] = "corruption";
  side["dataset"] = ds.name;
  side["op"] = op;
  side["severity_index"] = a.severity;
  side["level"] = level;
  side["seed"] = a.seed;
  side["key"] = hex(key.value);
  write_sidecar(fs::path(a.out) / "provenance.json", side);
}

struct SplitArgs {
  std::string mechanism, dataset, out;
  std::uint64_t seed = 0;
};

void split(const SplitArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const fs::path out(a.out);
  const StreamKey key = cell_key("ood", ds.name, a.mechanism == "kg" ? "inductive_entity" : "scaffold_split", 0, a.seed);
  if (a.mechanism == "degree" || a.mechanism == "temporal") {
    const Graph& g = node_graph(ds);
    std::vector<NodeId> labeled;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (g.is_labeled(v)) labeled.push_back(v);
    if (a.mechanism == "temporal" && !g.has_years()) throw Error(ErrorCode::MissingYear, ds.name + " has no years");
    io::write_split(out / "split.tsv", a.mechanism == "degree" ? degree_shift_split(g, labeled)
                                                              : temporal_split(g.years, labeled));
  } else if (a.mechanism == "scaffold") {
    if (ds.kind != DatasetKind::graph_collection) throw Error(ErrorCode::BadArgument, "scaffold split needs a graph collection");
    const auto res = scaffold_split(ds.collection.scaffold_ids, {}, key);
    for (const auto& w : res.warnings) log::warn(w);
    io::write_split(out / "split.tsv", res.split);
  } else {
    if (ds.kind != DatasetKind::triples) throw Error(ErrorCode::BadArgument, "kg split needs a triple store");
    const auto res = inductive_entity_split(ds.triples, 0.75, key);
    SplitAssignment roles(ds.triples.num_entities);
    for (auto e : res.train_entities) roles.roles[e] = Role::train;
    for (auto e : res.test_entities) roles.roles[e] = Role::test;
    io::write_split(out / "split.tsv", roles);
    write_kg_queries(out / "queries.tsv", res);
    std::string train;
    for (const Triple& t : res.train_triples)
      train += std::to_string(t.head) + '\t' + std::to_string(t.relation) + '\t' + std::to_string(t.tail) + '\n';
    io::write_text(out / "train_triples.tsv", train);
    log::info("kg split discarded " + std::to_string(res.discarded) + " triples");
  }
}

struct ImbalanceArgs {
  std::string dataset, out;
  double rho = 10;
  std::uint64_t seed = 0;
};

void imbalance(const ImbalanceArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const Graph& g = node_graph(ds);
  const auto by_class = train_units_by_class(ds.split, g.labels, g.num_classes);
  std::vector<std::size_t> counts;
  for (const auto& u : by_class) counts.push_back(u.size());
  const ImbalanceSpec spec = make_imbalance_spec(counts, a.rho);
  const StreamKey key = cell_key("imbalance", ds.name, "step_downsample", rho_index(a.rho), a.seed);
  const auto kept = step_downsample(by_class, spec, key);
  io::write_split(fs::path(a.out) / "split.tsv", apply_downsample(ds.split, kept));
  nlohmann::ordered_json side;
  side["rho"] = a.rho;
  side["minor_classes"] = spec.minor_classes;
  side["major_classes"] = spec.major_classes;
  side["n_major"] = spec.n_major;
  side["targets"] = spec.targets;
  side["seed"] = a.seed;
  side["key"] = hex(key.value);
  write_sidecar(fs::path(a.out) / "imbalance_spec.json", side);
}

struct FairnessArgs {
  std::string dataset, kind, pred, out;
  double threshold = 0.5;
  double q = kHeadTailQuantile;
};

void fairness(const FairnessArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const Graph& g = node_graph(ds);
  const PredictionTable preds = read_prediction_table(a.pred);
  const auto test = labeled_with(ds, Role::test);
  std::string out;
  if (a.kind == "structural") {
    const auto groups = head_tail_groups(test, compute_degrees(g), a.q);
    const double head = accuracy(preds, g.labels, g.num_classes, groups.head);
    const double tail = accuracy(preds, g.labels, g.num_classes, groups.tail);
    out = "acc_head\t" + pct_text(head) + "\nacc_tail\t" + pct_text(tail) + "\ngap\t" +
          io::format_double(100.0 * head - 100.0 * tail) + "\n";
  } else {
    if (!g.has_sensitive()) throw Error(ErrorCode::BadArgument, ds.name + " has no sensitive attribute");
    if (g.num_classes != 2) throw Error(ErrorCode::BadArgument, "demographic gaps need binary labels");
    std::vector<std::uint32_t> units;
    for (auto v : test)
      if (g.sensitive[v] != kNoSensitive) units.push_back(v);
    const auto binary = binary_predictions(preds, units, a.threshold);
    std::vector<double> scores;
    std::vector<std::uint8_t> labels, sens;
    for (auto u : units) {
      scores.push_back(preds.positive_score(u));
      labels.push_back(g.labels[u] == 1 ? 1 : 0);
      sens.push_back(static_cast<std::uint8_t>(g.sensitive[u]));
    }
    const auto gaps = demographic_gaps(binary, scores, labels, sens);
    out = "dsp\t" + opt_text(gaps.statistical_parity) + "\ndeo\t" + opt_text(gaps.equal_opportunity) + "\ndutil\t" +
          opt_text(gaps.utility) + "\n";
  }
  io::write_text(a.out, out);
}

void refmodel(const std::string& dataset, const std::string& out, unsigned workers) {
  const Dataset ds = load_dataset(dataset);
  const Graph& g = node_graph(ds);
  const auto tl = train_label_view(g.labels, g.num_classes, ds.split.units_with(Role::train));
  write_prediction_table(out, propagate_predict(g, tl, g.num_classes, {}, workers));
}

struct EmitArgs {
  std::string dataset, saliency, out;
  std::vector<double> k{kSparsityLevels.begin(), kSparsityLevels.end()};
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

void interpret_emit(const EmitArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const SaliencyTable saliency = read_saliency(a.saliency);
  const StreamKey key = cell_key("interpretation", ds.name, "random_rank", 0, a.seed);
  std::vector<AblationEntry> entries;
  if (ds.kind == DatasetKind::node_graph) {
    entries = node_ablation_manifests(ds.graph, labeled_with(ds, Role::test), saliency, a.k, key, a.workers);
  } else if (ds.kind == DatasetKind::graph_collection) {
    for (auto gid : ds.split.units_with(Role::test)) {
      const Graph& mol = ds.collection.graphs[gid];
      std::vector<double> scores;
      for (NodeId atom = 0; atom < mol.num_nodes(); ++atom) {
        const auto s = saliency.find(SaliencyTable::pack(gid, atom));
        if (!s) throw Error(ErrorCode::MissingNodeScore, "graph " + std::to_string(gid) + " atom " + std::to_string(atom));
        scores.push_back(*s);
      }
      if (!scores.empty()) entries.push_back(atom_ablation_entry(gid, mol, scores, a.k, key));
    }
  } else {
    throw Error(ErrorCode::BadArgument, "interpretation needs graphs");
  }
  write_manifests(a.out, entries);
}

void interpret_score(const std::string& manifest, const std::string& probs, const std::string& out) {
  const auto entries = read_manifests(manifest);
  const auto summary = score_fidelity(entries, read_condition_probs(probs));
  std::string text = "# target\tranking\tk\tfid_plus\tfid_minus\tchar\n";
  for (const FidelityRow& r : summary.rows)
    text += std::to_string(r.target) + '\t' + std::string(to_string(r.ranking)) + '\t' + io::format_double(r.k_percent) +
            '\t' + io::format_double(r.record.fid_plus) + '\t' + io::format_double(r.record.fid_minus) + '\t' +
            io::format_double(r.record.characterization) + '\n';
  for (const auto& [cond, m] : summary.means)
    text += "mean\t" + cond + '\t' + io::format_double(m[0]) + '\t' + io::format_double(m[1]) + '\t' +
            io::format_double(m[2]) + '\n';
  for (const auto& [cond, m] : summary.means) {
    if (cond.rfind("saliency:", 0) != 0) continue;
    const auto rnd = summary.means.find("random:" + cond.substr(9));
    if (rnd != summary.means.end())
      text += "lift\t" + cond.substr(9) + '\t' + io::format_double(m[2] - rnd->second[2]) + '\n';
  }
  io::write_text(out, text);
}

void report(const std::string& in, const std::string& out) {
  const auto values = read_results_dir(in);
  emit_report(assemble_report(values, {"", 0, kToolVersion}), out);
}

int run(const std::string& config, std::uint64_t seed, unsigned workers, const std::string& out) {
  const PipelineConfig cfg = load_pipeline_config(config);
  const PipelineResult res = run_pipeline(cfg, out, {seed, workers});
  for (const CellError& e : res.errors)
    std::cerr << "cell " << e.key.axis << '/' << e.key.subcondition << '/' << e.key.dataset << '/' << e.key.method
              << "/seed" << e.seed << ": " << e.message << '\n';
  if (!res.ok()) {
    std::cerr << "PartialFailure: " << res.errors.size() << " cell error(s), see " << (fs::path(out) / "errors.log") << '\n';
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph safety stress-testing toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

  CorruptArgs ca;
  auto* c = app.add_subcommand("corrupt", "Apply feature noise or edge deletion");
  c->add_option("--dataset", ca.dataset, "Dataset manifest")->required()->check(CLI::ExistingFile);
  c->add_option("--channel", ca.channel)->required()->check(CLI::IsMember({"feature", "edge"}));
  c->add_option("--severity-index", ca.severity, "0 (clean) to 5")->required();
  c->add_option("--seed", ca.seed);
  c->add_option("--workers", ca.workers)->check(CLI::PositiveNumber);
  c->add_option("--out", ca.out, "Output directory")->required();

  SplitArgs sa;
  auto* s = app.add_subcommand("split", "Build a distribution-shift split");
  s->add_option("--mechanism", sa.mechanism)->required()->check(CLI::IsMember({"degree", "temporal", "scaffold", "kg"}));
  s->add_option("--dataset", sa.dataset)->required()->check(CLI::ExistingFile);
  s->add_option("--seed", sa.seed);
  s->add_option("--out", sa.out, "Output directory")->required();

  ImbalanceArgs ia;
  auto* im = app.add_subcommand("imbalance", "Step-imbalance the training split");
  im->add_option("--dataset", ia.dataset)->required()->check(CLI::ExistingFile);
  im->add_option("--rho", ia.rho)->required();
  im->add_option("--seed", ia.seed);
  im->add_option("--out", ia.out, "Output directory")->required();

  FairnessArgs fa;
  auto* f = app.add_subcommand("fairness", "Structural or demographic group gaps");
  f->add_option("--dataset", fa.dataset)->required()->check(CLI::ExistingFile);
  f->add_option("--kind", fa.kind)->required()->check(CLI::IsMember({"structural", "demographic"}));
  f->add_option("--pred", fa.pred)->required()->check(CLI::ExistingFile);
  f->add_option("--threshold", fa.threshold);
  f->add_option("--q", fa.q);
  f->add_option("--out", fa.out)->required();

  std::string rm_dataset, rm_out;
  unsigned rm_workers = hw;
  auto* r = app.add_subcommand("refmodel", "Label-propagation reference predictions");
  r->add_option("--dataset", rm_dataset)->required()->check(CLI::ExistingFile);
  r->add_option("--workers", rm_workers)->check(CLI::PositiveNumber);
  r->add_option("--out", rm_out)->required();

  auto* in = app.add_subcommand("interpret", "Ablation manifests and fidelity scoring");
  in->require_subcommand(1);
  EmitArgs ea;
  auto* emit = in->add_subcommand("emit", "Write ablation manifests");
  emit->add_option("--dataset", ea.dataset)->required()->check(CLI::ExistingFile);
  emit->add_option("--saliency", ea.saliency)->required()->check(CLI::ExistingFile);
  emit->add_option("--k", ea.k)->delimiter(',');
  emit->add_option("--seed", ea.seed);
  emit->add_option("--workers", ea.workers)->check(CLI::PositiveNumber);
  emit->add_option("--out", ea.out)->required();
  std::string sc_manifest, sc_probs, sc_out;
  auto* score = in->add_subcommand("score", "Score fidelity from condition probabilities");
  score->add_option("--manifest", sc_manifest)->required()->check(CLI::ExistingDirectory);
  score->add_option("--probs", sc_probs)->required()->check(CLI::ExistingFile);
  score->add_option("--out", sc_out)->required();

  std::string rp_in, rp_out;
  auto* rp = app.add_subcommand("report", "Aggregate per-seed results");
  rp->add_option("--in", rp_in)->required()->check(CLI::ExistingDirectory);
  rp->add_option("--out", rp_out)->required();

  std::string run_config, run_out;
  std::uint64_t run_seed = 0;
  unsigned run_workers = 1;
  auto* ru = app.add_subcommand("run", "Run every configured cell");
  ru->add_option("--config", run_config)->required();
  ru->add_option("--seed", run_seed, "Master seed");
  ru->add_option("--workers", run_workers)->check(CLI::PositiveNumber);
  ru->add_option("--out", run_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*c) corrupt(ca);
    else if (*s) split(sa);
    else if (*im) imbalance(ia);
    else if (*f) fairness(fa);
    else if (*r) refmodel(rm_dataset, rm_out, rm_workers);
    else if (*emit) interpret_emit(ea);
    else if (*score) interpret_score(sc_manifest, sc_probs, sc_out);
    else if (*rp) report(rp_in, rp_out);
    else if (*ru) return run(run_config, run_seed, run_workers, run_out);
  } catch (const std::exception& e) {
    std::cerr << "stress: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
