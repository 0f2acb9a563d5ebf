#include "gsh/pipeline.hpp"
#include "gsh/corruption.hpp"
#include "gsh/error.hpp"
#include "gsh/fairness.hpp"
#include "gsh/imbalance.hpp"
#include "gsh/interpret.hpp"
#include "gsh/io.hpp"
#include "gsh/log.hpp"
#include "gsh/ood_splits.hpp"
#include "gsh/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>

namespace gsh {
namespace fs = std::filesystem;

PipelineConfig::PipelineConfig()
    : feature_noise_levels(kFeatureNoiseLevels.begin(), kFeatureNoiseLevels.end()),
      edge_deletion_levels(kEdgeDeletionLevels.begin(), kEdgeDeletionLevels.end()),
      imbalance_ratios(kImbalanceRatios.begin(), kImbalanceRatios.end()),
      sparsity_levels(kSparsityLevels.begin(), kSparsityLevels.end()) {}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <typename T>
std::vector<T> json_list(const nlohmann::json& doc, const char* key, std::vector<T> fallback) {
  if (!doc.contains(key)) return fallback;
  return doc.at(key).get<std::vector<T>>();
}

}  // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::ConfigError, "config not found: " + path.string());
  const std::string text = io::read_text(path);
  PipelineConfig cfg;
  cfg.base_dir = path.parent_path();
  cfg.config_hash = hex64(fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()}));
  try {
    const auto doc = nlohmann::json::parse(text);
    cfg.axes = json_list<std::string>(doc, "axes", kAllAxes);
    for (const auto& a : cfg.axes)
      if (std::find(kAllAxes.begin(), kAllAxes.end(), a) == kAllAxes.end())
        throw Error(ErrorCode::ConfigError, "unknown axis '" + a + "'");
    for (const auto& d : doc.at("datasets")) {
      DatasetConfig dc;
      dc.manifest = cfg.base_dir / d.at("manifest").get<std::string>();
      dc.name = d.value("name", std::string());
      cfg.datasets.push_back(std::move(dc));
    }
    for (const auto& m : doc.at("methods")) {
      MethodConfig mc;
      mc.name = m.at("name").get<std::string>();
      const auto kind = m.value("kind", std::string("external"));
      if (kind == "refmodel") {
        mc.kind = MethodConfig::Kind::refmodel;
        mc.propagation.hops = m.value("hops", 2u);
        mc.propagation.alpha = m.value("alpha", 1.0);
      } else if (kind == "external") {
        mc.kind = MethodConfig::Kind::external;
        mc.predictions = m.value("predictions", std::string());
        mc.saliency = m.value("saliency", std::string());
        mc.interpret_probs = m.value("interpret_probs", std::string());
        mc.feature_consuming = m.value("feature_consuming", true);
        mc.gradient_saliency = m.value("gradient_saliency", true);
      } else {
        throw Error(ErrorCode::ConfigError, "unknown method kind '" + kind + "'");
      }
      cfg.methods.push_back(std::move(mc));
    }
    cfg.seeds = json_list<std::uint64_t>(doc, "seeds", cfg.seeds);
    cfg.feature_noise_levels = json_list<double>(doc, "feature_noise_levels", cfg.feature_noise_levels);
    cfg.edge_deletion_levels = json_list<double>(doc, "edge_deletion_levels", cfg.edge_deletion_levels);
    cfg.imbalance_ratios = json_list<double>(doc, "imbalance_ratios", cfg.imbalance_ratios);
    cfg.sparsity_levels = json_list<double>(doc, "sparsity_levels", cfg.sparsity_levels);
    cfg.head_tail_q = doc.value("head_tail_q", cfg.head_tail_q);
    cfg.threshold = doc.value("threshold", cfg.threshold);
    cfg.kg_train_fraction = doc.value("kg_train_fraction", cfg.kg_train_fraction);
    cfg.kg_filtered = doc.value("kg_filtered", cfg.kg_filtered);
    cfg.max_interpret_targets = doc.value("max_interpret_targets", cfg.max_interpret_targets);
    const auto tie = doc.value("tie_rule", std::string("average"));
    if (tie == "average") cfg.tie_rule = TieRule::average;
    else if (tie == "optimistic") cfg.tie_rule = TieRule::optimistic;
    else if (tie == "pessimistic") cfg.tie_rule = TieRule::pessimistic;
    else throw Error(ErrorCode::ConfigError, "unknown tie_rule '" + tie + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  if (cfg.datasets.empty() || cfg.methods.empty() || cfg.seeds.empty())
    throw Error(ErrorCode::ConfigError, "config needs datasets, methods and seeds");
  return cfg;
}

StreamKey cell_key(std::string_view axis, std::string_view dataset, std::string_view op, std::uint64_t severity_index,
                   std::uint64_t seed, std::uint64_t master_seed) {
  return sub_key(derive_key(axis, dataset, op, severity_index, seed), master_seed);
}

std::uint64_t rho_index(double rho) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw Error(ErrorCode::BadArgument, "imbalance ratio must be >= 1");
  return static_cast<std::uint64_t>(std::llround(rho * 1000.0));
}

Report assemble_report(std::span<const SeedValue> values, Provenance provenance) {
  Report report = build_report(values, std::move(provenance));
  add_lift_cells(report);
  add_cross_dataset(report);
  return report;
}

namespace {

struct LoadedDataset {
  Dataset data;
  std::vector<std::uint32_t> degrees;
  std::vector<NodeId> train;
  std::vector<NodeId> test;
  std::vector<NodeId> labeled;
};

double pct(double x) { return 100.0 * x; }

std::string fmt_level(double v) { return io::format_double(v); }

bool is_undefined_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::EmptyGroup:
    case ErrorCode::DegenerateGroup:
    case ErrorCode::OneClassOnly:
    case ErrorCode::EmptyEvalSet:
    case ErrorCode::EmptyQuerySet:
    case ErrorCode::TooFewClasses:
    case ErrorCode::EmptySubgraph:
    case ErrorCode::AllUndefined:
    case ErrorCode::EmptyLabeledSet:
    case ErrorCode::NoTrainLabels:
      return true;
    default:
      return false;
  }
}

using Values = std::vector<std::optional<double>>;

// One (dataset, method, seed, axis) unit of work.
class Job {
 public:
  Job(const PipelineConfig& cfg, const RunOptions& opts, const LoadedDataset& ds, const MethodConfig& method,
      std::uint64_t seed, std::string axis, fs::path out)
      : cfg_(cfg), opts_(opts), ds_(ds), method_(method), seed_(seed), axis_(std::move(axis)), out_(std::move(out)) {}

  std::vector<SeedValue> values;
  std::vector<CellError> errors;

  void run() {
    switch (ds_.data.kind) {
      case DatasetKind::node_graph: run_node_graph(); break;
      case DatasetKind::graph_collection: run_collection(); break;
      case DatasetKind::triples: run_triples(); break;
    }
  }

 private:
  const Dataset& data() const { return ds_.data; }
  const Graph& graph() const { return ds_.data.graph; }
  bool refmodel() const { return method_.kind == MethodConfig::Kind::refmodel; }

  StreamKey key(std::string_view op, std::uint64_t severity) const {
    return cell_key(axis_, data().name, op, severity, seed_, opts_.master_seed);
  }

  fs::path job_dir(std::string_view kind) const {
    return out_ / kind / data().name / method_.name / ("seed" + std::to_string(seed_));
  }

  void put(const std::string& sub, CellState state, double v = 0.0) {
    values.push_back({{axis_, sub, data().name, method_.name}, seed_, state, state == CellState::value ? v : 0.0});
  }

  void inapplicable(const std::vector<std::string>& subs) {
    for (const auto& s : subs) put(s, CellState::inapplicable);
  }

  // Evaluates a group of related cells; errors mark the whole group undefined
  // and are recorded unless they denote a degenerate evaluation.
  void cells(const std::vector<std::string>& subs, const std::function<Values()>& fn) {
    try {
      const Values v = fn();
      for (std::size_t i = 0; i < subs.size(); ++i)
        put(subs[i], v[i] ? CellState::value : CellState::undefined, v[i].value_or(0.0));
    } catch (const Error& e) {
      for (const auto& s : subs) put(s, CellState::undefined);
      if (!is_undefined_code(e.code()))
        errors.push_back({{axis_, subs.front(), data().name, method_.name}, seed_, e.what()});
      else
        log::info(std::string("undefined cell ") + axis_ + "/" + subs.front() + ": " + e.what());
    } catch (const std::exception& e) {
      for (const auto& s : subs) put(s, CellState::undefined);
      errors.push_back({{axis_, subs.front(), data().name, method_.name}, seed_, e.what()});
    }
  }

  fs::path resolve(const std::string& tmpl, std::string_view condition) const {
    if (tmpl.empty())
      throw Error(ErrorCode::MissingInput, "method " + method_.name + " has no file template for " + std::string(condition));
    std::string s = tmpl;
    auto sub = [&](const std::string& from, const std::string& to) {
      for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) s.replace(p, from.size(), to);
    };
    sub("{dataset}", data().name);
    sub("{method}", method_.name);
    sub("{condition}", std::string(condition));
    sub("{seed}", std::to_string(seed_));
    fs::path p(s);
    return p.is_absolute() ? p : cfg_.base_dir / p;
  }

  fs::path existing(const std::string& tmpl, std::string_view condition) const {
    const fs::path p = resolve(tmpl, condition);
    if (!fs::exists(p))
      throw Error(ErrorCode::MissingInput, "cell " + axis_ + "/" + data().name + "/" + method_.name + "/seed" +
                                               std::to_string(seed_) + " needs " + p.string());
    return p;
  }

  PredictionTable external(std::string_view condition) const {
    return read_prediction_table(existing(method_.predictions, condition));
  }

  PredictionTable refmodel_predict(const Graph& g, std::span<const NodeId> train) const {
    const auto tl = train_label_view(graph().labels, graph().num_classes, train);
    return propagate_predict(g, tl, graph().num_classes, method_.propagation);
  }

  PredictionTable clean_predictions() {
    if (!clean_) clean_ = refmodel() ? refmodel_predict(graph(), ds_.train) : external("clean");
    return *clean_;
  }

  double test_accuracy(const PredictionTable& p, std::span<const NodeId> eval) const {
    return pct(accuracy(p, graph().labels, graph().num_classes, eval));
  }

  // ---- node graphs --------------------------------------------------------

  void run_node_graph() {
    if (axis_ == "corruption") node_corruption();
    else if (axis_ == "ood") node_ood();
    else if (axis_ == "imbalance") node_imbalance();
    else if (axis_ == "fairness") node_fairness();
    else if (axis_ == "interpretation") node_interpretation();
  }

  void node_corruption() {
    for (auto channel : {CorruptionChannel::feature_noise, CorruptionChannel::edge_deletion}) {
      const bool features = channel == CorruptionChannel::feature_noise;
      const std::string tag = features ? "feature_noise" : "edge_deletion";
      const auto& levels = features ? cfg_.feature_noise_levels : cfg_.edge_deletion_levels;
      std::vector<std::string> subs;
      for (std::size_t i = 0; i <= levels.size(); ++i) subs.push_back(tag + ":sev" + std::to_string(i));
      subs.push_back(tag + ":drop");
      if (features && (!graph().has_features() || refmodel() || !method_.feature_consuming)) {
        inapplicable(subs);
        continue;
      }
      cells(subs, [&] {
        Values v;
        for (std::size_t i = 0; i <= levels.size(); ++i) {
          if (i == 0) {
            v.push_back(test_accuracy(clean_predictions(), ds_.test));
          } else if (refmodel()) {
            const Graph perturbed = edge_delete(graph(), levels[i - 1], key(tag, i));
            v.push_back(test_accuracy(refmodel_predict(perturbed, ds_.train), ds_.test));
          } else {
            v.push_back(test_accuracy(external(tag + "_sev" + std::to_string(i)), ds_.test));
          }
        }
        v.push_back(drop_metric(*v.front(), *v.back()));
        return v;
      });
    }
  }

  void shift_cells(const std::string& tag, const std::function<SplitAssignment()>& make_split) {
    const std::vector<std::string> subs{tag + ":acc_id", tag + ":acc_ood", tag + ":drop"};
    cells(subs, [&] {
      const SplitAssignment split = make_split();
      io::write_split(job_dir("splits") / (tag + ".tsv"), split);
      const double id = test_accuracy(clean_predictions(), ds_.test);
      const PredictionTable shifted =
          refmodel() ? refmodel_predict(graph(), split.units_with(Role::train)) : external("ood_" + tag);
      const double ood = test_accuracy(shifted, split.units_with(Role::ood_test));
      return Values{id, ood, id - ood};
    });
  }

  void node_ood() {
    shift_cells("degree", [&] { return degree_shift_split(graph(), ds_.labeled); });
    if (!graph().has_years()) {
      inapplicable({"temporal:acc_id", "temporal:acc_ood", "temporal:drop"});
      return;
    }
    shift_cells("temporal", [&] { return temporal_split(graph().years, ds_.labeled); });
  }

  void node_imbalance() {
    for (std::size_t r = 0; r < cfg_.imbalance_ratios.size(); ++r) {
      const double rho = cfg_.imbalance_ratios[r];
      const std::string tag = "rho" + fmt_level(rho);
      const std::vector<std::string> subs{tag + ":bacc", tag + ":macro_f1", tag + ":major_recall", tag + ":minor_recall"};
      cells(subs, [&] {
        const auto by_class = train_units_by_class(data().split, graph().labels, graph().num_classes);
        std::vector<std::size_t> counts;
        for (const auto& u : by_class) counts.push_back(u.size());
        const ImbalanceSpec spec = make_imbalance_spec(counts, rho);
        const auto kept = step_downsample(by_class, spec, key("step_downsample", rho_index(rho)));
        io::write_split(job_dir("splits") / (tag + ".tsv"), apply_downsample(data().split, kept));
        const PredictionTable p = refmodel() ? refmodel_predict(graph(), kept) : external("imbalance_" + tag);
        const auto cm = evaluate(p, graph().labels, graph().num_classes, ds_.test);
        const auto mm = major_minor_recall(per_class_recall(cm), spec);
        auto scaled = [](std::optional<double> x) -> std::optional<double> {
          if (x) return pct(*x);
          return std::nullopt;
        };
        return Values{pct(balanced_accuracy(cm)), pct(macro_f1(cm)), scaled(mm.major), scaled(mm.minor)};
      });
    }
  }

  void node_fairness() {
    cells({"structural:acc_head", "structural:acc_tail", "structural:gap"}, [&] {
      const auto groups = head_tail_groups(ds_.test, ds_.degrees, cfg_.head_tail_q);
      if (groups.empty()) throw Error(ErrorCode::EmptyGroup, "head/tail groups empty");
      const PredictionTable p = clean_predictions();
      const double head = test_accuracy(p, groups.head);
      const double tail = test_accuracy(p, groups.tail);
      return Values{head, tail, head_tail_gap(head, tail)};
    });
    const std::vector<std::string> demo{"demographic:dsp", "demographic:deo", "demographic:dutil"};
    if (!graph().has_sensitive() || graph().num_classes != 2) {
      inapplicable(demo);
      return;
    }
    cells(demo, [&] {
      std::vector<std::uint32_t> units;
      for (NodeId v : ds_.test)
        if (graph().sensitive[v] != kNoSensitive) units.push_back(v);
      const PredictionTable p = clean_predictions();
      const auto binary = binary_predictions(p, units, cfg_.threshold);
      std::vector<double> scores;
      std::vector<std::uint8_t> labels, sens;
      for (auto u : units) {
        scores.push_back(p.positive_score(u));
        labels.push_back(graph().labels[u] == 1 ? 1 : 0);
        sens.push_back(static_cast<std::uint8_t>(graph().sensitive[u]));
      }
      const auto gaps = demographic_gaps(binary, scores, labels, sens);
      return Values{gaps.statistical_parity, gaps.equal_opportunity, gaps.utility};
    });
  }

  std::vector<std::string> interpretation_subs() const {
    std::vector<std::string> subs;
    for (Ranking r : {Ranking::saliency, Ranking::random})
      for (double k : cfg_.sparsity_levels)
        for (const char* m : {"fid_plus", "fid_minus", "char"})
          subs.push_back(std::string(to_string(r)) + ":" + fmt_level(k) + ":" + m);
    return subs;
  }

  Values summarize(const FidelitySummary& summary) const {
    Values v;
    for (Ranking r : {Ranking::saliency, Ranking::random}) {
      for (double k : cfg_.sparsity_levels) {
        const auto it = summary.means.find(std::string(to_string(r)) + ":" + fmt_level(k));
        for (int m = 0; m < 3; ++m)
          v.push_back(it == summary.means.end() ? std::nullopt : std::optional<double>(pct(it->second[m])));
      }
    }
    return v;
  }

  void node_interpretation() {
    const auto subs = interpretation_subs();
    if (!refmodel() && !method_.gradient_saliency) {
      inapplicable(subs);
      return;
    }
    cells(subs, [&] {
      std::vector<NodeId> targets = ds_.test;
      if (cfg_.max_interpret_targets > 0 && targets.size() > cfg_.max_interpret_targets)
        targets.resize(cfg_.max_interpret_targets);
      const auto tl = train_label_view(graph().labels, graph().num_classes, ds_.train);
      const SaliencyTable saliency =
          refmodel() ? SaliencyTable(SaliencyKind::node_grad_norm, refmodel_saliency(tl, graph().num_classes))
                     : read_saliency(existing(method_.saliency, "interpretation"));
      const auto entries = node_ablation_manifests(graph(), targets, saliency, cfg_.sparsity_levels, key("random_rank", 0));
      if (entries.empty()) throw Error(ErrorCode::EmptySubgraph, "no target has a nonempty receptive field");
      write_manifests(job_dir("manifests"), entries);
      std::vector<ConditionProbabilities> probs;
      if (refmodel()) {
        const PredictionTable clean = clean_predictions();
        for (const AblationEntry& e : entries) {
          const auto t = static_cast<NodeId>(e.target);
          const ClassId c = clean.predicted_class(t);
          probs.push_back({e.target, "clean", clean.row(t)[c]});
          for (const AblationCondition& cond : e.conditions) {
            for (bool plus : {true, false}) {
              std::vector<Edge> removed;
              for (auto i : plus ? cond.masked : cond.complement) removed.push_back(e.edges[i]);
              const auto row = propagate_node(graph(), tl, graph().num_classes, t, method_.propagation, removed);
              probs.push_back({e.target, condition_name(cond.ranking, cond.k_percent, plus), row[c]});
            }
          }
        }
      } else {
        probs = read_condition_probs(existing(method_.interpret_probs, "interpretation"));
      }
      return summarize(score_fidelity(entries, probs));
    });
  }

  // ---- graph collections ----------------------------------------------------

  void run_collection() {
    const GraphCollection& c = data().collection;
    if (axis_ == "ood") {
      const std::vector<std::string> subs{"scaffold:auc_random", "scaffold:auc_scaffold", "scaffold:delta_auc"};
      if (refmodel() || c.scaffold_ids.empty()) {
        inapplicable(subs);
        return;
      }
      cells(subs, [&] {
        std::vector<std::int64_t> unique(c.graphs.size());
        for (std::size_t i = 0; i < unique.size(); ++i) unique[i] = static_cast<std::int64_t>(i);
        const auto random = scaffold_split(unique, {}, key("random_split", 0)).split;
        const auto scaffold = scaffold_split(c.scaffold_ids, {}, key("scaffold_split", 0)).split;
        io::write_split(job_dir("splits") / "scaffold_random.tsv", random);
        io::write_split(job_dir("splits") / "scaffold.tsv", scaffold);
        const double a = pct(graph_auc(external("ood_scaffold_random"), random));
        const double b = pct(graph_auc(external("ood_scaffold"), scaffold));
        return Values{a, b, scaffold_gap(a, b)};
      });
    } else if (axis_ == "interpretation") {
      const auto subs = interpretation_subs();
      if (refmodel() || !method_.gradient_saliency) {
        inapplicable(subs);
        return;
      }
      cells(subs, [&] {
        const SaliencyTable saliency = read_saliency(existing(method_.saliency, "interpretation"));
        std::vector<std::uint8_t> labels(c.graphs.size(), 0);
        for (std::size_t g = 0; g < labels.size(); ++g) labels[g] = c.graph_labels(static_cast<Eigen::Index>(g), 0) == 1.0f;
        std::vector<std::uint8_t> correct;
        const fs::path clean = resolve(method_.predictions, "clean");
        if (!method_.predictions.empty() && fs::exists(clean)) {
          const PredictionTable p = read_prediction_table(clean);
          correct.assign(labels.size(), 0);
          for (std::size_t g = 0; g < labels.size(); ++g)
            if (p.contains(static_cast<std::uint32_t>(g)))
              correct[g] = binary_predictions(p, std::vector<std::uint32_t>{static_cast<std::uint32_t>(g)}, cfg_.threshold)[0] == labels[g];
        }
        const auto targets = graph_level_targets(data().split.units_with(Role::test), labels, correct);
        std::vector<AblationEntry> entries;
        for (auto g : targets) {
          const Graph& mol = c.graphs[g];
          if (mol.num_nodes() == 0) continue;
          std::vector<double> scores;
          for (NodeId a = 0; a < mol.num_nodes(); ++a) {
            const auto s = saliency.find(SaliencyTable::pack(g, a));
            if (!s) throw Error(ErrorCode::MissingNodeScore, "no saliency for atom " + std::to_string(a) + " of graph " + std::to_string(g));
            scores.push_back(*s);
          }
          entries.push_back(atom_ablation_entry(g, mol, scores, cfg_.sparsity_levels, key("random_rank", 0)));
        }
        if (entries.empty()) throw Error(ErrorCode::EmptyEvalSet, "no graph-level targets");
        write_manifests(job_dir("manifests"), entries);
        return summarize(score_fidelity(entries, read_condition_probs(existing(method_.interpret_probs, "interpretation"))));
      });
    }
  }

  double graph_auc(const PredictionTable& p, const SplitAssignment& split) const {
    const GraphCollection& c = data().collection;
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    for (auto g : split.units_with(Role::test)) {
      const float y = c.graph_labels(static_cast<Eigen::Index>(g), 0);
      if (std::isnan(y)) continue;
      scores.push_back(p.positive_score(g));
      labels.push_back(y == 1.0f ? 1 : 0);
    }
    return roc_auc(scores, labels);
  }

  // ---- triple stores --------------------------------------------------------

  void run_triples() {
    if (axis_ != "ood") return;
    const std::vector<std::string> subs{"kg:mrr", "kg:hits10"};
    if (refmodel()) {
      inapplicable(subs);
      return;
    }
    cells(subs, [&] {
      const KgInductiveSplit split = inductive_entity_split(data().triples, cfg_.kg_train_fraction, key("inductive_entity", 0));
      write_kg_queries(job_dir("splits") / "kg_queries.tsv", split);
      const RankingTable ranking = read_ranking_table(existing(method_.predictions, "ood_kg"));
      const auto ranks = kg_query_ranks(split, data().triples, ranking, cfg_.kg_filtered, cfg_.tie_rule);
      return Values{pct(mrr(ranks)), pct(hits_at_k(ranks, 10))};
    });
  }

  const PipelineConfig& cfg_;
  const RunOptions& opts_;
  const LoadedDataset& ds_;
  const MethodConfig& method_;
  std::uint64_t seed_;
  std::string axis_;
  fs::path out_;
  std::optional<PredictionTable> clean_;
};

LoadedDataset load(const DatasetConfig& dc) {
  LoadedDataset ds;
  ds.data = load_dataset(dc.manifest);
  if (!dc.name.empty()) ds.data.name = dc.name;
  if (ds.data.kind == DatasetKind::node_graph) {
    const Graph& g = ds.data.graph;
    ds.degrees = compute_degrees(g);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (!g.is_labeled(v)) continue;
      ds.labeled.push_back(v);
      if (ds.data.split.roles[v] == Role::train) ds.train.push_back(v);
      if (ds.data.split.roles[v] == Role::test) ds.test.push_back(v);
    }
  }
  return ds;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const fs::path& out_dir, const RunOptions& options) {
  std::vector<LoadedDataset> datasets;
  for (const auto& dc : config.datasets) {
    try {
      datasets.push_back(load(dc));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MissingFile) throw Error(ErrorCode::MissingInput, e.what());
      throw;
    }
  }

  std::vector<Job> jobs;
  for (const auto& ds : datasets)
    for (const auto& m : config.methods)
      for (std::uint64_t seed : config.seeds)
        for (const auto& axis : config.axes) jobs.emplace_back(config, options, ds, m, seed, axis, out_dir);

  parallel_for(jobs.size(), options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) jobs[i].run();
  });

  PipelineResult result;
  std::map<std::string, std::vector<SeedValue>> per_file;
  for (Job& j : jobs) {
    for (auto& v : j.values) {
      per_file[v.key.dataset + "__" + v.key.method + "__seed" + std::to_string(v.seed) + ".tsv"].push_back(v);
      result.values.push_back(std::move(v));
    }
    for (auto& e : j.errors) result.errors.push_back(std::move(e));
  }
  for (const auto& [name, vals] : per_file) io::write_text(out_dir / "results" / name, format_seed_values(vals));

  std::string log;
  for (const auto& e : result.errors)
    log += e.key.axis + '\t' + e.key.subcondition + '\t' + e.key.dataset + '\t' + e.key.method + "\tseed" +
           std::to_string(e.seed) + '\t' + e.message + '\n';
  const fs::path err_path = out_dir / "errors.log";
  if (!log.empty())
    io::write_text(err_path, log);
  else if (fs::exists(err_path))
    fs::remove(err_path);

  result.report = assemble_report(result.values, {config.config_hash, options.master_seed, kToolVersion});
  if (!result.report.cells.empty()) emit_report(result.report, out_dir / "report");
  return result;
}

}  // namespace gsh
