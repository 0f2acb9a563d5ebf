#pragma once

#include "gsh/determinism.hpp"
#include "gsh/metrics.hpp"
#include "gsh/refmodel.hpp"
#include "gsh/report.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gsh {

inline const std::vector<std::string> kAllAxes{"corruption", "ood", "imbalance", "fairness", "interpretation"};

// A method is either the built-in propagation scorer or an external model
// whose outputs are read from files. Path templates may use {dataset},
// {method}, {condition} and {seed}.
struct MethodConfig {
  enum class Kind { refmodel, external };

  std::string name;
  Kind kind = Kind::refmodel;
  std::string predictions;      // external: PredictionTable / ranking file per condition
  std::string saliency;         // external: SaliencyTable per seed
  std::string interpret_probs;  // external: per-(target, condition) probabilities
  bool feature_consuming = false;
  bool gradient_saliency = true;
  PropagationConfig propagation;
};

struct DatasetConfig {
  std::string name;
  std::filesystem::path manifest;
};

struct PipelineConfig {
  std::vector<std::string> axes = kAllAxes;
  std::vector<DatasetConfig> datasets;
  std::vector<MethodConfig> methods;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<double> feature_noise_levels;
  std::vector<double> edge_deletion_levels;
  std::vector<double> imbalance_ratios;
  std::vector<double> sparsity_levels;
  double head_tail_q = 0.2;
  double threshold = 0.5;
  double kg_train_fraction = 0.75;
  bool kg_filtered = false;
  TieRule tie_rule = TieRule::average;
  std::size_t max_interpret_targets = 0;  // 0: every test node
  std::string config_hash;
  std::filesystem::path base_dir;  // template paths resolve against this

  PipelineConfig();
};

/// JSON config; relative paths resolve against the config's directory.
/// Throws ConfigError.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Stream key of one cell: the context tuple salted with the master seed.
/// CLI operator subcommands use master seed 0.
StreamKey cell_key(std::string_view axis, std::string_view dataset, std::string_view op, std::uint64_t severity_index,
                   std::uint64_t seed, std::uint64_t master_seed = 0);

/// Severity index used for an imbalance ratio (rho in thousandths).
std::uint64_t rho_index(double rho);

struct RunOptions {
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
};

struct CellError {
  CellKey key;
  std::uint64_t seed = 0;
  std::string message;
};

struct PipelineResult {
  std::vector<SeedValue> values;
  std::vector<CellError> errors;
  Report report;
  bool ok() const { return errors.empty(); }
};

/// Runs every (dataset, method, seed, axis) job, writes operator outputs,
/// per-seed results, errors.log and report.{json,csv} under `out_dir`.
/// Output is identical for any worker count.
PipelineResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir,
                            const RunOptions& options = {});

/// Builds the report (with lift and cross-dataset cells) from seed values.
Report assemble_report(std::span<const SeedValue> values, Provenance provenance);

}  // namespace gsh
