#pragma once

#include "gsh/determinism.hpp"
#include "gsh/graph_store.hpp"

#include <array>
#include <span>

namespace gsh {

enum class CorruptionChannel { feature_noise, edge_deletion };

// Five non-zero severities; severity index 0 is the clean input.
struct SeveritySchedule {
  CorruptionChannel channel = CorruptionChannel::feature_noise;
  std::vector<double> levels;

  static SeveritySchedule defaults(CorruptionChannel channel);
  std::size_t num_severities() const { return levels.size(); }
  /// Level for a 1-based severity index; index 0 maps to 0.
  double level(std::size_t severity_index) const;
};

inline constexpr std::array<double, 5> kFeatureNoiseLevels{0.1, 0.25, 0.5, 1.0, 2.0};
inline constexpr std::array<double, 5> kEdgeDeletionLevels{0.05, 0.10, 0.20, 0.30, 0.50};

/// x + sigma_rel * std_train(column) * N(0, 1) on every row. The per-column
/// scale uses the population std over `train_rows`; zero-std columns are
/// left untouched. Cell (r, c) draws gaussian(key, r * cols + c).
FeatureMatrix feature_noise(const FeatureMatrix& features, std::span<const NodeId> train_rows,
                            double sigma_rel, StreamKey key, unsigned workers = 1);

/// Drops canonical edge i (both arcs) iff uniform(key, i) < p. Self-loops
/// are kept. Using one draw per edge makes deletion sets nested in p.
Graph edge_delete(const Graph& graph, double p, StreamKey key, unsigned workers = 1);

/// Clean minus perturbed, in the caller's units.
inline double drop_metric(double clean, double perturbed) { return clean - perturbed; }

}  // namespace gsh
