#include "gsh/corruption.hpp"
#include "gsh/error.hpp"
#include "gsh/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace gsh {

SeveritySchedule SeveritySchedule::defaults(CorruptionChannel channel) {
  SeveritySchedule s;
  s.channel = channel;
  if (channel == CorruptionChannel::feature_noise)
    s.levels.assign(kFeatureNoiseLevels.begin(), kFeatureNoiseLevels.end());
  else
    s.levels.assign(kEdgeDeletionLevels.begin(), kEdgeDeletionLevels.end());
  return s;
}

double SeveritySchedule::level(std::size_t severity_index) const {
  if (severity_index == 0) return 0.0;
  if (severity_index > levels.size())
    throw Error(ErrorCode::BadSeverity, "severity index " + std::to_string(severity_index) + " exceeds schedule");
  return levels[severity_index - 1];
}

FeatureMatrix feature_noise(const FeatureMatrix& features, std::span<const NodeId> train_rows,
                            double sigma_rel, StreamKey key, unsigned workers) {
  if (!std::isfinite(sigma_rel) || sigma_rel < 0)
    throw Error(ErrorCode::BadSeverity, "sigma_rel must be finite and >= 0");
  if (train_rows.empty()) throw Error(ErrorCode::EmptyTrainMask, "feature noise needs train rows");
  if (!features.allFinite()) throw Error(ErrorCode::NonFiniteFeature, "input features contain NaN/Inf");
  for (NodeId r : train_rows)
    if (r >= features.rows()) throw Error(ErrorCode::BadId, "train row " + std::to_string(r));

  FeatureMatrix out = features;
  if (sigma_rel == 0.0) return out;

  const Eigen::Index cols = features.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(cols);
  for (NodeId r : train_rows) mean += features.row(r).transpose().cast<double>();
  mean /= static_cast<double>(train_rows.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(cols);
  for (NodeId r : train_rows)
    var += (features.row(r).transpose().cast<double>() - mean).array().square().matrix();
  const Eigen::VectorXd scale = sigma_rel * (var / static_cast<double>(train_rows.size())).cwiseSqrt();

  const auto ucols = static_cast<std::uint64_t>(cols);
  parallel_for(static_cast<std::size_t>(features.rows()), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (scale[c] == 0.0) continue;
        const double eps = gaussian(key, r * ucols + static_cast<std::uint64_t>(c));
        const auto row = static_cast<Eigen::Index>(r);
        out(row, c) = static_cast<float>(static_cast<double>(features(row, c)) + scale[c] * eps);
      }
    }
  });
  return out;
}

Graph edge_delete(const Graph& graph, double p, StreamKey key, unsigned workers) {
  if (!graph.undirected()) throw Error(ErrorCode::DirectedGraph, "edge deletion needs an undirected graph");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::BadProbability, "p must lie in [0, 1]");

  const NodeId n = graph.num_nodes();
  const auto offsets = graph.offsets();
  const auto nbrs = graph.neighbor_array();

  // first_up[u]: position of u's first neighbor > u; base[u]: canonical index
  // of that edge. Canonical edges are ordered by (u, v).
  std::vector<ArcOffset> first_up(n);
  std::vector<std::uint64_t> base(static_cast<std::size_t>(n) + 1, 0);
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = graph.neighbors(u);
    const auto it = std::upper_bound(nb.begin(), nb.end(), u);
    first_up[u] = offsets[u] + static_cast<ArcOffset>(it - nb.begin());
    base[u + 1] = base[u] + static_cast<std::uint64_t>(nb.end() - it);
  }
  auto canonical_index = [&](NodeId a, NodeId b) -> std::uint64_t {
    // a < b and arc (a, b) exists.
    const auto nb = graph.neighbors(a);
    const auto pos = static_cast<ArcOffset>(std::lower_bound(nb.begin(), nb.end(), b) - nb.begin());
    return base[a] + (offsets[a] + pos - first_up[a]);
  };

  std::vector<std::uint8_t> keep(graph.num_arcs(), 1);
  std::vector<ArcOffset> new_degree(n, 0);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t su = begin; su < end; ++su) {
      const auto u = static_cast<NodeId>(su);
      ArcOffset kept = 0;
      for (ArcOffset i = offsets[u]; i < offsets[u + 1]; ++i) {
        const NodeId v = nbrs[i];
        if (v != u) {
          const std::uint64_t c = v > u ? base[u] + (i - first_up[u]) : canonical_index(v, u);
          keep[i] = uniform(key, c) >= p ? 1 : 0;
        }
        kept += keep[i];
      }
      new_degree[u] = kept;
    }
  });

  std::vector<ArcOffset> new_offsets(static_cast<std::size_t>(n) + 1, 0);
  for (NodeId u = 0; u < n; ++u) new_offsets[u + 1] = new_offsets[u] + new_degree[u];
  std::vector<NodeId> new_nbrs(new_offsets[n]);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      ArcOffset w = new_offsets[u];
      for (ArcOffset i = offsets[u]; i < offsets[u + 1]; ++i)
        if (keep[i]) new_nbrs[w++] = nbrs[i];
    }
  });
  return graph.with_topology(Graph::from_csr(n, std::move(new_offsets), std::move(new_nbrs), true));
}

}  // namespace gsh
