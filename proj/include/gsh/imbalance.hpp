#pragma once

#include "gsh/determinism.hpp"
#include "gsh/graph_store.hpp"
#include "gsh/metrics.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace gsh {

inline constexpr std::array<double, 3> kImbalanceRatios{5.0, 10.0, 20.0};

struct ClassPartition {
  std::vector<ClassId> minor;  // ascending class id
  std::vector<ClassId> major;  // ascending class id
};

/// Classes sorted by (train count, class id); the first floor(C/2) are minor.
/// Throws TooFewClasses unless >= 2 classes have a nonzero count.
ClassPartition partition_classes(std::span<const std::size_t> train_counts);

struct ImbalanceSpec {
  double rho = 10.0;
  std::vector<ClassId> minor_classes;
  std::vector<ClassId> major_classes;
  std::size_t n_major = 0;             // max train count among major classes
  std::vector<std::size_t> targets;    // per class; major classes keep their count

  bool is_minor(ClassId c) const;
};

/// max(1, floor(n_major / rho)).
std::size_t minor_target(std::size_t n_major, double rho);

ImbalanceSpec make_imbalance_spec(std::span<const std::size_t> train_counts, double rho);

/// Minor classes keep min(count, target) units, chosen as a prefix of the
/// keyed order of their unit ids; everything else is returned unchanged.
/// Output is sorted ascending.
std::vector<std::uint32_t> step_downsample(std::span<const std::vector<std::uint32_t>> train_units_by_class,
                                           const ImbalanceSpec& spec, StreamKey key);

/// Splits the train role of `split` per class using `labels`.
std::vector<std::vector<std::uint32_t>> train_units_by_class(const SplitAssignment& split,
                                                             std::span<const ClassId> labels, ClassId num_classes);

/// Returns `split` with train units outside `kept_train` set to excluded.
SplitAssignment apply_downsample(const SplitAssignment& split, std::span<const std::uint32_t> kept_train);

struct MajorMinorRecall {
  std::optional<double> major;
  std::optional<double> minor;
};

/// Unweighted means of per-class recall over the major and minor groups;
/// classes without eval support are left out of their group's mean.
MajorMinorRecall major_minor_recall(const PredictionTable& preds, std::span<const ClassId> labels,
                                    const ImbalanceSpec& spec, std::span<const std::uint32_t> eval_set);
MajorMinorRecall major_minor_recall(const std::vector<std::optional<double>>& recalls, const ImbalanceSpec& spec);

}  // namespace gsh
