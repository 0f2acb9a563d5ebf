#include "gsh/imbalance.hpp"
#include "gsh/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsh {

ClassPartition partition_classes(std::span<const std::size_t> train_counts) {
  const auto nonzero = std::count_if(train_counts.begin(), train_counts.end(), [](std::size_t c) { return c > 0; });
  if (nonzero < 2) throw Error(ErrorCode::TooFewClasses, "need >= 2 classes with training samples");
  std::vector<ClassId> order(train_counts.size());
  std::iota(order.begin(), order.end(), ClassId{0});
  std::sort(order.begin(), order.end(), [&](ClassId a, ClassId b) {
    return train_counts[a] != train_counts[b] ? train_counts[a] < train_counts[b] : a < b;
  });
  const std::size_t n_minor = order.size() / 2;
  ClassPartition p;
  p.minor.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_minor));
  p.major.assign(order.begin() + static_cast<std::ptrdiff_t>(n_minor), order.end());
  std::sort(p.minor.begin(), p.minor.end());
  std::sort(p.major.begin(), p.major.end());
  return p;
}

bool ImbalanceSpec::is_minor(ClassId c) const {
  return std::binary_search(minor_classes.begin(), minor_classes.end(), c);
}

std::size_t minor_target(std::size_t n_major, double rho) {
  if (!(rho > 0)) throw Error(ErrorCode::BadArgument, "rho must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(n_major) / rho)));
}

ImbalanceSpec make_imbalance_spec(std::span<const std::size_t> train_counts, double rho) {
  ClassPartition p = partition_classes(train_counts);
  ImbalanceSpec spec;
  spec.rho = rho;
  spec.minor_classes = std::move(p.minor);
  spec.major_classes = std::move(p.major);
  for (ClassId c : spec.major_classes) spec.n_major = std::max(spec.n_major, train_counts[c]);
  const std::size_t target = minor_target(spec.n_major, rho);
  spec.targets.assign(train_counts.begin(), train_counts.end());
  for (ClassId c : spec.minor_classes) spec.targets[c] = target;
  return spec;
}

std::vector<std::uint32_t> step_downsample(std::span<const std::vector<std::uint32_t>> train_units_by_class,
                                           const ImbalanceSpec& spec, StreamKey key) {
  std::vector<std::uint32_t> out;
  for (std::size_t c = 0; c < train_units_by_class.size(); ++c) {
    const auto& units = train_units_by_class[c];
    if (!spec.is_minor(static_cast<ClassId>(c))) {
      out.insert(out.end(), units.begin(), units.end());
      continue;
    }
    const std::vector<std::uint64_t> ids(units.begin(), units.end());
    const auto order = keyed_order(sub_key(key, c), ids);
    const std::size_t keep = std::min(units.size(), spec.targets[c]);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(static_cast<std::uint32_t>(order[i]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::uint32_t>> train_units_by_class(const SplitAssignment& split,
                                                             std::span<const ClassId> labels, ClassId num_classes) {
  std::vector<std::vector<std::uint32_t>> out(num_classes);
  for (std::uint32_t u : split.units_with(Role::train))
    if (u < labels.size() && labels[u] < num_classes) out[labels[u]].push_back(u);
  return out;
}

SplitAssignment apply_downsample(const SplitAssignment& split, std::span<const std::uint32_t> kept_train) {
  SplitAssignment out = split;
  std::vector<std::uint8_t> kept(split.size(), 0);
  for (std::uint32_t u : kept_train) kept[u] = 1;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out.roles[i] == Role::train && !kept[i]) out.roles[i] = Role::excluded;
  return out;
}

MajorMinorRecall major_minor_recall(const std::vector<std::optional<double>>& recalls, const ImbalanceSpec& spec) {
  auto group_mean = [&](const std::vector<ClassId>& classes) -> std::optional<double> {
    double sum = 0;
    int n = 0;
    for (ClassId c : classes) {
      if (c < recalls.size() && recalls[c]) {
        sum += *recalls[c];
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  };
  return {group_mean(spec.major_classes), group_mean(spec.minor_classes)};
}

MajorMinorRecall major_minor_recall(const PredictionTable& preds, std::span<const ClassId> labels,
                                    const ImbalanceSpec& spec, std::span<const std::uint32_t> eval_set) {
  const auto classes = static_cast<ClassId>(spec.minor_classes.size() + spec.major_classes.size());
  return major_minor_recall(per_class_recall(evaluate(preds, labels, classes, eval_set)), spec);
}

}  // namespace gsh
