#pragma once

#include "gsh/graph_store.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace gsh {

// Externally produced model outputs: one row per unit, either class
// probabilities (num_classes >= 2, rows sum to 1) or a single score column.
class PredictionTable {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  PredictionTable() = default;
  PredictionTable(std::vector<std::uint32_t> units, Matrix values);
  /// Units 0..rows-1.
  explicit PredictionTable(Matrix values);

  std::size_t size() const { return units_.size(); }
  std::size_t num_classes() const { return static_cast<std::size_t>(values_.cols()); }
  bool is_scores() const { return values_.cols() == 1; }
  const std::vector<std::uint32_t>& units() const { return units_; }
  const Matrix& values() const { return values_; }

  bool contains(std::uint32_t unit) const;
  /// Throws MissingPrediction.
  Eigen::Index row_of(std::uint32_t unit) const;
  auto row(std::uint32_t unit) const { return values_.row(row_of(unit)); }

  /// argmax, ties to the lowest class id.
  ClassId predicted_class(std::uint32_t unit) const;
  /// Positive-class score: the value itself for score tables, else p(class 1).
  double positive_score(std::uint32_t unit) const;

 private:
  std::vector<std::uint32_t> units_;
  Matrix values_;
  std::vector<std::int64_t> index_;
};

/// Header "num_classes<TAB>C", then "unit_id<TAB>p0<TAB>p1...".
PredictionTable read_prediction_table(const std::filesystem::path& path);
void write_prediction_table(const std::filesystem::path& path, const PredictionTable& table);

/// Rows are actual class, columns predicted class.
using ConfusionMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

ConfusionMatrix confusion_matrix(std::span<const ClassId> predicted, std::span<const ClassId> actual,
                                 std::size_t num_classes);

double accuracy(const ConfusionMatrix& cm);
/// nullopt for classes without eval support.
std::vector<std::optional<double>> per_class_recall(const ConfusionMatrix& cm);
/// Mean of defined per-class recalls.
double balanced_accuracy(const ConfusionMatrix& cm);
/// Mean per-class F1 over classes with eval support; zero predicted
/// positives gives F1 = 0 for that class.
double macro_f1(const ConfusionMatrix& cm);

/// Argmax predictions for `eval_set`. Throws EmptyEvalSet or MissingPrediction.
std::vector<ClassId> predicted_classes(const PredictionTable& preds, std::span<const std::uint32_t> eval_set);
/// Labels for `eval_set`; throws BadId for unlabelled units.
std::vector<ClassId> gather_labels(std::span<const ClassId> labels, ClassId num_classes,
                                   std::span<const std::uint32_t> eval_set);

/// Confusion matrix of `preds` against `labels` on `eval_set`.
ConfusionMatrix evaluate(const PredictionTable& preds, std::span<const ClassId> labels, ClassId num_classes,
                         std::span<const std::uint32_t> eval_set);

double accuracy(const PredictionTable& preds, std::span<const ClassId> labels, ClassId num_classes,
                std::span<const std::uint32_t> eval_set);

/// Mann-Whitney AUC with midrank ties: P(s+ > s-) + 0.5 P(s+ = s-).
/// Exact: pair counts are accumulated in integers. Throws OneClassOnly.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

enum class TieRule { average, optimistic, pessimistic };

/// 1-based rank of candidate `answer` among `scores` (higher is better).
/// Candidates flagged in `filtered_out` are ignored (the answer never is).
double rank_of(std::span<const double> scores, std::size_t answer, TieRule rule = TieRule::average,
               std::span<const std::uint8_t> filtered_out = {});

/// "query_id<TAB>candidate_id<TAB>score" rows grouped by query.
struct RankingTable {
  struct Entry {
    std::uint32_t candidate = 0;
    double score = 0;
  };
  std::vector<std::uint32_t> query_ids;           // ascending
  std::vector<std::vector<Entry>> entries;        // parallel to query_ids

  /// Entries of `query`, or nullptr.
  const std::vector<Entry>* find(std::uint32_t query) const;
};

RankingTable read_ranking_table(const std::filesystem::path& path);

double mrr(std::span<const double> ranks);
double hits_at_k(std::span<const double> ranks, double k);

}  // namespace gsh
