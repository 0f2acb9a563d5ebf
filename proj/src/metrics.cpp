#include "gsh/metrics.hpp"
#include "gsh/error.hpp"
#include "gsh/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace gsh {

PredictionTable::PredictionTable(std::vector<std::uint32_t> units, Matrix values)
    : units_(std::move(units)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(units_.size()) != values_.rows())
    throw Error(ErrorCode::LengthMismatch, "prediction units and rows differ");
  if (values_.cols() < 1) throw Error(ErrorCode::LengthMismatch, "prediction table needs >= 1 column");
  if (!values_.allFinite()) throw Error(ErrorCode::BadProbability, "non-finite prediction value");
  if (values_.cols() >= 2) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      if ((values_.row(r).array() < 0.0).any() || std::abs(values_.row(r).sum() - 1.0) > 1e-4)
        throw Error(ErrorCode::BadProbability,
                    "probability row for unit " + std::to_string(units_[static_cast<std::size_t>(r)]) +
                        " does not sum to 1");
    }
  }
  const std::uint32_t max_unit = units_.empty() ? 0 : *std::max_element(units_.begin(), units_.end());
  index_.assign(units_.empty() ? 0 : static_cast<std::size_t>(max_unit) + 1, -1);
  for (std::size_t i = 0; i < units_.size(); ++i) {
    if (index_[units_[i]] >= 0) throw Error(ErrorCode::ParseError, "duplicate prediction for unit " + std::to_string(units_[i]));
    index_[units_[i]] = static_cast<std::int64_t>(i);
  }
}

namespace {

std::vector<std::uint32_t> iota_units(Eigen::Index n) {
  std::vector<std::uint32_t> u(static_cast<std::size_t>(n));
  std::iota(u.begin(), u.end(), 0u);
  return u;
}

}  // namespace

// The row count must be read before `values` is moved from.
PredictionTable::PredictionTable(Matrix values) {
  auto units = iota_units(values.rows());
  *this = PredictionTable(std::move(units), std::move(values));
}

bool PredictionTable::contains(std::uint32_t unit) const {
  return unit < index_.size() && index_[unit] >= 0;
}

Eigen::Index PredictionTable::row_of(std::uint32_t unit) const {
  if (!contains(unit)) throw Error(ErrorCode::MissingPrediction, "no prediction for unit " + std::to_string(unit));
  return static_cast<Eigen::Index>(index_[unit]);
}

ClassId PredictionTable::predicted_class(std::uint32_t unit) const {
  const auto r = row(unit);
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < r.size(); ++c)
    if (r[c] > r[best]) best = c;
  return static_cast<ClassId>(best);
}

double PredictionTable::positive_score(std::uint32_t unit) const {
  const auto r = row(unit);
  return r.size() == 1 ? r[0] : r[1];
}

PredictionTable read_prediction_table(const std::filesystem::path& path) {
  std::size_t classes = 0;
  std::vector<std::uint32_t> units;
  std::vector<double> flat;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (classes == 0) {
      if (f.size() != 2 || f[0] != "num_classes")
        throw Error(ErrorCode::ParseError, path.string() + ": first line must be num_classes<TAB>C");
      classes = io::parse_u64(f[1], "num_classes");
      if (classes == 0) throw Error(ErrorCode::ParseError, "num_classes must be >= 1");
      return;
    }
    if (f.size() != classes + 1)
      throw Error(ErrorCode::LengthMismatch, path.string() + ":" + std::to_string(line));
    units.push_back(static_cast<std::uint32_t>(io::parse_u64(f[0], "unit id")));
    for (std::size_t c = 0; c < classes; ++c) flat.push_back(io::parse_f64(f[c + 1], "prediction"));
  });
  if (classes == 0) throw Error(ErrorCode::ParseError, path.string() + ": empty prediction file");
  PredictionTable::Matrix m(static_cast<Eigen::Index>(units.size()), static_cast<Eigen::Index>(classes));
  std::copy(flat.begin(), flat.end(), m.data());
  return PredictionTable(std::move(units), std::move(m));
}

void write_prediction_table(const std::filesystem::path& path, const PredictionTable& table) {
  std::string out = "num_classes\t" + std::to_string(table.num_classes()) + "\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += std::to_string(table.units()[i]);
    for (Eigen::Index c = 0; c < table.values().cols(); ++c) {
      out += '\t';
      out += io::format_double(table.values()(static_cast<Eigen::Index>(i), c));
    }
    out += '\n';
  }
  io::write_text(path, out);
}

ConfusionMatrix confusion_matrix(std::span<const ClassId> predicted, std::span<const ClassId> actual,
                                 std::size_t num_classes) {
  if (predicted.size() != actual.size()) throw Error(ErrorCode::LengthMismatch, "predicted vs actual length");
  if (predicted.empty()) throw Error(ErrorCode::EmptyEvalSet, "empty evaluation set");
  const auto c = static_cast<Eigen::Index>(num_classes);
  ConfusionMatrix cm = ConfusionMatrix::Zero(c, c);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] >= num_classes || actual[i] >= num_classes)
      throw Error(ErrorCode::BadId, "class id out of range");
    ++cm(actual[i], predicted[i]);
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.sum();
  if (total == 0) throw Error(ErrorCode::EmptyEvalSet, "empty evaluation set");
  return static_cast<double>(cm.diagonal().sum()) / static_cast<double>(total);
}

std::vector<std::optional<double>> per_class_recall(const ConfusionMatrix& cm) {
  if (cm.sum() == 0) throw Error(ErrorCode::EmptyEvalSet, "empty evaluation set");
  std::vector<std::optional<double>> out(static_cast<std::size_t>(cm.rows()));
  for (Eigen::Index c = 0; c < cm.rows(); ++c) {
    const auto support = cm.row(c).sum();
    if (support > 0) out[static_cast<std::size_t>(c)] = static_cast<double>(cm(c, c)) / static_cast<double>(support);
  }
  return out;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  double sum = 0;
  int defined = 0;
  for (const auto& r : per_class_recall(cm)) {
    if (r) {
      sum += *r;
      ++defined;
    }
  }
  return sum / defined;
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.sum() == 0) throw Error(ErrorCode::EmptyEvalSet, "empty evaluation set");
  double sum = 0;
  int classes = 0;
  for (Eigen::Index c = 0; c < cm.rows(); ++c) {
    const auto support = cm.row(c).sum();
    if (support == 0) continue;
    ++classes;
    const auto predicted = cm.col(c).sum();
    const auto tp = cm(c, c);
    if (predicted == 0 || tp == 0) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    const double recall = static_cast<double>(tp) / static_cast<double>(support);
    sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / classes;
}

std::vector<ClassId> predicted_classes(const PredictionTable& preds, std::span<const std::uint32_t> eval_set) {
  if (eval_set.empty()) throw Error(ErrorCode::EmptyEvalSet, "empty evaluation set");
  std::vector<ClassId> out;
  out.reserve(eval_set.size());
  for (std::uint32_t u : eval_set) out.push_back(preds.predicted_class(u));
  return out;
}

std::vector<ClassId> gather_labels(std::span<const ClassId> labels, ClassId num_classes,
                                   std::span<const std::uint32_t> eval_set) {
  std::vector<ClassId> out;
  out.reserve(eval_set.size());
  for (std::uint32_t u : eval_set) {
    if (u >= labels.size() || labels[u] >= num_classes)
      throw Error(ErrorCode::BadId, "evaluation unit " + std::to_string(u) + " has no label");
    out.push_back(labels[u]);
  }
  return out;
}

ConfusionMatrix evaluate(const PredictionTable& preds, std::span<const ClassId> labels, ClassId num_classes,
                         std::span<const std::uint32_t> eval_set) {
  const auto predicted = predicted_classes(preds, eval_set);
  const auto actual = gather_labels(labels, num_classes, eval_set);
  return confusion_matrix(predicted, actual, std::max<std::size_t>(num_classes, preds.num_classes()));
}

double accuracy(const PredictionTable& preds, std::span<const ClassId> labels, ClassId num_classes,
                std::span<const std::uint32_t> eval_set) {
  return accuracy(evaluate(preds, labels, num_classes, eval_set));
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores vs labels length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (double s : scores)
    if (std::isnan(s)) throw Error(ErrorCode::BadArgument, "NaN score");
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // twice_u counts each (pos, neg) pair as 2 when pos ranks above, 1 on a tie.
  std::uint64_t twice_u = 0;
  std::uint64_t neg_below = 0;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos_g = 0;
    std::uint64_t neg_g = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? pos_g : neg_g) += 1;
      ++j;
    }
    twice_u += 2 * pos_g * neg_below + pos_g * neg_g;
    neg_below += neg_g;
    positives += pos_g;
    negatives += neg_g;
    i = j;
  }
  if (positives == 0 || negatives == 0) throw Error(ErrorCode::OneClassOnly, "AUC needs both label values");
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double rank_of(std::span<const double> scores, std::size_t answer, TieRule rule,
               std::span<const std::uint8_t> filtered_out) {
  if (answer >= scores.size()) throw Error(ErrorCode::BadId, "answer index out of range");
  const double target = scores[answer];
  std::size_t greater = 0;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == answer || (!filtered_out.empty() && filtered_out[i])) continue;
    if (scores[i] > target)
      ++greater;
    else if (scores[i] == target)
      ++ties;
  }
  switch (rule) {
    case TieRule::optimistic: return 1.0 + static_cast<double>(greater);
    case TieRule::pessimistic: return 1.0 + static_cast<double>(greater + ties);
    case TieRule::average: break;
  }
  return 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(ties);
}

const std::vector<RankingTable::Entry>* RankingTable::find(std::uint32_t query) const {
  const auto it = std::lower_bound(query_ids.begin(), query_ids.end(), query);
  if (it == query_ids.end() || *it != query) return nullptr;
  return &entries[static_cast<std::size_t>(it - query_ids.begin())];
}

RankingTable read_ranking_table(const std::filesystem::path& path) {
  std::map<std::uint32_t, std::vector<RankingTable::Entry>> rows;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() != 3) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    const auto q = static_cast<std::uint32_t>(io::parse_u64(f[0], "query id"));
    const auto c = static_cast<std::uint32_t>(io::parse_u64(f[1], "candidate id"));
    const double s = io::parse_f64(f[2], "score");
    if (std::isnan(s)) throw Error(ErrorCode::BadArgument, "NaN ranking score");
    rows[q].push_back({c, s});
  });
  RankingTable t;
  for (auto& [q, e] : rows) {
    t.query_ids.push_back(q);
    t.entries.push_back(std::move(e));
  }
  return t;
}

double mrr(std::span<const double> ranks) {
  if (ranks.empty()) throw Error(ErrorCode::EmptyQuerySet, "no ranked queries");
  double sum = 0;
  for (double r : ranks) {
    if (!(r >= 1.0)) throw Error(ErrorCode::BadArgument, "rank must be >= 1");
    sum += 1.0 / r;
  }
  return sum / static_cast<double>(ranks.size());
}

double hits_at_k(std::span<const double> ranks, double k) {
  if (ranks.empty()) throw Error(ErrorCode::EmptyQuerySet, "no ranked queries");
  std::size_t hits = 0;
  for (double r : ranks) {
    if (!(r >= 1.0)) throw Error(ErrorCode::BadArgument, "rank must be >= 1");
    if (r <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

}  // namespace gsh
