#include "gsh/error.hpp"
#include "gsh/io.hpp"
#include "gsh/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace gsh;

namespace {

PredictionTable one_hot(const std::vector<ClassId>& pred, ClassId classes) {
  PredictionTable::Matrix m = PredictionTable::Matrix::Zero(static_cast<Eigen::Index>(pred.size()), classes);
  for (std::size_t i = 0; i < pred.size(); ++i) m(static_cast<Eigen::Index>(i), pred[i]) = 1.0;
  return PredictionTable(std::move(m));
}

std::vector<std::uint32_t> iota(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
  return v;
}

}  // namespace

TEST_CASE("accuracy fixtures") {
  const std::vector<ClassId> labels{0, 1, 0};
  CHECK(accuracy(one_hot({0, 1, 1}, 2), labels, 2, iota(3)) == doctest::Approx(2.0 / 3.0));
  CHECK(accuracy(one_hot({0, 1, 0}, 2), labels, 2, iota(3)) == 1.0);
  CHECK_THROWS_AS(accuracy(one_hot({0}, 2), labels, 2, {}), Error);
  CHECK_THROWS_AS(accuracy(one_hot({0}, 2), labels, 2, std::vector<std::uint32_t>{2}), Error);
}

TEST_CASE("recall, bAcc and macro-F1 fixtures") {
  // Binary with recalls 1.0 and 0.5.
  const auto cm = confusion_matrix(std::vector<ClassId>{0, 0, 1, 0}, std::vector<ClassId>{0, 0, 1, 1}, 2);
  const auto r = per_class_recall(cm);
  CHECK(*r[0] == 1.0);
  CHECK(*r[1] == 0.5);
  CHECK(balanced_accuracy(cm) == 0.75);

  const auto perfect = confusion_matrix(std::vector<ClassId>{0, 1, 2}, std::vector<ClassId>{0, 1, 2}, 3);
  CHECK(macro_f1(perfect) == 1.0);
  for (const auto& x : per_class_recall(perfect)) CHECK(*x == 1.0);

  const auto never = confusion_matrix(std::vector<ClassId>{0, 0, 0}, std::vector<ClassId>{0, 1, 2}, 3);
  CHECK(*per_class_recall(never)[2] == 0.0);

  const auto missing = confusion_matrix(std::vector<ClassId>{0, 1}, std::vector<ClassId>{0, 1}, 3);
  CHECK_FALSE(per_class_recall(missing)[2].has_value());
}

TEST_CASE("class metrics match the brute-force oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const ClassId classes = 2 + rng() % 5;
    const std::size_t n = 1 + rng() % 200;
    std::vector<ClassId> pred(n), actual(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng() % classes;
      actual[i] = rng() % classes;
    }
    const auto cm = confusion_matrix(pred, actual, classes);
    const auto o = oracle::class_stats(pred, actual, classes);
    CHECK(accuracy(cm) == o.accuracy);
    CHECK(per_class_recall(cm) == o.recall);
    CHECK(balanced_accuracy(cm) == doctest::Approx(o.balanced_accuracy).epsilon(1e-12));
    CHECK(macro_f1(cm) == doctest::Approx(o.macro_f1).epsilon(1e-12));
    // 1 - acc is the support-weighted mean of (1 - recall).
    double weighted = 0;
    for (ClassId c = 0; c < classes; ++c)
      if (o.recall[c]) weighted += (1 - *o.recall[c]) * static_cast<double>(cm.row(c).sum());
    CHECK(1 - accuracy(cm) == doctest::Approx(weighted / static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("argmax ties go to the lowest class") {
  PredictionTable::Matrix m(2, 3);
  m << 0.4, 0.4, 0.2, 0.2, 0.4, 0.4;
  const PredictionTable t(std::move(m));
  CHECK(t.predicted_class(0) == 0);
  CHECK(t.predicted_class(1) == 1);
}

TEST_CASE("prediction table validation and round trip") {
  PredictionTable::Matrix bad(1, 2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(PredictionTable(std::move(bad)), Error);
  PredictionTable::Matrix nan(1, 1);
  nan << std::nan("");
  CHECK_THROWS_AS(PredictionTable(std::move(nan)), Error);
  CHECK_THROWS_AS(PredictionTable({1, 1}, PredictionTable::Matrix::Constant(2, 1, 0.5)), Error);

  const auto dir = testing::scratch_dir("metrics_io");
  PredictionTable::Matrix m(2, 2);
  m << 0.25, 0.75, 0.1, 0.9;
  const PredictionTable t({7, 3}, m);
  write_prediction_table(dir / "p.tsv", t);
  const auto back = read_prediction_table(dir / "p.tsv");
  CHECK(back.units() == t.units());
  CHECK(back.values() == t.values());
  CHECK(back.positive_score(3) == 0.9);
  CHECK_THROWS_AS(back.row_of(5), Error);
}

TEST_CASE("roc_auc fixtures") {
  CHECK(roc_auc(std::vector<double>{0.9, 0.1}, std::vector<std::uint8_t>{1, 0}) == 1.0);
  CHECK(roc_auc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<std::uint8_t>{1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<std::uint8_t>{1, 1}), Error);
}

TEST_CASE("roc_auc matches the pairwise oracle and its invariances") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 50;
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 7) / 7.0;  // heavy ties
      y[i] = rng() % 2;
    }
    y[0] = 1;
    y[1] = 0;
    const double auc = roc_auc(s, y);
    CHECK(auc == doctest::Approx(oracle::pairwise_auc(s, y)).epsilon(1e-12));
    std::vector<double> t(n), neg(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = std::exp(3 * s[i]) - 5;
      neg[i] = -s[i];
    }
    CHECK(roc_auc(t, y) == auc);
    // With ties, AUC(s) + AUC(-s) = 1 still holds under midranks.
    CHECK(roc_auc(neg, y) + auc == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mrr and hits") {
  CHECK(mrr(std::vector<double>{2}) == 0.5);
  CHECK(hits_at_k(std::vector<double>{11}, 10) == 0.0);
  CHECK(hits_at_k(std::vector<double>{10}, 10) == 1.0);
  const std::vector<double> ranks{1, 3, 12, 2.5};
  CHECK(mrr(ranks) == doctest::Approx((1 + 1.0 / 3 + 1.0 / 12 + 1 / 2.5) / 4));
  CHECK(hits_at_k(ranks, 1) <= hits_at_k(ranks, 3));
  CHECK(hits_at_k(ranks, 3) <= hits_at_k(ranks, 10));
  CHECK_THROWS_AS(mrr(std::vector<double>{}), Error);
}

TEST_CASE("rank_of matches the full-sort oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<double> s(n);
    std::vector<std::uint8_t> filt(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 5);
      filt[i] = rng() % 4 == 0;
    }
    const std::size_t answer = rng() % n;
    for (TieRule rule : {TieRule::average, TieRule::optimistic, TieRule::pessimistic}) {
      CHECK(rank_of(s, answer, rule) == oracle::sorted_rank(s, answer, rule));
      CHECK(rank_of(s, answer, rule, filt) == oracle::sorted_rank(s, answer, rule, filt));
    }
  }
}

TEST_CASE("ranking file") {
  const auto dir = testing::scratch_dir("ranking_io");
  io::write_text(dir / "r.tsv", "1\t0\t0.5\n0\t2\t0.1\n1\t3\t0.7\n");
  const auto t = read_ranking_table(dir / "r.tsv");
  CHECK(t.query_ids == std::vector<std::uint32_t>{0, 1});
  REQUIRE(t.find(1) != nullptr);
  CHECK(t.find(1)->size() == 2);
  CHECK(t.find(5) == nullptr);
}
