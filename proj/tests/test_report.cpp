#include "gsh/error.hpp"
#include "gsh/interpret.hpp"
#include "gsh/io.hpp"
#include "gsh/pipeline.hpp"
#include "gsh/report.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <random>
#include <set>

using namespace gsh;

TEST_CASE("aggregate seeds") {
  const auto c = aggregate_seeds(std::vector<double>{1, 2, 3});
  CHECK(c.mean == 2.0);
  CHECK(c.std == 1.0);
  CHECK(c.n == 3);
  CHECK(aggregate_seeds(std::vector<double>{4.5}).std == 0.0);
  CHECK_THROWS_AS(aggregate_seeds(std::vector<double>{}), Error);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(5);
    for (auto& x : v) x = u(rng);
    const auto a = aggregate_seeds(v);
    CHECK(a.std == doctest::Approx(oracle::two_pass_std(v)).epsilon(1e-12));
    std::shuffle(v.begin(), v.end(), rng);
    const auto b = aggregate_seeds(v);
    CHECK(a.mean == b.mean);
    CHECK(a.std == b.std);
  }
}

TEST_CASE("cross dataset") {
  std::vector<MetricCell> cells;
  for (double m : {67.1, 73.3, 77.4, 77.9}) cells.push_back({m, 1.0, 5, CellState::value});
  const auto x = cross_dataset(cells);
  CHECK(x.mean == doctest::Approx(73.925).epsilon(1e-12));
  CHECK(std::abs(std::round(x.mean * 10) / 10 - 73.9) < 0.05);
  CHECK(cross_dataset(std::vector<MetricCell>{{5, 1, 5, CellState::value}}).std == 0.0);
  CHECK(cross_dataset(std::vector<MetricCell>(3, {42, 2, 5, CellState::value})).std == 0.0);
  CHECK_THROWS_AS(cross_dataset(std::vector<MetricCell>{MetricCell::undefined()}), Error);
  // Undefined datasets are left out of the average.
  const auto mixed = cross_dataset(std::vector<MetricCell>{{10, 0, 5, CellState::value}, MetricCell::undefined()});
  CHECK(mixed.mean == 10.0);
}

TEST_CASE("build report keeps undefined and inapplicable apart") {
  std::vector<SeedValue> values;
  for (std::uint64_t s = 0; s < 3; ++s) {
    values.push_back({{"fairness", "structural:gap", "cora", "gcn"}, s, CellState::value, 1.0 + static_cast<double>(s)});
    values.push_back({{"fairness", "demographic:dsp", "cora", "gcn"}, s, CellState::undefined, 0});
    values.push_back({{"corruption", "feature_noise:sev1", "cora", "lp"}, s, CellState::inapplicable, 0});
  }
  const Report r = build_report(values, {"abc", 7, kToolVersion});
  CHECK(r.cells.at({"fairness", "structural:gap", "cora", "gcn"}).mean == 2.0);
  CHECK(r.cells.at({"fairness", "demographic:dsp", "cora", "gcn"}).state == CellState::undefined);
  CHECK(r.cells.at({"corruption", "feature_noise:sev1", "cora", "lp"}).state == CellState::inapplicable);

  const std::string csv = report_csv(r);
  CHECK(csv.find("fairness,demographic:dsp,cora,gcn,0,,,true,false\n") != std::string::npos);
  CHECK(csv.find("corruption,feature_noise:sev1,cora,lp,0,,,false,true\n") != std::string::npos);
}

TEST_CASE("emission formats agree and regenerate identically") {
  const auto dir = testing::scratch_dir("report_emit");
  Report one;
  one.provenance = {"h", 0, kToolVersion};
  one.cells[{"ood", "degree:drop", "arxiv", "gcn"}] = {3.5, 0.5, 5, CellState::value};
  emit_report(one, dir / "one.json");
  const std::string csv = io::read_text(dir / "one.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK_THROWS_AS(emit_report(Report{}, dir / "empty"), Error);

  std::vector<SeedValue> values;
  std::mt19937_64 rng(4);
  for (const char* ds : {"a", "b", "c"})
    for (const char* sub : {"x", "y"})
      for (std::uint64_t s = 0; s < 5; ++s)
        values.push_back({{"corruption", sub, ds, "m"}, s, CellState::value, static_cast<double>(rng() % 100)});
  auto rep = assemble_report(values, {"h", 1, kToolVersion});
  emit_report(rep, dir / "r");
  const std::string json_a = io::read_text(dir / "r.json");
  const std::string csv_a = io::read_text(dir / "r.csv");
  std::shuffle(values.begin(), values.end(), rng);
  emit_report(assemble_report(values, {"h", 1, kToolVersion}), dir / "r");
  CHECK(io::read_text(dir / "r.json") == json_a);
  CHECK(io::read_text(dir / "r.csv") == csv_a);

  std::set<std::string> from_json, from_csv;
  const auto doc = nlohmann::json::parse(json_a);
  for (const auto& [axis, subs] : doc["axes"].items())
    for (const auto& [sub, dss] : subs.items())
      for (const auto& [ds, methods] : dss.items())
        for (const auto& [m, cell] : methods.items()) from_json.insert(axis + "," + sub + "," + ds + "," + m);
  std::istringstream in(csv_a);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::size_t cut = 0;
    for (int i = 0; i < 4; ++i) cut = line.find(',', cut) + 1;
    from_csv.insert(line.substr(0, cut - 1));
  }
  CHECK(from_json == from_csv);
  CHECK(from_json.count("corruption,x,all,m") == 1);
}

TEST_CASE("seed value files round trip") {
  const auto dir = testing::scratch_dir("seed_values");
  const std::vector<SeedValue> v{{{"ood", "degree:drop", "d", "m"}, 3, CellState::value, 0.1},
                                 {{"ood", "temporal:drop", "d", "m"}, 3, CellState::inapplicable, 0}};
  io::write_text(dir / "sub" / "x.tsv", format_seed_values(v));
  const auto back = read_results_dir(dir);
  REQUIRE(back.size() == 2);
  CHECK(back[0].value == 0.1);
  CHECK(back[1].state == CellState::inapplicable);
}
