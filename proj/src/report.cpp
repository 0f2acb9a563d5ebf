#include "gsh/report.hpp"
#include "gsh/error.hpp"
#include "gsh/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace gsh {

MetricCell aggregate_seeds(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values to aggregate");
  // Sorting first makes the floating-point sum independent of input order.
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double sum = 0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return {mean, std, v.size(), CellState::value};
}

MetricCell cross_dataset(std::span<const MetricCell> cells) {
  std::vector<double> means;
  for (const MetricCell& c : cells)
    if (c.has_value()) means.push_back(c.mean);
  if (means.empty()) throw Error(ErrorCode::AllUndefined, "no defined cells");
  MetricCell out = aggregate_seeds(means);
  return out;
}

Report build_report(std::span<const SeedValue> values, Provenance provenance) {
  std::map<CellKey, std::vector<const SeedValue*>> grouped;
  for (const SeedValue& v : values) grouped[v.key].push_back(&v);
  Report report;
  report.provenance = std::move(provenance);
  for (const auto& [key, vals] : grouped) {
    std::vector<double> defined;
    bool all_inapplicable = true;
    for (const SeedValue* v : vals) {
      if (v->state == CellState::value) defined.push_back(v->value);
      if (v->state != CellState::inapplicable) all_inapplicable = false;
    }
    if (all_inapplicable)
      report.cells[key] = MetricCell::inapplicable();
    else if (defined.empty())
      report.cells[key] = MetricCell::undefined();
    else
      report.cells[key] = aggregate_seeds(defined);
  }
  return report;
}

void add_cross_dataset(Report& report) {
  struct Group {
    std::vector<MetricCell> cells;
    bool all_inapplicable = true;
  };
  std::map<std::tuple<std::string, std::string, std::string>, Group> groups;
  for (const auto& [key, cell] : report.cells) {
    if (key.dataset == kAllDatasets) continue;
    auto& g = groups[{key.axis, key.subcondition, key.method}];
    g.cells.push_back(cell);
    if (cell.state != CellState::inapplicable) g.all_inapplicable = false;
  }
  for (const auto& [k, g] : groups) {
    if (g.cells.size() < 2) continue;
    const CellKey key{std::get<0>(k), std::get<1>(k), kAllDatasets, std::get<2>(k)};
    if (g.all_inapplicable) {
      report.cells[key] = MetricCell::inapplicable();
      continue;
    }
    const bool any = std::any_of(g.cells.begin(), g.cells.end(), [](const MetricCell& c) { return c.has_value(); });
    report.cells[key] = any ? cross_dataset(g.cells) : MetricCell::undefined();
  }
}

namespace {

std::string_view state_name(CellState s) {
  switch (s) {
    case CellState::value: return "value";
    case CellState::undefined: return "undefined";
    case CellState::inapplicable: return "inapplicable";
  }
  return "value";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_json(const Report& report) {
  nlohmann::ordered_json doc;
  doc["provenance"] = {{"config_hash", report.provenance.config_hash},
                       {"master_seed", report.provenance.master_seed},
                       {"tool_version", report.provenance.tool_version}};
  nlohmann::ordered_json axes = nlohmann::ordered_json::object();
  for (const auto& [key, cell] : report.cells) {
    nlohmann::ordered_json c;
    c["seed_count"] = cell.n;
    c["state"] = std::string(state_name(cell.state));
    if (cell.has_value()) {
      c["mean"] = cell.mean;
      c["std"] = cell.std;
    } else {
      c["mean"] = nullptr;
      c["std"] = nullptr;
    }
    axes[key.axis][key.subcondition][key.dataset][key.method] = std::move(c);
  }
  doc["axes"] = std::move(axes);
  return doc.dump(2) + "\n";
}

std::string report_csv(const Report& report) {
  std::string out = "axis,subcondition,dataset,method,seed_count,mean,std,undefined,inapplicable\n";
  for (const auto& [key, cell] : report.cells) {
    out += csv_field(key.axis) + ',' + csv_field(key.subcondition) + ',' + csv_field(key.dataset) + ',' +
           csv_field(key.method) + ',' + std::to_string(cell.n) + ',';
    if (cell.has_value()) out += io::format_double(cell.mean) + ',' + io::format_double(cell.std);
    else out += ',';
    out += cell.state == CellState::undefined ? ",true" : ",false";
    out += cell.state == CellState::inapplicable ? ",true\n" : ",false\n";
  }
  return out;
}

void emit_report(const Report& report, const std::filesystem::path& out) {
  if (report.cells.empty()) throw Error(ErrorCode::EmptyInput, "report has no cells");
  std::filesystem::path stem = out;
  if (stem.extension() == ".json" || stem.extension() == ".csv") stem.replace_extension();
  io::write_text(std::filesystem::path(stem).concat(".json"), report_json(report));
  io::write_text(std::filesystem::path(stem).concat(".csv"), report_csv(report));
}

std::string format_seed_values(std::span<const SeedValue> values) {
  std::string out;
  for (const SeedValue& v : values) {
    out += v.key.axis + '\t' + v.key.subcondition + '\t' + v.key.dataset + '\t' + v.key.method + '\t' +
           std::to_string(v.seed) + '\t';
    out += v.state == CellState::value ? io::format_double(v.value) : std::string(state_name(v.state));
    out += '\n';
  }
  return out;
}

std::vector<SeedValue> read_seed_values(const std::filesystem::path& path) {
  std::vector<SeedValue> out;
  io::for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() != 6) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    SeedValue v;
    v.key = {std::string(f[0]), std::string(f[1]), std::string(f[2]), std::string(f[3])};
    v.seed = io::parse_u64(f[4], "seed");
    if (f[5] == "undefined")
      v.state = CellState::undefined;
    else if (f[5] == "inapplicable")
      v.state = CellState::inapplicable;
    else
      v.value = io::parse_f64(f[5], "value");
    out.push_back(std::move(v));
  });
  return out;
}

std::vector<SeedValue> read_results_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::MissingFile, dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& de : std::filesystem::recursive_directory_iterator(dir))
    if (de.is_regular_file() && de.path().extension() == ".tsv") files.push_back(de.path());
  std::sort(files.begin(), files.end());
  std::vector<SeedValue> out;
  for (const auto& f : files) {
    auto vals = read_seed_values(f);
    out.insert(out.end(), vals.begin(), vals.end());
  }
  return out;
}

}  // namespace gsh
