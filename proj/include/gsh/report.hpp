#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace gsh {

enum class CellState : std::uint8_t { value, undefined, inapplicable };

// mean / std over seeds (or datasets). Undefined and inapplicable cells carry
// no numeric payload.
struct MetricCell {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
  CellState state = CellState::value;

  static MetricCell undefined() { return {0.0, 0.0, 0, CellState::undefined}; }
  static MetricCell inapplicable() { return {0.0, 0.0, 0, CellState::inapplicable}; }
  bool has_value() const { return state == CellState::value; }
};

/// Mean and sample std (n - 1 denominator, 0 for a single value).
/// Throws EmptyInput.
MetricCell aggregate_seeds(std::span<const double> values);

/// Mean of the defined cell means and their sample std. Throws AllUndefined.
MetricCell cross_dataset(std::span<const MetricCell> cells);

struct CellKey {
  std::string axis;
  std::string subcondition;
  std::string dataset;
  std::string method;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

// One per-seed measurement. `value` is empty for undefined/inapplicable.
struct SeedValue {
  CellKey key;
  std::uint64_t seed = 0;
  CellState state = CellState::value;
  double value = 0.0;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string tool_version;
};

// axis -> subcondition -> dataset -> method -> cell.
struct Report {
  std::map<CellKey, MetricCell> cells;
  Provenance provenance;
};

inline constexpr const char* kToolVersion = "0.3.0";

/// Seed aggregation per key. A key whose seeds are all inapplicable is
/// inapplicable; all undefined (or mixed without values) is undefined;
/// otherwise the defined values are aggregated.
Report build_report(std::span<const SeedValue> values, Provenance provenance);

inline constexpr const char* kAllDatasets = "all";

/// For every (axis, subcondition, method) present on >= 2 datasets, adds a
/// cross_dataset cell under dataset "all".
void add_cross_dataset(Report& report);

std::string report_json(const Report& report);
/// Columns: axis, subcondition, dataset, method, seed_count, mean, std,
/// undefined, inapplicable.
std::string report_csv(const Report& report);
/// Writes `<stem>.json` and `<stem>.csv` next to each other.
void emit_report(const Report& report, const std::filesystem::path& out);

/// Per-seed result files: "axis<TAB>subcondition<TAB>dataset<TAB>method<TAB>seed<TAB>value"
/// with value a number, "undefined" or "inapplicable".
std::string format_seed_values(std::span<const SeedValue> values);
std::vector<SeedValue> read_seed_values(const std::filesystem::path& path);
/// All *.tsv files under `dir`, in path order.
std::vector<SeedValue> read_results_dir(const std::filesystem::path& dir);

}  // namespace gsh
