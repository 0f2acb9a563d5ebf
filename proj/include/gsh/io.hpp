#pragma once

#include "gsh/graph_store.hpp"

#include <charconv>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsh::io {

/// Calls `fn(fields, line_number)` for every non-empty line of a
/// tab-separated text file. Lines starting with '#' are skipped.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(std::span<const std::string_view>, std::size_t)>& fn);

std::uint64_t parse_u64(std::string_view text, std::string_view what);
std::int64_t parse_i64(std::string_view text, std::string_view what);
double parse_f64(std::string_view text, std::string_view what);

/// Shortest round-trip decimal form.
std::string format_double(double v);

// Binary feature files: "GSFH", u32 rows, u32 cols, then row-major float32,
// all little-endian.
FeatureMatrix read_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const FeatureMatrix& features);

/// "unit_id<TAB>role"; units not listed are excluded.
SplitAssignment read_split(const std::filesystem::path& path, std::size_t num_units);
void write_split(const std::filesystem::path& path, const SplitAssignment& split);

void write_text(const std::filesystem::path& path, std::string_view contents);
std::string read_text(const std::filesystem::path& path);

}  // namespace gsh::io
