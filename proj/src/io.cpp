#include "gsh/io.hpp"
#include "gsh/error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gsh::io {
namespace {

std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32(unsigned char* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

}  // namespace

void for_each_record(const std::filesystem::path& path,
                     const std::function<void(std::span<const std::string_view>, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    fields.clear();
    std::string_view rest(line);
    for (;;) {
      const auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    fn(fields, line_no);
  }
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

std::int64_t parse_i64(std::string_view text, std::string_view what) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

double parse_f64(std::string_view text, std::string_view what) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

FeatureMatrix read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::array<unsigned char, 16> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), header.size()))
    throw Error(ErrorCode::ParseError, "truncated feature header: " + path.string());
  if (std::memcmp(header.data(), "GSFH", 4) != 0)
    throw Error(ErrorCode::ParseError, "bad feature magic: " + path.string());
  const std::uint32_t rows = load_u32(header.data() + 4);
  const std::uint32_t cols = load_u32(header.data() + 8);
  FeatureMatrix x(rows, cols);
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> raw(count * 4);
  if (count > 0 && !in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw Error(ErrorCode::LengthMismatch, "feature payload shorter than header: " + path.string());
  for (std::size_t i = 0; i < count; ++i)
    x.data()[i] = std::bit_cast<float>(load_u32(raw.data() + 4 * i));
  return x;
}

void write_features(const std::filesystem::path& path, const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, path.string());
  std::array<unsigned char, 16> header{};
  std::memcpy(header.data(), "GSFH", 4);
  store_u32(header.data() + 4, static_cast<std::uint32_t>(features.rows()));
  store_u32(header.data() + 8, static_cast<std::uint32_t>(features.cols()));
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  const std::size_t count = static_cast<std::size_t>(features.size());
  std::vector<unsigned char> raw(count * 4);
  for (std::size_t i = 0; i < count; ++i)
    store_u32(raw.data() + 4 * i, std::bit_cast<std::uint32_t>(features.data()[i]));
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(ErrorCode::IoError, path.string());
}

SplitAssignment read_split(const std::filesystem::path& path, std::size_t num_units) {
  SplitAssignment split(num_units);
  std::vector<bool> seen(num_units, false);
  for_each_record(path, [&](std::span<const std::string_view> f, std::size_t line) {
    if (f.size() < 2) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line));
    const auto unit = parse_u64(f[0], "split unit id");
    if (unit >= num_units)
      throw Error(ErrorCode::BadId, "split unit " + std::to_string(unit) + " in " + path.string());
    if (seen[unit])
      throw Error(ErrorCode::ParseError, "unit " + std::to_string(unit) + " assigned twice in " + path.string());
    seen[unit] = true;
    split.roles[unit] = parse_role(f[1]);
  });
  return split;
}

void write_split(const std::filesystem::path& path, const SplitAssignment& split) {
  std::string out;
  out.reserve(split.size() * 10);
  for (std::size_t i = 0; i < split.size(); ++i) {
    out += std::to_string(i);
    out += '\t';
    out += to_string(split.roles[i]);
    out += '\n';
  }
  write_text(path, out);
}

void write_text(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::IoError, path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gsh::io
