#include "crossvar/path_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "crossvar/errors.hpp"

namespace crossvar::io {
namespace {

constexpr std::array<char, 8> kMagic = {'C', 'V', 'P', 'A', 'T', 'H', '0', '1'};

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
    return r;
  }
  return v;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  const std::uint64_t le = to_little(v);
  char bytes[8];
  std::memcpy(bytes, &le, 8);
  out.write(bytes, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in, const char* field) {
  char bytes[8];
  if (!in.read(bytes, 8)) throw IngestionError(std::string("binary path: truncated at ") + field);
  std::uint64_t le = 0;
  std::memcpy(&le, bytes, 8);
  return to_little(le);
}

double get_f64(std::istream& in, const char* field) {
  return std::bit_cast<double>(get_u64(in, field));
}

std::ofstream open_out(const std::filesystem::path& file, bool binary) {
  std::ofstream out(file, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& file, bool binary) {
  std::ifstream in(file, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IngestionError("cannot open " + file.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view token, std::string_view context) {
  token = trim(token);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw IngestionError(std::string(context) + ": not a number: '" + std::string(token) + "'");
  }
  return value;
}

void write_path_csv(std::ostream& out, const fbm::SamplePath& path) {
  out << "t,value\n";
  for (std::size_t k = 0; k <= path.intervals(); ++k) {
    out << format_double(path.time(k)) << ',' << format_double(path[k]) << '\n';
  }
}

void write_path_csv(const std::filesystem::path& file, const fbm::SamplePath& path) {
  auto out = open_out(file, false);
  write_path_csv(out, path);
}

void write_path_binary(std::ostream& out, const fbm::SamplePath& path) {
  out.write(kMagic.data(), kMagic.size());
  put_f64(out, path.meta().hurst);
  put_u64(out, path.intervals());
  put_f64(out, path.horizon());
  put_u64(out, path.meta().seed);
  for (double v : path.values()) put_f64(out, v);
}

void write_path_binary(const std::filesystem::path& file, const fbm::SamplePath& path) {
  auto out = open_out(file, true);
  write_path_binary(out, path);
}

fbm::SamplePath read_path_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IngestionError("binary path: bad magic");
  }
  const double hurst = get_f64(in, "H");
  const std::uint64_t n = get_u64(in, "N");
  const double horizon = get_f64(in, "T");
  const std::uint64_t seed = get_u64(in, "seed");
  if (n < 1 || n > (std::uint64_t{1} << 32)) throw IngestionError("binary path: bad N");
  std::vector<double> values(n + 1);
  for (auto& v : values) v = get_f64(in, "values");
  fbm::PathMeta meta;
  meta.hurst = hurst;
  meta.seed = seed;
  meta.generator = "binary-dump";
  return fbm::SamplePath(horizon, std::move(values), std::move(meta));
}

fbm::SamplePath read_path_binary(const std::filesystem::path& file) {
  auto in = open_in(file, true);
  return read_path_binary(in);
}

void write_increments_csv(std::ostream& out, const fbm::SamplePath& x1, const fbm::SamplePath& x2) {
  fbm::require_same_grid(x1, x2, "write_increments_csv");
  out << "dx1,dx2\n";
  for (std::size_t k = 1; k <= x1.intervals(); ++k) {
    out << format_double(x1[k] - x1[k - 1]) << ',' << format_double(x2[k] - x2[k - 1]) << '\n';
  }
}

IncrementTable read_increments_csv(std::istream& in) {
  IncrementTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    const std::string where = "row " + std::to_string(line_no);
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw IngestionError(where + ": expected two comma-separated columns");
    }
    const std::string_view a = trim(row.substr(0, comma));
    const std::string_view b = trim(row.substr(comma + 1));
    if (table.dx1.empty() && line_no == 1 && a == "dx1" && b == "dx2") continue;
    table.dx1.push_back(parse_double(a, where));
    table.dx2.push_back(parse_double(b, where));
  }
  if (table.dx1.size() < 2) throw IngestionError("increment CSV needs at least two rows");
  return table;
}

IncrementTable read_increments_csv(const std::filesystem::path& file) {
  auto in = open_in(file, false);
  return read_increments_csv(in);
}

std::pair<fbm::SamplePath, fbm::SamplePath> paths_from_increments(const IncrementTable& table,
                                                                   double horizon) {
  const std::size_t n = table.dx1.size();
  std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    a[k + 1] = a[k] + table.dx1[k];
    b[k + 1] = b[k] + table.dx2[k];
  }
  fbm::PathMeta meta;
  meta.generator = "increment-table";
  return {fbm::SamplePath(horizon, std::move(a), meta), fbm::SamplePath(horizon, std::move(b), meta)};
}

}  // namespace crossvar::io
