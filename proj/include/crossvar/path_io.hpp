#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "crossvar/fbm.hpp"

namespace crossvar::io {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Parses a complete token as a double; throws IngestionError otherwise.
double parse_double(std::string_view token, std::string_view context);

/// CSV with header "t,value" and one row per grid point.
void write_path_csv(std::ostream& out, const fbm::SamplePath& path);
void write_path_csv(const std::filesystem::path& file, const fbm::SamplePath& path);

// Binary path dump, all fields little-endian:
//
//   offset  size        field
//   0       8           magic "CVPATH01"
//   8       8           H       (IEEE-754 binary64)
//   16      8           N       (uint64, number of intervals)
//   24      8           T       (binary64)
//   32      8           seed    (uint64)
//   40      8 (N+1)     values  (binary64, t_0 .. t_N)
//
// Reading back reproduces values, H, N, T and seed bit for bit.
void write_path_binary(std::ostream& out, const fbm::SamplePath& path);
void write_path_binary(const std::filesystem::path& file, const fbm::SamplePath& path);
fbm::SamplePath read_path_binary(std::istream& in);
fbm::SamplePath read_path_binary(const std::filesystem::path& file);

/// Paired increments (dX1, dX2) of two paths on a common grid.
struct IncrementTable {
  std::vector<double> dx1;
  std::vector<double> dx2;
};

/// CSV with header "dx1,dx2"; one row per grid interval.
void write_increments_csv(std::ostream& out, const fbm::SamplePath& x1, const fbm::SamplePath& x2);

/// Reads a two-column increment CSV. A header row is optional. Errors name
/// the offending 1-based line.
IncrementTable read_increments_csv(std::istream& in);
IncrementTable read_increments_csv(const std::filesystem::path& file);

/// Rebuilds two paths on [0, horizon] starting at 0 from an increment table.
std::pair<fbm::SamplePath, fbm::SamplePath> paths_from_increments(const IncrementTable& table,
                                                                   double horizon = 1.0);

}  // namespace crossvar::io
