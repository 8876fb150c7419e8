#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tle/model.hpp"

namespace tle {

/// Little helper for the versioned binary formats (checkpoints, states).
/// Values are written in host byte order; files are tagged with a magic
/// string and version and are not meant to move between architectures.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u64(std::uint64_t v);
  void f64(double v);
  void str(const std::string& s);
  void f64s(const std::vector<double>& v);
  void bytes(const std::vector<std::uint8_t>& v);

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<double> f64s();
  std::vector<std::uint8_t> bytes();

 private:
  void read(void* dst, std::size_t n);
  std::istream& in_;
};

inline constexpr std::uint64_t kStateFormatVersion = 1;

void write_state(BinaryWriter& w, const EnsembleState& state);
EnsembleState read_state(BinaryReader& r);

void save_state(const std::filesystem::path& path, const EnsembleState& state);
EnsembleState load_state(const std::filesystem::path& path);

/// CSV with header line_index,t,height; one row per line and grid point.
void write_state_csv(std::ostream& out, const EnsembleState& state);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Writes `contents` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tle
