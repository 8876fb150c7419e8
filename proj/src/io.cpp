#include "tle/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "tle/errors.hpp"

namespace tle {

namespace {
constexpr char kStateMagic[] = "TLESTATE";
}

void BinaryWriter::u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }

void BinaryWriter::f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::f64s(const std::vector<double>& v) {
  u64(v.size());
  out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void BinaryWriter::bytes(const std::vector<std::uint8_t>& v) {
  u64(v.size());
  out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size()));
}

void BinaryReader::read(void* dst, std::size_t n) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (!in_) throw Error("truncated binary file");
}

std::uint64_t BinaryReader::u64() {
  std::uint64_t v;
  read(&v, sizeof v);
  return v;
}

double BinaryReader::f64() {
  double v;
  read(&v, sizeof v);
  return v;
}

std::string BinaryReader::str() {
  const auto n = u64();
  if (n > (1u << 30)) throw Error("corrupt binary file (string length)");
  std::string s(n, '\0');
  read(s.data(), n);
  return s;
}

std::vector<double> BinaryReader::f64s() {
  const auto n = u64();
  if (n > (std::uint64_t{1} << 34)) throw Error("corrupt binary file (vector length)");
  std::vector<double> v(n);
  read(v.data(), n * sizeof(double));
  return v;
}

std::vector<std::uint8_t> BinaryReader::bytes() {
  const auto n = u64();
  if (n > (std::uint64_t{1} << 34)) throw Error("corrupt binary file (vector length)");
  std::vector<std::uint8_t> v(n);
  read(v.data(), n);
  return v;
}

void write_state(BinaryWriter& w, const EnsembleState& s) {
  w.str(kStateMagic);
  w.u64(kStateFormatVersion);
  w.f64(s.grid().ell());
  w.f64(s.grid().r());
  w.u64(s.grid().steps());
  w.u64(s.lines());
  w.f64(s.tilt().a());
  w.f64(s.tilt().lambda());
  w.u64(s.tilt().diagnostic() ? 1 : 0);
  w.u64(static_cast<std::uint64_t>(s.boundary().kind));
  w.f64s(s.boundary().left);
  w.f64s(s.boundary().right);
  w.f64s({s.heights().begin(), s.heights().end()});
  w.f64s({s.floor().begin(), s.floor().end()});
  w.f64s({s.ceiling().begin(), s.ceiling().end()});
  std::vector<std::uint8_t> pins;
  if (s.has_pins()) {
    for (std::size_t j = 0; j < s.points(); ++j) pins.push_back(s.is_pinned(j) ? 1 : 0);
  }
  w.bytes(pins);
  std::vector<double> lower, upper;
  if (s.has_site_constraints()) {
    for (std::size_t i = 0; i < s.lines(); ++i) {
      for (std::size_t j = 0; j < s.points(); ++j) {
        lower.push_back(s.site_lower(i, j));
        upper.push_back(s.site_upper(i, j));
      }
    }
  }
  w.f64s(lower);
  w.f64s(upper);
}

EnsembleState read_state(BinaryReader& r) {
  if (r.str() != kStateMagic) throw Error("not an ensemble state record");
  const auto version = r.u64();
  if (version != kStateFormatVersion) throw Error("unsupported ensemble state version");
  const double ell = r.f64();
  const double right = r.f64();
  const auto steps = r.u64();
  const auto lines = r.u64();
  const double a = r.f64();
  const double lambda = r.f64();
  const bool diagnostic = r.u64() != 0;
  const auto kind = static_cast<BoundaryKind>(r.u64());
  auto left_bc = r.f64s();
  auto right_bc = r.f64s();
  BoundarySpec boundary{kind, std::move(left_bc), std::move(right_bc)};
  EnsembleState s(GridInterval(ell, right, steps), lines, TiltParams(a, lambda, diagnostic), boundary);
  const auto heights = r.f64s();
  if (heights.size() != s.heights().size()) throw Error("state record has inconsistent size");
  std::copy(heights.begin(), heights.end(), s.heights().begin());
  s.set_floor(r.f64s());
  s.set_ceiling(r.f64s());
  const auto pins = r.bytes();
  for (std::size_t j = 0; j < pins.size(); ++j) {
    if (pins[j] != 0) s.pin_column(j);
  }
  const auto lower = r.f64s();
  const auto upper = r.f64s();
  if (!lower.empty()) {
    for (std::size_t i = 0; i < s.lines(); ++i) {
      for (std::size_t j = 0; j < s.points(); ++j) {
        const double lo = lower[i * s.points() + j];
        const double hi = upper[i * s.points() + j];
        if (lo != -std::numeric_limits<double>::infinity() || hi != std::numeric_limits<double>::infinity()) {
          s.constrain_site(i, j, lo, hi);
        }
      }
    }
  }
  return s;
}

void save_state(const std::filesystem::path& path, const EnsembleState& state) {
  std::ostringstream buf;
  BinaryWriter w(buf);
  write_state(w, state);
  write_file_atomic(path, buf.str());
}

EnsembleState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open state file " + path.string());
  BinaryReader r(in);
  return read_state(r);
}

void write_state_csv(std::ostream& out, const EnsembleState& state) {
  out << "line_index,t,height\n";
  for (std::size_t i = 0; i < state.lines(); ++i) {
    for (std::size_t j = 0; j < state.points(); ++j) {
      out << i << ',' << format_double(state.grid().time(j)) << ',' << format_double(state.height(i, j)) << '\n';
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tle
