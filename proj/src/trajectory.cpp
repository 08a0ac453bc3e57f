#include "herdlab/trajectory.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace herdlab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void fail(const std::string& what) { throw std::runtime_error(what); }

// Little-endian raw writes.  The targets we build for are all little endian;
// the magic byte order is checked on read.
template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) fail("trajectory binary: truncated file");
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put<std::uint64_t>(os, s.size());
  os.write(s.data(), std::streamsize(s.size()));
}

std::string get_string(std::istream& is) {
  auto len = get<std::uint64_t>(is);
  if (len > (1u << 20)) fail("trajectory binary: implausible string length");
  std::string s(len, '\0');
  is.read(s.data(), std::streamsize(len));
  if (!is) fail("trajectory binary: truncated string");
  return s;
}

}  // namespace

const std::vector<double>& Trajectory::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return values[c];
  throw std::out_of_range("trajectory: no column named " + name);
}

bool Trajectory::consistent() const {
  if (columns.size() != values.size()) return false;
  if (dt <= 0) return false;
  for (const auto& v : values)
    if (v.size() != size()) return false;
  return true;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "#model=" << t.model_id << "\n";
  os << "#params_digest=" << t.params_digest << "\n";
  os << "#seed=" << t.seed << "\n";
  os << "#t0=" << fmt17(t.t0) << "\n";
  os << "#dt=" << fmt17(t.dt) << "\n";
  if (!t.notes.empty()) os << "#notes=" << t.notes << "\n";
  os << "#t";
  for (const auto& c : t.columns) os << "," << c;
  os << "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << fmt17(t.time(i));
    for (const auto& v : t.values) os << "," << fmt17(v[i]);
    os << "\n";
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  Trajectory t;
  std::string line;
  bool header_done = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_done) fail("trajectory csv: header line after data");
      auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string val = line.substr(eq + 1);
        if (key == "model") t.model_id = val;
        else if (key == "params_digest") t.params_digest = val;
        else if (key == "seed") t.seed = std::stoull(val);
        else if (key == "t0") t.t0 = std::stod(val);
        else if (key == "dt") t.dt = std::stod(val);
        else if (key == "notes") t.notes = val;
        // Unknown keys pass through silently so the format can grow.
      } else if (line.rfind("#t", 0) == 0) {
        std::stringstream ss(line.substr(1));
        std::string col;
        bool first = true;
        while (std::getline(ss, col, ',')) {
          if (first) {
            first = false;  // leading 't'
            continue;
          }
          t.columns.push_back(col);
        }
        t.values.assign(t.columns.size(), {});
        header_done = true;
      }
      continue;
    }
    if (!header_done) fail("trajectory csv: data before column header");
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        first = false;  // time column is implied by t0/dt
        continue;
      }
      if (c >= t.values.size()) fail("trajectory csv: too many cells in row");
      t.values[c++].push_back(std::stod(cell));
    }
    if (c != t.values.size()) fail("trajectory csv: short row");
  }
  return t;
}

void write_trajectory_csv_file(const std::string& path, const Trajectory& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("cannot open for write: " + path);
  write_trajectory_csv(os, t);
  if (!os) fail("write failed: " + path);
}

Trajectory read_trajectory_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("cannot open for read: " + path);
  return read_trajectory_csv(is);
}

void write_trajectory_binary_file(const std::string& path, const Trajectory& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("cannot open for write: " + path);
  os.write("HLTRJB1\n", 8);
  put(os, t.t0);
  put(os, t.dt);
  put(os, t.seed);
  put_string(os, t.model_id);
  put_string(os, t.params_digest);
  put_string(os, t.notes);
  put<std::uint64_t>(os, t.columns.size());
  put<std::uint64_t>(os, t.size());
  for (const auto& c : t.columns) put_string(os, c);
  for (const auto& v : t.values)
    os.write(reinterpret_cast<const char*>(v.data()),
             std::streamsize(v.size() * sizeof(double)));
  if (!os) fail("write failed: " + path);
}

Trajectory read_trajectory_binary_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("cannot open for read: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "HLTRJB1\n", 8) != 0)
    fail("trajectory binary: bad magic in " + path);
  Trajectory t;
  t.t0 = get<double>(is);
  t.dt = get<double>(is);
  t.seed = get<std::uint64_t>(is);
  t.model_id = get_string(is);
  t.params_digest = get_string(is);
  t.notes = get_string(is);
  auto ncol = get<std::uint64_t>(is);
  auto nrow = get<std::uint64_t>(is);
  if (ncol > 64) fail("trajectory binary: implausible column count");
  for (std::uint64_t c = 0; c < ncol; ++c) t.columns.push_back(get_string(is));
  t.values.assign(ncol, std::vector<double>(nrow));
  for (auto& v : t.values) {
    is.read(reinterpret_cast<char*>(v.data()), std::streamsize(nrow * sizeof(double)));
    if (!is) fail("trajectory binary: truncated payload");
  }
  return t;
}

Trajectory discard_burn_in(const Trajectory& t, double t_burn) {
  std::size_t skip = 0;
  while (skip < t.size() && t.time(skip) < t_burn) ++skip;
  Trajectory out = t;
  out.t0 = t.time(skip);
  for (auto& v : out.values) v.erase(v.begin(), v.begin() + std::ptrdiff_t(skip));
  return out;
}

}  // namespace herdlab
