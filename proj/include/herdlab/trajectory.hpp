#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace herdlab {

// Uniformly sampled multi-column time series.  values[c][i] is column c at
// time t0 + i*dt.  Metadata rides along so output files are self-describing.
struct Trajectory {
  double t0 = 0;
  double dt = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;
  std::string model_id;
  std::string params_digest;
  std::uint64_t seed = 0;
  std::string notes;

  std::size_t size() const { return values.empty() ? 0 : values[0].size(); }
  double time(std::size_t i) const { return t0 + double(i) * dt; }
  const std::vector<double>& column(const std::string& name) const;
  bool consistent() const;
};

// Text format: '#key=value' header lines, then a '#' column header line,
// then one row per sample with time first.  Numbers use %.17g so a
// write/read round trip is exact.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);
Trajectory read_trajectory_csv(std::istream& is);
void write_trajectory_csv_file(const std::string& path, const Trajectory& t);
Trajectory read_trajectory_csv_file(const std::string& path);

// Binary format: "HLTRJB1\n" magic, then length-prefixed metadata and
// column-major little-endian f64 payload.  Used for large runs.
void write_trajectory_binary_file(const std::string& path, const Trajectory& t);
Trajectory read_trajectory_binary_file(const std::string& path);

// Drops samples with time(i) < t_burn and rebases t0.
Trajectory discard_burn_in(const Trajectory& t, double t_burn);

}  // namespace herdlab
