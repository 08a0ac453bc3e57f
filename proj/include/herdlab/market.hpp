#pragma once

#include "herdlab/trajectory.hpp"

#include <string>
#include <utility>
#include <vector>

namespace herdlab {

// Chartist mood, the normalized optimist-pessimist imbalance.
double mood(double n_p, double n_o);

// Inverse map: split the chartist fraction 1 - n_f by mood xi.
// Returns {n_p, n_o}.
std::pair<double, double> populations_from_mood(double n_f, double xi);

// Detrended log price in the large-market limit, r0 (n_o - n_p)/n_f.
double log_price(double r0, double n_f, double xi);

// Log price along a trajectory carrying n_f and xi columns.
std::vector<double> price_series(const Trajectory& t, double r0);

// Windowed returns r_i = p[i + k] - p[i] with k = window/dt; the window must
// be an integer multiple of dt.  Entry i of the result is the return at time
// t0 + (i + k) dt.
std::vector<double> returns_series(const std::vector<double>& price, double dt, double window);

std::vector<double> abs_values(const std::vector<double>& v);

// Price and return track derived from a model trajectory.
struct MarketSeries {
  double t0 = 0;
  double dt = 0;
  double window = 0;
  std::vector<double> price;
  std::vector<double> ret;  // aligned to price[k..], k = window/dt

  // Columns: t, p, r, abs_r; rows limited to where the return exists.
  void write_csv_file(const std::string& path) const;
};

MarketSeries market_series(const Trajectory& t, double r0, double window);

}  // namespace herdlab
