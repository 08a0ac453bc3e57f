#include "herdlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace herdlab {

double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double variance(const std::vector<double>& v) {
  double m = mean(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / double(v.size());
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile: empty input");
  if (q < 0 || q > 1) throw std::invalid_argument("percentile: q outside [0,1]");
  std::sort(v.begin(), v.end());
  double pos = q * double(v.size() - 1);
  auto lo = std::size_t(pos);
  if (lo + 1 >= v.size()) return v.back();
  double frac = pos - double(lo);
  return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / na - double(j) / nb));
  }
  return d;
}

double ks_discrete_vs_samples(const std::vector<double>& points,
                              const std::vector<double>& weights,
                              std::vector<double> samples) {
  if (points.size() != weights.size())
    throw std::invalid_argument("ks: points/weights size mismatch");
  if (points.empty() || samples.empty()) throw std::invalid_argument("ks: empty input");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::sort(samples.begin(), samples.end());
  double total_w = std::accumulate(weights.begin(), weights.end(), 0.0);
  double n = double(samples.size());
  double cdf = 0;
  std::size_t j = 0;
  double d = 0;
  for (std::size_t k : order) {
    double x = points[k];
    // Empirical CDF just below the atom, against the discrete CDF below it.
    while (j < samples.size() && samples[j] < x) ++j;
    d = std::max(d, std::fabs(double(j) / n - cdf));
    cdf += weights[k] / total_w;
    // Empirical CDF at the atom, against the discrete CDF including it.
    while (j < samples.size() && samples[j] <= x) ++j;
    d = std::max(d, std::fabs(double(j) / n - cdf));
  }
  return d;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv: size mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::fabs(p[i] - q[i]);
  return acc / 2;
}

}  // namespace herdlab
