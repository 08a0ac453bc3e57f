#pragma once

#include <cstddef>
#include <vector>

namespace herdlab {

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // population variance

// q in [0, 1]; linear interpolation between order statistics.
double percentile(std::vector<double> v, double q);

// Two-sample Kolmogorov-Smirnov statistic, sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// KS distance between a discrete distribution (atoms at `points` with mass
// `weights`, not necessarily sorted) and an empirical sample.  The sup is
// attained at an atom, just before or just after it.
double ks_discrete_vs_samples(const std::vector<double>& points,
                              const std::vector<double>& weights,
                              std::vector<double> samples);

// Total variation distance between two discrete distributions on the same
// support, (1/2) sum |p_i - q_i|.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace herdlab
