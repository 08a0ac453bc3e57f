#include "herdlab/oracle.hpp"

#include "herdlab/parallel.hpp"
#include "herdlab/rates.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace herdlab {

void GeneratorMatrix::finalize() {
  cols.assign(rows.size(), {});
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [j, q] : rows[i])
      cols[std::size_t(j)].emplace_back(std::int32_t(i), q);
}

std::size_t SimplexIndex::index(std::int64_t x0, std::int64_t x1) const {
  return std::size_t(x0 * (N + 1) - x0 * (x0 - 1) / 2 + x1);
}

PopulationState SimplexIndex::state(std::size_t idx) const {
  std::int64_t x0 = 0;
  std::size_t base = 0;
  while (base + std::size_t(N - x0 + 1) <= idx) {
    base += std::size_t(N - x0 + 1);
    ++x0;
  }
  std::int64_t x1 = std::int64_t(idx - base);
  return PopulationState::three_state(x0, x1, N - x0 - x1);
}

namespace {

GeneratorMatrix make_empty(std::size_t n) {
  GeneratorMatrix g;
  g.rows.assign(n, {});
  g.exit_rate.assign(n, 0.0);
  return g;
}

void add_edge(GeneratorMatrix& g, std::size_t i, std::size_t j, double q) {
  if (q <= 0) return;
  g.rows[i].emplace_back(std::int32_t(j), q);
  g.exit_rate[i] += q;
}

template <class RateFn>
GeneratorMatrix build_three_state(std::int64_t N, RateFn&& rates_of) {
  SimplexIndex si(N);
  GeneratorMatrix g = make_empty(si.size());
  for (std::size_t idx = 0; idx < si.size(); ++idx) {
    PopulationState s = si.state(idx);
    ThreeStateRates r = rates_of(s);
    for (int c = 0; c < 6; ++c) {
      int from = kChannelFrom[std::size_t(c)];
      int to = kChannelTo[std::size_t(c)];
      if (s.counts[std::size_t(from)] == 0) continue;
      PopulationState next = s;
      next.counts[std::size_t(from)] -= 1;
      next.counts[std::size_t(to)] += 1;
      add_edge(g, idx, si.index(next.counts[0], next.counts[1]), r.rate[std::size_t(c)]);
    }
  }
  g.finalize();
  return g;
}

}  // namespace

GeneratorMatrix two_state_generator(const TwoStateParams& p) {
  p.validate();
  GeneratorMatrix g = make_empty(std::size_t(p.N + 1));
  for (std::int64_t x = 0; x <= p.N; ++x) {
    TwoStateRates r = two_state_rates(x, p);
    if (x < p.N) add_edge(g, std::size_t(x), std::size_t(x + 1), r.up);
    if (x > 0) add_edge(g, std::size_t(x), std::size_t(x - 1), r.down);
  }
  g.finalize();
  return g;
}

GeneratorMatrix three_state_generator(const GeneralThreeStateParams& p) {
  p.validate();
  return build_three_state(p.N, [&](const PopulationState& s) { return three_state_rates(s, p); });
}

GeneratorMatrix three_state_financial_generator(const ThreeStateParams& p) {
  p.validate();
  return build_three_state(
      p.N, [&](const PopulationState& s) { return three_state_financial_rates(s, p); });
}

std::vector<double> stationary_birth_death(const TwoStateParams& p) {
  p.validate();
  std::vector<double> logpi(std::size_t(p.N + 1));
  logpi[0] = 0;
  for (std::int64_t x = 0; x < p.N; ++x) {
    double up = two_state_rates(x, p).up;
    double down = two_state_rates(x + 1, p).down;
    if (up <= 0 || down <= 0)
      throw std::runtime_error("birth-death: chain not irreducible at x = " + std::to_string(x));
    logpi[std::size_t(x + 1)] = logpi[std::size_t(x)] + std::log(up) - std::log(down);
  }
  double m = *std::max_element(logpi.begin(), logpi.end());
  std::vector<double> pi(logpi.size());
  double z = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) z += (pi[i] = std::exp(logpi[i] - m));
  for (auto& v : pi) v /= z;
  return pi;
}

namespace {

std::size_t reachable_count(
    const std::vector<std::vector<std::pair<std::int32_t, double>>>& adj) {
  std::vector<char> seen(adj.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (const auto& [j, q] : adj[i]) {
      (void)q;
      if (!seen[std::size_t(j)]) {
        seen[std::size_t(j)] = 1;
        ++count;
        queue.push_back(std::size_t(j));
      }
    }
  }
  return count;
}

}  // namespace

bool is_irreducible(const GeneratorMatrix& g) {
  if (g.size() == 0) return false;
  if (g.cols.size() != g.size()) throw std::logic_error("generator: finalize() not called");
  return reachable_count(g.rows) == g.size() && reachable_count(g.cols) == g.size();
}

std::vector<double> stationary_distribution(const GeneratorMatrix& g) {
  if (!is_irreducible(g))
    throw std::runtime_error("stationary distribution: generator is not irreducible");
  const auto n = std::int32_t(g.size());
  const std::int32_t last = n - 1;
  std::vector<Eigen::Triplet<double>> trip;
  // pi Q = 0 transposed: Q^T pi^T = 0, with the last balance equation
  // replaced by the normalization sum pi = 1.
  for (std::int32_t i = 0; i < n; ++i) {
    for (const auto& [j, q] : g.rows[std::size_t(i)])
      if (j != last) trip.emplace_back(j, i, q);
    if (i != last) trip.emplace_back(i, i, -g.exit_rate[std::size_t(i)]);
  }
  for (std::int32_t k = 0; k < n; ++k) trip.emplace_back(last, k, 1.0);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("stationary distribution: factorization failed");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[last] = 1.0;
  Eigen::VectorXd x = lu.solve(b);
  std::vector<double> pi(std::size_t(n), 0.0);
  double z = 0;
  for (std::int32_t i = 0; i < n; ++i) {
    double v = x[i];
    if (v < -1e-12)
      throw std::runtime_error("stationary distribution: negative probability from solve");
    pi[std::size_t(i)] = std::max(v, 0.0);
    z += pi[std::size_t(i)];
  }
  for (auto& v : pi) v /= z;
  return pi;
}

void apply_generator_transpose_serial(const GeneratorMatrix& g, const std::vector<double>& in,
                                      std::vector<double>& out) {
  if (g.cols.size() != g.size()) throw std::logic_error("generator: finalize() not called");
  out.resize(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    double acc = -g.exit_rate[j] * in[j];
    for (const auto& [i, q] : g.cols[j]) acc += q * in[std::size_t(i)];
    out[j] = acc;
  }
}

void apply_generator_transpose(const GeneratorMatrix& g, const std::vector<double>& in,
                               std::vector<double>& out, int jobs) {
  if (g.cols.size() != g.size()) throw std::logic_error("generator: finalize() not called");
  out.resize(g.size());
  par::for_each(g.size(), jobs, [&](std::size_t j) {
    double acc = -g.exit_rate[j] * in[j];
    for (const auto& [i, q] : g.cols[j]) acc += q * in[std::size_t(i)];
    out[j] = acc;
  });
}

std::vector<double> master_evolve(const GeneratorMatrix& g, std::vector<double> p0, double t,
                                  int jobs) {
  if (p0.size() != g.size()) throw std::invalid_argument("master_evolve: size mismatch");
  if (t < 0) throw std::invalid_argument("master_evolve: negative time");
  double lam = 0;
  for (double e : g.exit_rate) lam = std::max(lam, e);
  if (lam == 0 || t == 0) return p0;

  // Uniformized chain: P = I + Q/lam, p(t) = sum_k Poisson(lam t; k) p0 P^k.
  // Work in chunks so the Poisson tail stays short.
  const double max_a = 32.0;
  auto chunks = std::size_t(std::ceil(lam * t / max_a));
  double a = lam * t / double(chunks);

  // Poisson(a) weights from the mode outward, truncated at ~1e-18 relative
  // and renormalized so each chunk conserves probability exactly.
  auto k0 = std::size_t(a);
  auto logw = [&](std::size_t k) { return -a + double(k) * std::log(a) - std::lgamma(double(k) + 1); };
  double lw0 = logw(k0);
  std::size_t kmax = k0;
  while (logw(kmax + 1) > lw0 - 42.0) ++kmax;
  std::vector<double> w(kmax + 1);
  double wsum = 0;
  for (std::size_t k = 0; k <= kmax; ++k) wsum += (w[k] = std::exp(logw(k) - lw0));
  for (auto& v : w) v /= wsum;

  std::vector<double> v = std::move(p0), qv(g.size()), acc(g.size());
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) acc[i] = w[0] * v[i];
    for (std::size_t k = 1; k <= kmax; ++k) {
      apply_generator_transpose(g, v, qv, jobs);
      for (std::size_t i = 0; i < g.size(); ++i) v[i] += qv[i] / lam;
      for (std::size_t i = 0; i < g.size(); ++i) acc[i] += w[k] * v[i];
    }
    v = acc;
  }
  return v;
}

XiMarginal xi_marginal(const std::vector<double>& dist, std::int64_t N) {
  SimplexIndex si(N);
  if (dist.size() != si.size()) throw std::invalid_argument("xi_marginal: size mismatch");
  std::vector<std::pair<double, double>> atoms;
  XiMarginal out;
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    PopulationState s = si.state(idx);
    std::int64_t nc = s.chartists();
    if (nc == 0) {
      out.dropped_mass += dist[idx];
      continue;
    }
    double xi = double(s.counts[2] - s.counts[1]) / double(nc);
    atoms.emplace_back(xi, dist[idx]);
  }
  std::sort(atoms.begin(), atoms.end());
  for (const auto& [x, wgt] : atoms) {
    if (!out.atoms.empty() && out.atoms.back() == x)
      out.weights.back() += wgt;
    else {
      out.atoms.push_back(x);
      out.weights.push_back(wgt);
    }
  }
  return out;
}

std::vector<double> group_marginal(const std::vector<double>& dist, std::int64_t N, int group) {
  SimplexIndex si(N);
  if (dist.size() != si.size()) throw std::invalid_argument("group_marginal: size mismatch");
  if (group < 0 || group > 2) throw std::invalid_argument("group_marginal: bad group");
  std::vector<double> out(std::size_t(N + 1), 0.0);
  for (std::size_t idx = 0; idx < dist.size(); ++idx)
    out[std::size_t(si.state(idx).counts[std::size_t(group)])] += dist[idx];
  return out;
}

DensityOnGrid fp_stationary_density(const std::function<double(double)>& drift,
                                    const std::function<double(double)>& diff, double lo,
                                    double hi, std::size_t n) {
  if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("fp density: need 0 < lo < hi");
  if (n < 8) throw std::invalid_argument("fp density: grid too small");
  DensityOnGrid d;
  d.x.resize(n);
  double ratio = std::log(hi / lo) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i) d.x[i] = lo * std::exp(double(i) * ratio);
  d.x.back() = hi;

  // Phi(x) = int 2 a / b^2, accumulated by trapezoid on the grid.
  std::vector<double> logp(n);
  double phi = 0;
  double prev_g = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double b = diff(d.x[i]);
    if (!(b > 0)) throw std::runtime_error("fp density: diffusion must be positive on the grid");
    double gi = 2 * drift(d.x[i]) / (b * b);
    if (i > 0) phi += 0.5 * (prev_g + gi) * (d.x[i] - d.x[i - 1]);
    prev_g = gi;
    logp[i] = phi - 2 * std::log(b);
  }
  double m = *std::max_element(logp.begin(), logp.end());
  d.pdf.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.pdf[i] = std::exp(logp[i] - m);
  double z = 0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    z += 0.5 * (d.pdf[i] + d.pdf[i + 1]) * (d.x[i + 1] - d.x[i]);
  for (auto& v : d.pdf) v /= z;
  return d;
}

double density_mass(const DensityOnGrid& d, double a, double b) {
  if (a > b) std::swap(a, b);
  auto value_at = [&](double x) {
    auto it = std::lower_bound(d.x.begin(), d.x.end(), x);
    if (it == d.x.begin()) return d.pdf.front();
    if (it == d.x.end()) return d.pdf.back();
    auto hi_idx = std::size_t(it - d.x.begin());
    double x0 = d.x[hi_idx - 1], x1 = d.x[hi_idx];
    double f = (x - x0) / (x1 - x0);
    return d.pdf[hi_idx - 1] * (1 - f) + d.pdf[hi_idx] * f;
  };
  a = std::max(a, d.x.front());
  b = std::min(b, d.x.back());
  if (a >= b) return 0;
  double mass = 0;
  double x_prev = a, p_prev = value_at(a);
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    if (d.x[i] <= a) continue;
    if (d.x[i] >= b) break;
    mass += 0.5 * (p_prev + d.pdf[i]) * (d.x[i] - x_prev);
    x_prev = d.x[i];
    p_prev = d.pdf[i];
  }
  mass += 0.5 * (p_prev + value_at(b)) * (b - x_prev);
  return mass;
}

}  // namespace herdlab
