#include "herdlab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace herdlab {

double tau_two_state(std::int64_t x, std::int64_t n, double alpha) {
  if (alpha == 0 || n < 2) return 1.0;
  auto xc = std::clamp<std::int64_t>(x, 1, n - 1);
  double ratio = double(xc) / double(n - xc);
  return std::pow(ratio, -alpha);
}

double tau_three_state(double n_f, double xi, double alpha) {
  if (!(n_f > 0)) throw std::domain_error("tau_three_state: n_f must be positive");
  if (alpha == 0) return 1.0;
  double arg = std::fabs((1.0 - n_f) / n_f * xi);
  return 1.0 / (1.0 + std::pow(arg, alpha));
}

double tau_three_state(const PopulationState& s, double alpha) {
  if (alpha == 0) return 1.0;
  std::int64_t nc = s.chartists();
  if (nc == 0) return 1.0;
  double xi = double(s.counts[2] - s.counts[1]) / double(nc);
  double nf = std::max(double(s.counts[0]), 1.0) / double(s.n);
  return tau_three_state(nf, xi, alpha);
}

TwoStateRates two_state_rates(std::int64_t x, const TwoStateParams& p) {
  TwoStateRates r;
  double tau = p.feedback ? tau_two_state(x, p.N, p.alpha) : 1.0;
  double nx = double(p.N - x);
  double xd = double(x);
  r.up = nx * (p.sigma1 + p.h * xd / tau);
  r.down = xd * (p.sigma2 + p.h * nx) / tau;
  return r;
}

double ThreeStateRates::total() const {
  double t = 0;
  for (double v : rate) t += v;
  return t;
}

ThreeStateRates three_state_rates(const PopulationState& s, const GeneralThreeStateParams& p) {
  ThreeStateRates r;
  for (int c = 0; c < 6; ++c) {
    int j = kChannelFrom[std::size_t(c)];
    int i = kChannelTo[std::size_t(c)];
    double xj = double(s.counts[std::size_t(j)]);
    double xi = double(s.counts[std::size_t(i)]);
    r.rate[std::size_t(c)] = xj * (p.sigma[std::size_t(j)][std::size_t(i)] +
                                   p.hmat[std::size_t(j)][std::size_t(i)] * xi);
  }
  return r;
}

ThreeStateRates three_state_financial_rates(const PopulationState& s, const ThreeStateParams& p) {
  ThreeStateRates r;
  double tau = tau_three_state(s, p.alpha);
  double inv_tau = 1.0 / tau;
  double xf = double(s.counts[0]);
  double xp = double(s.counts[1]);
  double xo = double(s.counts[2]);
  const double s_cf = p.sigma_cf();
  const double s_fc = p.sigma_fc();
  const double s_cc = p.sigma_cc();
  // Channel order: f->p, f->o, p->f, p->o, o->f, o->p.  Only the
  // fundamentalists' individual exit term stays off the fast clock.
  r.rate[0] = xf * (s_fc / 2 + p.h1 * xp * inv_tau);
  r.rate[1] = xf * (s_fc / 2 + p.h1 * xo * inv_tau);
  r.rate[2] = xp * (s_cf + p.h1 * xf) * inv_tau;
  r.rate[3] = xp * (s_cc + p.H * p.h1 * xo) * inv_tau;
  r.rate[4] = xo * (s_cf + p.h1 * xf) * inv_tau;
  r.rate[5] = xo * (s_cc + p.H * p.h1 * xp) * inv_tau;
  return r;
}

TheoreticalExponents theoretical_exponents(double eps2, double alpha) {
  TheoreticalExponents e;
  e.eta = (3 + alpha) / 2;
  e.lambda = eps2 + alpha + 1;
  if (e.eta == 1.0) throw std::domain_error("beta undefined at eta = 1");
  e.beta = 1 + (e.lambda - 3) / (2 * (e.eta - 1));
  return e;
}

}  // namespace herdlab
