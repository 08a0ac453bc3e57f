#include "herdlab/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace herdlab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

PopulationState PopulationState::two_state(std::int64_t x, std::int64_t n) {
  PopulationState s;
  s.counts = {x, n - x, 0};
  s.n = n;
  return s;
}

PopulationState PopulationState::three_state(std::int64_t x0, std::int64_t x1, std::int64_t x2) {
  PopulationState s;
  s.counts = {x0, x1, x2};
  s.n = x0 + x1 + x2;
  return s;
}

bool PopulationState::valid() const {
  if (n <= 0) return false;
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) return false;
    total += c;
  }
  return total == n;
}

void TwoStateParams::validate() const {
  require(N >= 1, "two-state: N must be >= 1");
  require(sigma1 > 0 && sigma2 > 0, "two-state: sigma1, sigma2 must be > 0");
  require(h >= 0, "two-state: h must be >= 0");
  require(std::isfinite(sigma1) && std::isfinite(sigma2) && std::isfinite(h),
          "two-state: rates must be finite");
  if (feedback) {
    require(alpha >= 0, "two-state: alpha must be >= 0");
    require(N >= 2, "two-state: feedback needs N >= 2 for the clock to be defined");
  }
}

void GeneralThreeStateParams::validate() const {
  require(N >= 1, "three-state: N must be >= 1");
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      if (i == j) continue;
      require(sigma[j][i] >= 0 && std::isfinite(sigma[j][i]),
              "three-state: sigma must be finite and >= 0");
      require(hmat[j][i] >= 0 && std::isfinite(hmat[j][i]),
              "three-state: h must be finite and >= 0");
    }
  // Herding is pairwise, so the rate matrix has to be symmetric.
  for (int j = 0; j < 3; ++j)
    for (int i = j + 1; i < 3; ++i)
      require(hmat[j][i] == hmat[i][j], "three-state: h matrix must be symmetric");
}

GeneralThreeStateParams ThreeStateParams::general() const {
  GeneralThreeStateParams g;
  g.N = N;
  const double s_cf = sigma_cf();
  const double s_fc = sigma_fc();
  const double s_cc = sigma_cc();
  // Groups: 0 fundamentalist, 1 pessimist, 2 optimist.
  g.sigma[0][1] = s_fc / 2;
  g.sigma[0][2] = s_fc / 2;
  g.sigma[1][0] = s_cf;
  g.sigma[2][0] = s_cf;
  g.sigma[1][2] = s_cc;
  g.sigma[2][1] = s_cc;
  g.hmat[0][1] = g.hmat[1][0] = h1;
  g.hmat[0][2] = g.hmat[2][0] = h1;
  g.hmat[1][2] = g.hmat[2][1] = H * h1;
  return g;
}

void ThreeStateParams::validate() const {
  require(N >= 3, "market: N must be >= 3");
  require(eps_cf > 0 && eps_fc > 0 && eps_cc > 0, "market: eps rates must be > 0");
  require(H > 0, "market: H must be > 0");
  require(h1 > 0, "market: h1 must be > 0");
  require(alpha >= 0, "market: alpha must be >= 0");
  require(r0 > 0, "market: r0 must be > 0");
  require(std::isfinite(eps_cf) && std::isfinite(eps_fc) && std::isfinite(eps_cc) &&
              std::isfinite(H) && std::isfinite(h1) && std::isfinite(alpha) && std::isfinite(r0),
          "market: parameters must be finite");
}

std::int64_t default_two_state_x0(const TwoStateParams& p) {
  double frac = p.sigma1 / (p.sigma1 + p.sigma2);
  auto x = std::int64_t(std::llround(frac * double(p.N)));
  if (x < 0) x = 0;
  if (x > p.N) x = p.N;
  return x;
}

PopulationState default_three_state_x0(std::int64_t N) {
  std::int64_t third = N / 3;
  return PopulationState::three_state(N - 2 * third, third, third);
}

}  // namespace herdlab
