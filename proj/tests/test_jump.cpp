#include <doctest.h>

#include "herdlab/jump.hpp"
#include "herdlab/oracle.hpp"
#include "herdlab/stats.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace herdlab;

namespace {

std::vector<double> occupation(const Trajectory& t, std::int64_t n_states) {
  std::vector<double> occ(std::size_t(n_states), 0.0);
  for (double v : t.values[0]) occ[std::size_t(std::llround(v))] += 1.0;
  for (auto& v : occ) v /= double(t.size());
  return occ;
}

}  // namespace

TEST_CASE("single agent behaves as a symmetric telegraph process") {
  TwoStateParams p;
  p.sigma1 = 1.0;
  p.sigma2 = 1.0;
  p.h = 5.0;  // inert for N = 1: the herding partner pool is empty
  p.N = 1;
  JumpOptions o;
  o.t_end = 4000;
  o.sample_dt = 0.1;
  o.seed = 11;
  JumpResult res = simulate_two_state(p, 1, o);
  double occ1 = mean(res.trajectory.values[0]);
  // Correlation time 1/(sigma1+sigma2) gives ~2000 effective samples here,
  // so three standard errors is about 0.034.
  CHECK(std::fabs(occ1 - 0.5) < 0.034);
}

TEST_CASE("event-driven occupation matches the detailed-balance law") {
  TwoStateParams p;
  p.sigma1 = 0.5;
  p.sigma2 = 0.5;
  p.h = 0.25;
  p.N = 20;
  JumpOptions o;
  o.t_end = 1e6;
  o.sample_dt = 0.25;
  o.seed = 21;
  JumpResult res = simulate_two_state(p, default_two_state_x0(p), o);
  Trajectory post = discard_burn_in(res.trajectory, 0.1 * o.t_end);
  CHECK(tv_distance(occupation(post, p.N + 1), stationary_birth_death(p)) < 0.02);
}

TEST_CASE("fixed-step occupation matches the detailed-balance law") {
  TwoStateParams p;
  p.sigma1 = 0.5;
  p.sigma2 = 0.5;
  p.h = 0.25;
  p.N = 20;
  JumpOptions o;
  o.t_end = 120000;
  o.sample_dt = 0.25;
  o.seed = 22;
  JumpResult res = simulate_two_state_fixed_dt(p, default_two_state_x0(p), o, 1.0 / 1024);
  Trajectory post = discard_burn_in(res.trajectory, 0.1 * o.t_end);
  CHECK(tv_distance(occupation(post, p.N + 1), stationary_birth_death(p)) < 0.02);
}

TEST_CASE("the two simulators agree in distribution") {
  TwoStateParams p;
  p.sigma1 = 1.0;
  p.sigma2 = 1.4;
  p.h = 0.3;
  p.N = 20;
  JumpOptions o;
  o.t_end = 40000;
  o.sample_dt = 0.5;
  JumpOptions oe = o;
  oe.seed = 31;
  JumpOptions of = o;
  of.seed = 32;
  JumpResult ev = simulate_two_state(p, default_two_state_x0(p), oe);
  JumpResult fx = simulate_two_state_fixed_dt(p, default_two_state_x0(p), of, 1.0 / 256);
  Trajectory ev_post = discard_burn_in(ev.trajectory, 0.1 * o.t_end);
  Trajectory fx_post = discard_burn_in(fx.trajectory, 0.1 * o.t_end);
  CHECK(ks_two_sample(ev_post.values[0], fx_post.values[0]) < 0.02);
}

TEST_CASE("fixed-step mean settles at the balance point") {
  TwoStateParams p;
  p.sigma1 = 0.8;
  p.sigma2 = 0.8;
  p.h = 0.0;
  p.N = 30;
  JumpOptions o;
  o.t_end = 30000;
  o.sample_dt = 0.5;
  o.seed = 41;
  JumpResult res = simulate_two_state_fixed_dt(p, 0, o, 1.0 / 64);
  Trajectory post = discard_burn_in(res.trajectory, 1000);
  CHECK(mean(post.values[0]) == doctest::Approx(15.0).epsilon(0.02));
}

TEST_CASE("oversized steps are halved until stable and the count is recorded") {
  TwoStateParams p;
  p.sigma1 = 2.0;
  p.sigma2 = 2.0;
  p.h = 1.0;
  p.N = 40;  // peak total rate ~ hundreds per unit time
  JumpOptions o;
  o.t_end = 500;
  o.sample_dt = 0.5;
  o.seed = 42;
  JumpResult res = simulate_two_state_fixed_dt(p, 20, o, 0.5);
  CHECK(res.trajectory.notes.find("dt_halvings=") != std::string::npos);
  // Despite the coarse request the sampled law still matches the oracle.
  JumpOptions ol = o;
  ol.t_end = 40000;
  ol.seed = 43;
  JumpResult lng = simulate_two_state_fixed_dt(p, 20, ol, 0.5);
  Trajectory post = discard_burn_in(lng.trajectory, 0.1 * ol.t_end);
  CHECK(tv_distance(occupation(post, p.N + 1), stationary_birth_death(p)) < 0.03);
}

TEST_CASE("trajectories are reproducible per seed") {
  TwoStateParams p;
  p.sigma1 = 1.0;
  p.sigma2 = 0.9;
  p.h = 0.5;
  p.N = 25;
  JumpOptions o;
  o.t_end = 200;
  o.sample_dt = 0.1;
  o.seed = 77;
  JumpResult a = simulate_two_state(p, 12, o);
  JumpResult b = simulate_two_state(p, 12, o);
  CHECK(a.trajectory.values[0] == b.trajectory.values[0]);
  CHECK(a.event_count == b.event_count);
  o.seed = 78;
  JumpResult c = simulate_two_state(p, 12, o);
  CHECK(a.trajectory.values[0] != c.trajectory.values[0]);
}

TEST_CASE("sample grid has floor(t_end/sample_dt)+1 points from t0=0") {
  TwoStateParams p;
  p.sigma1 = 1.0;
  p.sigma2 = 1.0;
  p.h = 0.0;
  p.N = 5;
  JumpOptions o;
  o.t_end = 10.0;
  o.sample_dt = 0.25;
  o.seed = 5;
  JumpResult ev = simulate_two_state(p, 2, o);
  CHECK(ev.trajectory.size() == 41);
  CHECK(ev.trajectory.t0 == 0.0);
  CHECK(ev.trajectory.dt == 0.25);
  JumpResult fx = simulate_two_state_fixed_dt(p, 2, o, 0.25 / 8);
  CHECK(fx.trajectory.size() == 41);
}

TEST_CASE("event log times are strictly increasing") {
  TwoStateParams p;
  p.sigma1 = 1.0;
  p.sigma2 = 1.0;
  p.h = 0.2;
  p.N = 10;
  JumpOptions o;
  o.t_end = 50;
  o.sample_dt = 0.5;
  o.seed = 13;
  o.record_events = true;
  JumpResult res = simulate_two_state(p, 5, o);
  CHECK(res.events.size() == res.event_count);
  for (std::size_t i = 1; i < res.events.size(); ++i)
    CHECK(res.events[i].t > res.events[i - 1].t);
}

TEST_CASE("three-state counts always sum to N") {
  GeneralThreeStateParams p;
  p.N = 12;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      p.sigma[i][j] = 0.4;
      p.hmat[i][j] = 0.3;
    }
  JumpOptions o;
  o.t_end = 500;
  o.sample_dt = 0.1;
  o.seed = 91;
  JumpResult res = simulate_three_state(p, PopulationState::three_state(4, 4, 4), o);
  for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
    double sum = res.trajectory.values[0][i] + res.trajectory.values[1][i] +
                 res.trajectory.values[2][i];
    CHECK(sum == 12.0);
  }
}

TEST_CASE("a herding-only chain absorbs once a group owns everyone") {
  GeneralThreeStateParams p;
  p.N = 6;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      p.sigma[i][j] = 0.0;  // no individual switching: pure herding
      p.hmat[i][j] = 1.0;
    }
  JumpOptions o;
  o.t_end = 50;
  o.sample_dt = 0.5;
  o.seed = 17;
  JumpResult res = simulate_three_state(p, PopulationState::three_state(6, 0, 0), o);
  CHECK(res.absorbed);
  CHECK(res.event_count == 0);
  CHECK(res.trajectory.notes.find("absorbed") != std::string::npos);
  for (double v : res.trajectory.values[0]) CHECK(v == 6.0);
}

TEST_CASE("market jump chain conserves agents and stays reproducible") {
  ThreeStateParams p;
  p.eps_cf = 3;
  p.eps_fc = 3;
  p.eps_cc = 3;
  p.H = 10;
  p.alpha = 1;
  p.N = 30;
  JumpOptions o;
  o.t_end = 20;
  o.sample_dt = 0.05;
  o.seed = 19;
  JumpResult a = simulate_three_state_financial(p, default_three_state_x0(p.N), o);
  JumpResult b = simulate_three_state_financial(p, default_three_state_x0(p.N), o);
  CHECK(a.trajectory.values[0] == b.trajectory.values[0]);
  for (std::size_t i = 0; i < a.trajectory.size(); ++i)
    CHECK(a.trajectory.values[0][i] + a.trajectory.values[1][i] + a.trajectory.values[2][i] ==
          30.0);

  JumpResult f = simulate_three_state_financial_fixed_dt(p, default_three_state_x0(p.N), o, 1e-4);
  for (std::size_t i = 0; i < f.trajectory.size(); ++i)
    CHECK(f.trajectory.values[0][i] + f.trajectory.values[1][i] + f.trajectory.values[2][i] ==
          30.0);
}

TEST_CASE("bad arguments are rejected") {
  TwoStateParams p;
  p.sigma1 = 1;
  p.sigma2 = 1;
  p.h = 0;
  p.N = 10;
  JumpOptions o;
  o.t_end = 10;
  o.sample_dt = 0.1;
  CHECK_THROWS(simulate_two_state(p, -1, o));
  CHECK_THROWS(simulate_two_state(p, 11, o));
  CHECK_THROWS(simulate_two_state_fixed_dt(p, 5, o, 0.3));  // not a divisor of sample_dt
  JumpOptions bad = o;
  bad.sample_dt = 0;
  CHECK_THROWS(simulate_two_state(p, 5, bad));
}
