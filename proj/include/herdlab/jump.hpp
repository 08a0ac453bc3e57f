#pragma once

#include "herdlab/params.hpp"
#include "herdlab/rng.hpp"
#include "herdlab/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace herdlab {

struct JumpOptions {
  double t_end = 0;
  double sample_dt = 0;
  std::uint64_t seed = 0;
  bool record_events = false;  // keep the full event log; off for long runs
};

struct JumpEvent {
  double t = 0;
  int channel = 0;  // two-state: 0 up, 1 down; three-state: channel index
};

struct JumpResult {
  Trajectory trajectory;
  std::vector<JumpEvent> events;
  std::uint64_t event_count = 0;
  bool absorbed = false;  // all rates hit zero before t_end
};

// Exact event-driven simulation: exponential waiting times, channel chosen
// in proportion to its rate, state recorded on the uniform sample grid.
JumpResult simulate_two_state(const TwoStateParams& p, std::int64_t x0, const JumpOptions& o);
JumpResult simulate_three_state(const GeneralThreeStateParams& p, const PopulationState& s0,
                                const JumpOptions& o);
JumpResult simulate_three_state_financial(const ThreeStateParams& p, const PopulationState& s0,
                                          const JumpOptions& o);

// Discrete-time counterpart: every dt, at most one transition fires with
// probability rate*dt per channel.  dt is halved (persistently, staying a
// divisor of sample_dt) whenever total rate * dt exceeds kMaxStepProb, so the
// one-transition approximation stays controlled; the halving count lands in
// trajectory.notes.
inline constexpr double kMaxStepProb = 0.1;

JumpResult simulate_two_state_fixed_dt(const TwoStateParams& p, std::int64_t x0,
                                       const JumpOptions& o, double dt);
JumpResult simulate_three_state_financial_fixed_dt(const ThreeStateParams& p,
                                                   const PopulationState& s0,
                                                   const JumpOptions& o, double dt);

}  // namespace herdlab
