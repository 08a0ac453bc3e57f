#include "herdlab/jump.hpp"

#include "herdlab/fault.hpp"
#include "herdlab/rates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace herdlab {

namespace detail {
double g_two_state_up_gain = 1.0;
}  // namespace detail

namespace {

void check_options(const JumpOptions& o) {
  if (!(o.sample_dt > 0)) throw std::invalid_argument("jump: sample_dt must be > 0");
  if (!(o.t_end >= o.sample_dt)) throw std::invalid_argument("jump: t_end must be >= sample_dt");
}

// Model adapter: RateFn fills rate[0..K); ApplyFn mutates the state for a
// channel; RecordFn appends the state to the trajectory columns.
template <int K, class State, class RateFn, class ApplyFn, class RecordFn>
JumpResult run_gillespie(State state, const JumpOptions& o, RateFn&& rates, ApplyFn&& apply,
                         RecordFn&& record) {
  check_options(o);
  JumpResult res;
  Rng rng(o.seed);
  auto n_samples = std::size_t(std::floor(o.t_end / o.sample_dt)) + 1;
  std::size_t recorded = 0;
  double t = 0;
  double rate[K];
  while (recorded < n_samples) {
    double total = rates(state, rate);
    if (total <= 0) {
      res.absorbed = true;
      while (recorded < n_samples) {
        record(state);
        ++recorded;
      }
      break;
    }
    double t_next = t + rng.exponential(total);
    while (recorded < n_samples && double(recorded) * o.sample_dt <= t_next) {
      record(state);
      ++recorded;
    }
    if (recorded >= n_samples) break;
    // Channel in proportion to rate; the loop end guards round-off.
    double u = rng.uniform() * total;
    int ch = 0;
    for (; ch < K - 1; ++ch) {
      if (u < rate[ch]) break;
      u -= rate[ch];
    }
    apply(state, ch);
    ++res.event_count;
    if (o.record_events) res.events.push_back({t_next, ch});
    t = t_next;
  }
  return res;
}

template <int K, class State, class RateFn, class ApplyFn, class RecordFn>
JumpResult run_fixed_dt(State state, const JumpOptions& o, double dt, RateFn&& rates,
                        ApplyFn&& apply, RecordFn&& record) {
  check_options(o);
  if (!(dt > 0) || dt > o.sample_dt) throw std::invalid_argument("jump: need 0 < dt <= sample_dt");
  double ratio = o.sample_dt / dt;
  auto steps_per_sample = std::uint64_t(std::llround(ratio));
  if (std::fabs(ratio - double(steps_per_sample)) > 1e-9 * ratio)
    throw std::invalid_argument("jump: sample_dt must be an integer multiple of dt");

  JumpResult res;
  Rng rng(o.seed);
  auto n_samples = std::size_t(std::floor(o.t_end / o.sample_dt)) + 1;
  std::size_t recorded = 0;
  record(state);
  ++recorded;
  int halvings = 0;
  double rate[K];
  std::uint64_t steps_left = steps_per_sample;
  std::uint64_t step_index = 0;
  while (recorded < n_samples) {
    double total = rates(state, rate);
    while (total * dt > kMaxStepProb) {
      dt /= 2;
      steps_per_sample *= 2;
      steps_left *= 2;
      step_index *= 2;
      ++halvings;
    }
    double u = rng.uniform();
    double acc = 0;
    for (int ch = 0; ch < K; ++ch) {
      acc += rate[ch] * dt;
      if (u < acc) {
        apply(state, ch);
        ++res.event_count;
        if (o.record_events) res.events.push_back({double(step_index) * dt, ch});
        break;
      }
    }
    ++step_index;
    if (--steps_left == 0) {
      record(state);
      ++recorded;
      steps_left = steps_per_sample;
    }
  }
  if (halvings > 0) res.trajectory.notes = "dt_halvings=" + std::to_string(halvings);
  return res;
}

void append_note(std::string& notes, const std::string& note) {
  if (note.empty()) return;
  if (!notes.empty()) notes += ";";
  notes += note;
}

void finish_result(JumpResult& res, Trajectory traj) {
  append_note(traj.notes, res.trajectory.notes);  // fixed-dt halving count, if any
  if (res.absorbed) append_note(traj.notes, "absorbed");
  res.trajectory = std::move(traj);
}

Trajectory make_two_state_traj(const JumpOptions& o) {
  Trajectory t;
  t.dt = o.sample_dt;
  t.seed = o.seed;
  t.columns = {"X"};
  t.values.resize(1);
  return t;
}

Trajectory make_three_state_traj(const JumpOptions& o) {
  Trajectory t;
  t.dt = o.sample_dt;
  t.seed = o.seed;
  t.columns = {"X0", "X1", "X2"};
  t.values.resize(3);
  return t;
}

}  // namespace

JumpResult simulate_two_state(const TwoStateParams& p, std::int64_t x0, const JumpOptions& o) {
  p.validate();
  if (x0 < 0 || x0 > p.N) throw std::invalid_argument("jump: x0 outside [0, N]");
  Trajectory traj = make_two_state_traj(o);
  traj.model_id = "jump-two-state";
  JumpResult res = run_gillespie<2>(
      x0, o,
      [&](std::int64_t x, double* r) {
        TwoStateRates tr = two_state_rates(x, p);
        r[0] = tr.up * detail::g_two_state_up_gain;
        r[1] = tr.down;
        return r[0] + r[1];
      },
      [](std::int64_t& x, int ch) { x += ch == 0 ? 1 : -1; },
      [&](std::int64_t x) { traj.values[0].push_back(double(x)); });
  finish_result(res, std::move(traj));
  return res;
}

namespace {

template <class Params, class RateFn>
JumpResult simulate_three_state_impl(const Params& p, const PopulationState& s0,
                                     const JumpOptions& o, const char* model_id, RateFn&& fn) {
  p.validate();
  if (!s0.valid() || s0.n != p.N) throw std::invalid_argument("jump: bad initial state");
  Trajectory traj = make_three_state_traj(o);
  traj.model_id = model_id;
  JumpResult res = run_gillespie<6>(
      s0, o,
      [&](const PopulationState& s, double* r) {
        ThreeStateRates tr = fn(s);
        for (int c = 0; c < 6; ++c) r[c] = tr.rate[std::size_t(c)];
        return tr.total();
      },
      [](PopulationState& s, int ch) {
        s.counts[std::size_t(kChannelFrom[std::size_t(ch)])] -= 1;
        s.counts[std::size_t(kChannelTo[std::size_t(ch)])] += 1;
      },
      [&](const PopulationState& s) {
        for (int c = 0; c < 3; ++c) traj.values[std::size_t(c)].push_back(double(s.counts[std::size_t(c)]));
      });
  finish_result(res, std::move(traj));
  return res;
}

}  // namespace

JumpResult simulate_three_state(const GeneralThreeStateParams& p, const PopulationState& s0,
                                const JumpOptions& o) {
  return simulate_three_state_impl(p, s0, o, "jump-three-state",
                                   [&](const PopulationState& s) { return three_state_rates(s, p); });
}

JumpResult simulate_three_state_financial(const ThreeStateParams& p, const PopulationState& s0,
                                          const JumpOptions& o) {
  return simulate_three_state_impl(
      p, s0, o, "jump-three-state-financial",
      [&](const PopulationState& s) { return three_state_financial_rates(s, p); });
}

JumpResult simulate_two_state_fixed_dt(const TwoStateParams& p, std::int64_t x0,
                                       const JumpOptions& o, double dt) {
  p.validate();
  if (x0 < 0 || x0 > p.N) throw std::invalid_argument("jump: x0 outside [0, N]");
  Trajectory traj = make_two_state_traj(o);
  traj.model_id = "jump-two-state-fixed";
  JumpResult res = run_fixed_dt<2>(
      x0, o, dt,
      [&](std::int64_t x, double* r) {
        TwoStateRates tr = two_state_rates(x, p);
        r[0] = tr.up * detail::g_two_state_up_gain;
        r[1] = tr.down;
        return r[0] + r[1];
      },
      [](std::int64_t& x, int ch) { x += ch == 0 ? 1 : -1; },
      [&](std::int64_t x) { traj.values[0].push_back(double(x)); });
  finish_result(res, std::move(traj));
  return res;
}

JumpResult simulate_three_state_financial_fixed_dt(const ThreeStateParams& p,
                                                   const PopulationState& s0,
                                                   const JumpOptions& o, double dt) {
  p.validate();
  if (!s0.valid() || s0.n != p.N) throw std::invalid_argument("jump: bad initial state");
  Trajectory traj = make_three_state_traj(o);
  traj.model_id = "jump-three-state-financial-fixed";
  JumpResult res = run_fixed_dt<6>(
      s0, o, dt,
      [&](const PopulationState& s, double* r) {
        ThreeStateRates tr = three_state_financial_rates(s, p);
        for (int c = 0; c < 6; ++c) r[c] = tr.rate[std::size_t(c)];
        return tr.total();
      },
      [](PopulationState& s, int ch) {
        s.counts[std::size_t(kChannelFrom[std::size_t(ch)])] -= 1;
        s.counts[std::size_t(kChannelTo[std::size_t(ch)])] += 1;
      },
      [&](const PopulationState& s) {
        for (int c = 0; c < 3; ++c) traj.values[std::size_t(c)].push_back(double(s.counts[std::size_t(c)]));
      });
  finish_result(res, std::move(traj));
  return res;
}

}  // namespace herdlab
