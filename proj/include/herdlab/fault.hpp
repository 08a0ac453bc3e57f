#pragma once

namespace herdlab::detail {

// Validation-only hook: scales the upward rate as seen by the two-state
// simulators (the oracles are untouched).  Leave at 1.0 for real runs; the
// validate suite sets it to confirm its own checks go red when a rate
// function is wrong.
extern double g_two_state_up_gain;

}  // namespace herdlab::detail
