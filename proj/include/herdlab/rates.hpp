#pragma once

#include "herdlab/params.hpp"

#include <array>

namespace herdlab {

// Feedback time scale for the two-state model, (X/(N-X))^(-alpha).
// X is clamped to [1, N-1] so the scale stays finite on the boundary states.
double tau_two_state(std::int64_t x, std::int64_t n, double alpha);

// Feedback time scale for the market model, built from the chartist mood.
// With n_f the fundamentalist fraction and xi the normalized opinion
// imbalance of the chartists,
//   tau = [1 + |(1 - n_f)/n_f * xi|^alpha]^(-1).
// The magnitude of the scaled log price drives the clock, so tau lies in
// (0, 1]: polarized moods speed the fast channels up, a neutral mood (or an
// all-fundamentalist state) leaves them untouched.  Throws on n_f <= 0; the
// PopulationState form clamps n_f to [1/N, 1] instead.
double tau_three_state(double n_f, double xi, double alpha);
double tau_three_state(const PopulationState& s, double alpha);

struct TwoStateRates {
  double up = 0;    // X -> X+1
  double down = 0;  // X -> X-1
  double total() const { return up + down; }
};

// Transition rates of the tracked group.  Without feedback:
//   up   = (N - X) * (sigma1 + h X)
//   down = X * (sigma2 + h (N - X))
// With feedback the herding-and-exit side is modulated by tau:
//   up   = (N - X) * (sigma1 + h X / tau)
//   down = X * (sigma2 + h (N - X)) / tau
TwoStateRates two_state_rates(std::int64_t x, const TwoStateParams& p);

struct ThreeStateRates {
  // Channel order: 0->1, 0->2, 1->0, 1->2, 2->0, 2->1.
  std::array<double, 6> rate{};
  double total() const;
};

inline constexpr std::array<int, 6> kChannelFrom{0, 0, 1, 1, 2, 2};
inline constexpr std::array<int, 6> kChannelTo{1, 2, 0, 2, 0, 1};

// General three-group rates, channel j->i at X_j (sigma[j][i] + h[j][i] X_i).
ThreeStateRates three_state_rates(const PopulationState& s, const GeneralThreeStateParams& p);

// Market rates with state-dependent feedback.  The herding terms and the
// chartist individual terms run on the fast clock 1/tau; the fundamentalists'
// own exit rate sigma_fc does not:
//   f->c:  X_f (sigma_fc/2 + h1 X_c / tau)      for each chartist group c
//   c->f:  X_c (sigma_cf + h1 X_f) / tau
//   c->c': X_c (sigma_cc + H h1 X_c') / tau
// At alpha = 0 this reduces exactly to three_state_rates on general().
ThreeStateRates three_state_financial_rates(const PopulationState& s, const ThreeStateParams& p);

struct TheoreticalExponents {
  double eta = 0;     // multiplicative-noise exponent
  double lambda = 0;  // stationary density tail exponent
  double beta = 0;    // spectral exponent
};

// Exponents of the asymptotic dynamics for the feedback two-state model:
//   eta = (3 + alpha)/2, lambda = eps2 + alpha + 1,
//   beta = 1 + (lambda - 3)/(2 (eta - 1)).
// eta = 1 (alpha = -1) makes beta undefined; throws std::domain_error.
TheoreticalExponents theoretical_exponents(double eps2, double alpha);

}  // namespace herdlab
