#pragma once

#include "herdlab/params.hpp"
#include "herdlab/rng.hpp"
#include "herdlab/trajectory.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace herdlab {

struct Matrix2 {
  // Row-major [ [a, b], [c, d] ].
  double a = 0, b = 0, c = 0, d = 0;

  double frobenius() const;
  Matrix2 times_transpose() const;  // M M^T
};

enum class SdeVariant {
  TwoStateFull,          // x = X/N, finite-N drift and diffusion, plain clock
  TwoStateAsymptotic,    // y = X/(N - X), large-N limit, herding clock
  GeneralClass,          // dx = (eta - lambda/2) x^(2 eta - 1) dt + x^eta dW
  ThreeStateFp,          // (n_f, n_p), market diffusion matrix, plain clock
  ThreeStateTransformed  // (n_f, xi), decoupled noise, herding clock
};

struct SdeModel {
  SdeVariant variant = SdeVariant::GeneralClass;
  int dim = 1;
  std::vector<std::string> columns;
  std::string model_id;

  TwoStateParams two_state{};
  ThreeStateParams market{};
  double eps1 = 0, eps2 = 0, alpha = 0;  // asymptotic two-state
  double eta = 0, lambda = 0;            // general class

  // drift[0..dim); diff is the noise matrix S in dx = a dt + S dW, row-major
  // dim x dim (a single entry for scalar models).
  void coeffs(const double* x, double* drift, double* diff) const;
};

SdeModel make_two_state_full(const TwoStateParams& p);
SdeModel make_two_state_asymptotic(double eps1, double eps2, double alpha);
SdeModel make_general_class(double eta, double lambda);
SdeModel make_three_state_fp(const ThreeStateParams& p);
SdeModel make_three_state_transformed(const ThreeStateParams& p);

// Second-order coefficient matrix of the market model at (n_f, n_p):
//   D2_ff = h1 n_f (1 - n_f)
//   D2_pp = H h1 n_p (1 - n_f - n_p) + h1 n_f n_p
//   D2_fp = -h1 n_f n_p
Matrix2 fp_diffusion_matrix_exact(const ThreeStateParams& p, double n_f, double n_p);

// Noise matrix S with (1/2) S S^T = d2, for symmetric positive semidefinite
// d2.  S is the (symmetric) principal square root of 2 d2; throws on input
// that is asymmetric or indefinite beyond round-off.
Matrix2 diffusion_decompose(const Matrix2& d2);

// || (1/2) S S^T - d2 ||_F, the reconstruction error of a decomposition.
double decompose_residual(const Matrix2& s, const Matrix2& d2);

struct Boundary {
  double lo = 0;
  double hi = 0;  // values outside are folded back inside (reflection)
};

struct IntegratorConfig {
  double kappa = 0.05;  // fraction of the boundary gap one step may move
  double sample_dt = 0;
  double max_dt = 0;     // 0: sample_dt / 100
  double min_dt = 0;     // 0: max_dt / 1000; floors the adaptive step
  double sum_limit = 0;  // 2d only; > 0 keeps x0 + x1 below this (simplex)
  std::array<Boundary, 2> boundary{};
  std::function<void(double t, const double* x, double dt)> step_observer;
};

// Boundaries sized to each variant's natural domain; kappa, max_dt, min_dt
// at their defaults.
IntegratorConfig default_integrator(const SdeModel& m, double sample_dt);

// Euler-Maruyama with a per-step time step adapted to drift and diffusion
// magnitude relative to the distance from the boundaries, floored at min_dt
// and aligned to the sample grid.  Throws on non-finite states.
Trajectory integrate_sde(const SdeModel& m, const std::vector<double>& x0, double t_end,
                         const IntegratorConfig& c, std::uint64_t seed);

}  // namespace herdlab
