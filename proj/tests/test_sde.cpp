#include <doctest.h>

#include "herdlab/oracle.hpp"
#include "herdlab/rng.hpp"
#include "herdlab/sde.hpp"
#include "herdlab/stats.hpp"

#include <cmath>
#include <vector>

using namespace herdlab;

TEST_CASE("matrix helpers") {
  Matrix2 m{1, 2, 3, 4};
  CHECK(m.frobenius() == doctest::Approx(std::sqrt(30.0)));
  Matrix2 mt = m.times_transpose();
  CHECK(mt.a == doctest::Approx(5));   // [1 2].[1 2]
  CHECK(mt.b == doctest::Approx(11));  // [1 2].[3 4]
  CHECK(mt.c == doctest::Approx(11));
  CHECK(mt.d == doctest::Approx(25));
}

TEST_CASE("scaled two-state drift and noise at a hand point") {
  SdeModel m = make_two_state_asymptotic(0.1, 3.0, 1.0);
  double y = 2.0, drift = 0, diff = 0;
  m.coeffs(&y, &drift, &diff);
  // 1/tau = y^alpha = 2: drift (0.1 + 2 (2-3) 2)(1+2), noise sqrt(2*2*2)(1+2).
  CHECK(drift == doctest::Approx(-11.7));
  CHECK(diff == doctest::Approx(3 * std::sqrt(8.0)));
}

TEST_CASE("general-class drift and noise at a hand point") {
  SdeModel m = make_general_class(2.0, 5.0);
  double x = 1.5, drift = 0, diff = 0;
  m.coeffs(&x, &drift, &diff);
  CHECK(drift == doctest::Approx(-0.5 * std::pow(1.5, 3.0)));
  CHECK(diff == doctest::Approx(std::pow(1.5, 2.0)));
}

TEST_CASE("finite-N two-state drift and noise at a hand point") {
  TwoStateParams p;
  p.sigma1 = 1.0;
  p.sigma2 = 1.0;
  p.h = 0.01;
  p.N = 300;
  p.alpha = 1.0;
  p.feedback = true;
  SdeModel m = make_two_state_full(p);
  double x = 2.0 / 3.0, drift = 0, diff = 0;
  m.coeffs(&x, &drift, &diff);
  // y = 2, tau = 1/2: entry stays slow, exit and herding run doubled.
  CHECK(drift == doctest::Approx(-1.0));
  CHECK(diff == doctest::Approx(std::sqrt((13.0 / 3.0) / 300.0)));
}

TEST_CASE("market transformed coefficients at a hand point") {
  ThreeStateParams p;
  p.eps_cf = 3;
  p.eps_fc = 3;
  p.eps_cc = 3;
  p.H = 100;
  p.alpha = 2;
  p.N = 1000;
  SdeModel m = make_three_state_transformed(p);
  REQUIRE(m.dim == 2);
  double x[2] = {0.5, 0.5};
  double drift[2], s[4];
  m.coeffs(x, drift, s);
  // 1/tau = 1 + |(1-nf)/nf xi|^2 = 1.25 at nf = 1/2, xi = 1/2.
  CHECK(drift[0] == doctest::Approx(0.5 * 3 * 1.25 - 0.5 * 3));
  CHECK(drift[1] == doctest::Approx(-2 * 100 * 3 * 0.5 * 1.25));
  CHECK(s[0] == doctest::Approx(std::sqrt(2 * 0.5 * 0.5 * 1.25)));
  CHECK(s[3] == doctest::Approx(std::sqrt(2 * 100 * (1 - 0.25) * 1.25)));
  CHECK(s[1] == 0.0);  // the transformed pair carries independent noise
  CHECK(s[2] == 0.0);
}

TEST_CASE("market diffusion matrix at a hand point") {
  ThreeStateParams p;
  p.eps_cf = 1;
  p.eps_fc = 1;
  p.eps_cc = 1;
  p.H = 100;
  p.h1 = 1;
  p.N = 1000;
  Matrix2 d2 = fp_diffusion_matrix_exact(p, 0.2, 0.3);
  CHECK(d2.a == doctest::Approx(0.16));   // n_f (1 - n_f)
  CHECK(d2.d == doctest::Approx(15.06));  // H n_p n_o + n_f n_p
  CHECK(d2.b == doctest::Approx(-0.06));
  CHECK(d2.c == doctest::Approx(-0.06));
}

TEST_CASE("coupled-fraction model uses the decomposed market noise") {
  ThreeStateParams p;
  p.eps_cf = 2;
  p.eps_fc = 1;
  p.eps_cc = 1;
  p.H = 50;
  p.h1 = 1;
  p.N = 500;
  SdeModel m = make_three_state_fp(p);
  double x[2] = {0.3, 0.4};
  double drift[2], s[4];
  m.coeffs(x, drift, s);
  // Drift: first-order coefficients of the master-equation expansion.
  CHECK(drift[0] == doctest::Approx(p.sigma_cf() * 0.7 - p.sigma_fc() * 0.3));
  CHECK(drift[1] == doctest::Approx(p.sigma_cc() * (0.7 - 2 * 0.4)));
  Matrix2 expect = diffusion_decompose(fp_diffusion_matrix_exact(p, 0.3, 0.4));
  CHECK(s[0] == doctest::Approx(expect.a));
  CHECK(s[1] == doctest::Approx(expect.b));
  CHECK(s[2] == doctest::Approx(expect.c));
  CHECK(s[3] == doctest::Approx(expect.d));
}

TEST_CASE("noise decomposition round trips on random spd matrices") {
  Rng rng(404);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    double g1 = rng.normal(), g2 = rng.normal(), g3 = rng.normal(), g4 = rng.normal();
    if (i % 10 == 9) {
      g3 = g1;
      g4 = g2;  // rank one
    }
    Matrix2 d2{g1 * g1 + g3 * g3, g1 * g2 + g3 * g4, g1 * g2 + g3 * g4, g2 * g2 + g4 * g4};
    Matrix2 s = diffusion_decompose(d2);
    worst = std::max(worst, decompose_residual(s, d2));
    // The factor must itself be symmetric PSD (principal root).
    CHECK(s.b == doctest::Approx(s.c));
    CHECK(s.a >= -1e-12);
    CHECK(s.d >= -1e-12);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("noise decomposition edge cases") {
  Matrix2 zero{0, 0, 0, 0};
  Matrix2 s0 = diffusion_decompose(zero);
  CHECK(s0.frobenius() == 0.0);

  Matrix2 asym{1, 0.5, -0.5, 1};
  CHECK_THROWS(diffusion_decompose(asym));

  Matrix2 indef{1, 2, 2, 1};  // eigenvalues 3, -1
  CHECK_THROWS(diffusion_decompose(indef));
}

TEST_CASE("integration is reproducible per seed and respects boundaries") {
  SdeModel m = make_two_state_asymptotic(0.1, 0.5, 1.0);
  IntegratorConfig c = default_integrator(m, 0.05);
  Trajectory a = integrate_sde(m, {1.0}, 300.0, c, 5150);
  Trajectory b = integrate_sde(m, {1.0}, 300.0, c, 5150);
  CHECK(a.values[0] == b.values[0]);
  Trajectory d = integrate_sde(m, {1.0}, 300.0, c, 5151);
  CHECK(a.values[0] != d.values[0]);
  for (double v : a.values[0]) {
    CHECK(v >= c.boundary[0].lo);
    CHECK(v <= c.boundary[0].hi);
  }
  CHECK(a.size() == 6001);
  CHECK(a.dt == 0.05);
}

TEST_CASE("sampled law of the scaled model matches the quadrature density") {
  const double eps1 = 0.1, eps2 = 2.0, alpha = 1.0;
  SdeModel m = make_two_state_asymptotic(eps1, eps2, alpha);
  IntegratorConfig c = default_integrator(m, 0.05);
  Trajectory t = integrate_sde(m, {1.0}, 20000.0, c, 6001);
  std::vector<double> y(t.values[0].begin() + t.size() / 10, t.values[0].end());

  DensityOnGrid ref = fp_stationary_density(
      [&](double v) {
        double inv_tau = std::pow(v, alpha);
        return (eps1 + v * (2 - eps2) * inv_tau) * (1 + v);
      },
      [&](double v) {
        double inv_tau = std::pow(v, alpha);
        return std::sqrt(2 * v * inv_tau) * (1 + v);
      },
      c.boundary[0].lo, c.boundary[0].hi, 6000);

  for (auto [lo, hi] : {std::pair<double, double>{0.02, 0.2}, {0.2, 1.0}, {1.0, 5.0}}) {
    double expect = density_mass(ref, lo, hi);
    double got = 0;
    for (double v : y)
      if (v >= lo && v < hi) got += 1;
    got /= double(y.size());
    CHECK(std::fabs(got - expect) < 0.02);
  }
}

TEST_CASE("finite-y tails carry the doubled-clock correction, not a new slope") {
  // The scaled model's large-y asymptote is the general class at eta = 3/2
  // run at twice the speed; a time change leaves the stationary law alone,
  // so the two quadrature densities must share their tail slope.
  const double eps2 = 1.5;
  const double lambda = eps2 + 1.0;  // alpha = 0
  DensityOnGrid full = fp_stationary_density(
      [&](double v) { return (0.1 + v * (2 - eps2)) * (1 + v); },
      [&](double v) { return std::sqrt(2 * v) * (1 + v); }, 1e-2, 1e3, 6000);
  DensityOnGrid cls = fp_stationary_density(
      [&](double v) { return (1.5 - lambda / 2) * std::pow(v, 2.0); },
      [&](double v) { return std::pow(v, 1.5); }, 1e-2, 1e3, 6000);
  auto slope = [](const DensityOnGrid& d, double lo, double hi) {
    std::size_t i = 0, j = 0;
    for (std::size_t k = 0; k < d.x.size(); ++k) {
      if (d.x[k] <= lo) i = k;
      if (d.x[k] <= hi) j = k;
    }
    return std::log(d.pdf[j] / d.pdf[i]) / std::log(d.x[j] / d.x[i]);
  };
  CHECK(slope(full, 50, 500) == doctest::Approx(slope(cls, 50, 500)).epsilon(0.02));
  CHECK(slope(cls, 50, 500) == doctest::Approx(-lambda).epsilon(0.02));
}

TEST_CASE("coupled fractions stay inside the simplex") {
  ThreeStateParams p;
  p.eps_cf = 3;
  p.eps_fc = 3;
  p.eps_cc = 3;
  p.H = 20;
  p.N = 200;
  SdeModel m = make_three_state_fp(p);
  IntegratorConfig c = default_integrator(m, 0.01);
  Trajectory t = integrate_sde(m, {0.5, 0.25}, 50.0, c, 808);
  for (std::size_t i = 0; i < t.size(); ++i) {
    double nf = t.values[0][i], np = t.values[1][i];
    CHECK(nf >= c.boundary[0].lo);
    CHECK(np >= c.boundary[1].lo);
    CHECK(nf + np <= c.sum_limit + 1e-12);
  }
}

TEST_CASE("the step observer sees every step with a bounded dt") {
  SdeModel m = make_general_class(1.5, 3.0);
  IntegratorConfig c = default_integrator(m, 0.1);
  std::size_t steps = 0;
  double max_seen = 0;
  c.step_observer = [&](double, const double*, double dt) {
    ++steps;
    max_seen = std::max(max_seen, dt);
  };
  integrate_sde(m, {1.0}, 10.0, c, 99);
  CHECK(steps >= 10000);  // at least t_end / max_dt steps
  CHECK(max_seen <= c.sample_dt / 100 + 1e-15);
}
