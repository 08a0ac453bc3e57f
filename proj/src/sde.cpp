#include "herdlab/sde.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace herdlab {

double Matrix2::frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

Matrix2 Matrix2::times_transpose() const {
  return {a * a + b * b, a * c + b * d, c * a + d * b, c * c + d * d};
}

namespace {

double two_state_tau_cont(double x, double alpha, bool feedback) {
  if (!feedback || alpha == 0) return 1.0;
  return std::pow(x / (1 - x), -alpha);
}

}  // namespace

void SdeModel::coeffs(const double* x, double* drift, double* diff) const {
  switch (variant) {
    case SdeVariant::TwoStateFull: {
      const auto& p = two_state;
      double v = x[0];
      double tau = two_state_tau_cont(v, p.alpha, p.feedback);
      double nd = double(p.N);
      double mu1 = p.sigma1 + p.h * nd * v / tau;
      double mu2 = (p.sigma2 + p.h * nd * (1 - v)) / tau;
      double gain = (1 - v) * mu1, loss = v * mu2;
      drift[0] = gain - loss;
      diff[0] = std::sqrt((gain + loss) / nd);
      return;
    }
    case SdeVariant::TwoStateAsymptotic: {
      double y = x[0];
      double inv_tau = std::pow(y, alpha);  // herding clock 1/tau = y^alpha
      drift[0] = (eps1 + y * (2 - eps2) * inv_tau) * (1 + y);
      diff[0] = std::sqrt(2 * y * inv_tau) * (1 + y);
      return;
    }
    case SdeVariant::GeneralClass: {
      double v = x[0];
      drift[0] = (eta - lambda / 2) * std::pow(v, 2 * eta - 1);
      diff[0] = std::pow(v, eta);
      return;
    }
    case SdeVariant::ThreeStateFp: {
      const auto& p = market;
      double nf = x[0], np = x[1];
      drift[0] = p.sigma_cf() * (1 - nf) - p.sigma_fc() * nf;
      drift[1] = p.sigma_cc() * (1 - nf - 2 * np);
      Matrix2 s = diffusion_decompose(fp_diffusion_matrix_exact(p, nf, np));
      diff[0] = s.a;
      diff[1] = s.b;
      diff[2] = s.c;
      diff[3] = s.d;
      return;
    }
    case SdeVariant::ThreeStateTransformed: {
      const auto& p = market;
      double nf = x[0], xi = x[1];
      double inv_tau = 1 + std::pow(std::fabs((1 - nf) / nf * xi), p.alpha);
      drift[0] = (1 - nf) * p.eps_cf * inv_tau - nf * p.eps_fc;
      drift[1] = -2 * p.H * p.eps_cc * xi * inv_tau;
      diff[0] = std::sqrt(2 * nf * (1 - nf) * inv_tau);
      diff[1] = 0;
      diff[2] = 0;
      diff[3] = std::sqrt(2 * p.H * (1 - xi * xi) * inv_tau);
      return;
    }
  }
  throw std::logic_error("sde: unknown variant");
}

SdeModel make_two_state_full(const TwoStateParams& p) {
  p.validate();
  SdeModel m;
  m.variant = SdeVariant::TwoStateFull;
  m.dim = 1;
  m.columns = {"x"};
  m.model_id = "sde-two-state-full";
  m.two_state = p;
  return m;
}

SdeModel make_two_state_asymptotic(double eps1, double eps2, double alpha) {
  if (!(eps1 > 0) || !(eps2 > 0) || alpha < 0)
    throw std::invalid_argument("sde: need eps1, eps2 > 0 and alpha >= 0");
  SdeModel m;
  m.variant = SdeVariant::TwoStateAsymptotic;
  m.dim = 1;
  m.columns = {"y"};
  m.model_id = "sde-two-state-asymptotic";
  m.eps1 = eps1;
  m.eps2 = eps2;
  m.alpha = alpha;
  return m;
}

SdeModel make_general_class(double eta, double lambda) {
  SdeModel m;
  m.variant = SdeVariant::GeneralClass;
  m.dim = 1;
  m.columns = {"x"};
  m.model_id = "sde-general-class";
  m.eta = eta;
  m.lambda = lambda;
  return m;
}

SdeModel make_three_state_fp(const ThreeStateParams& p) {
  p.validate();
  SdeModel m;
  m.variant = SdeVariant::ThreeStateFp;
  m.dim = 2;
  m.columns = {"n_f", "n_p"};
  m.model_id = "sde-three-state-fp";
  m.market = p;
  return m;
}

SdeModel make_three_state_transformed(const ThreeStateParams& p) {
  p.validate();
  SdeModel m;
  m.variant = SdeVariant::ThreeStateTransformed;
  m.dim = 2;
  m.columns = {"n_f", "xi"};
  m.model_id = "sde-three-state-transformed";
  m.market = p;
  return m;
}

Matrix2 fp_diffusion_matrix_exact(const ThreeStateParams& p, double n_f, double n_p) {
  double off = -p.h1 * n_f * n_p;
  return {p.h1 * n_f * (1 - n_f), off, off,
          p.H * p.h1 * n_p * (1 - n_f - n_p) + p.h1 * n_f * n_p};
}

Matrix2 diffusion_decompose(const Matrix2& d2) {
  double scale = std::max({std::fabs(d2.a), std::fabs(d2.b), std::fabs(d2.c), std::fabs(d2.d), 1e-300});
  if (std::fabs(d2.b - d2.c) > 1e-9 * scale)
    throw std::invalid_argument("decompose: matrix must be symmetric");
  // Principal square root of A = 2 d2 via the Cayley-Hamilton identity
  // sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A)).
  Matrix2 a{2 * d2.a, d2.b + d2.c, d2.b + d2.c, 2 * d2.d};
  double det = a.a * a.d - a.b * a.c;
  double tr = a.a + a.d;
  if (det < -1e-12 * scale * scale || tr < -1e-12 * scale)
    throw std::invalid_argument("decompose: matrix must be positive semidefinite");
  double sd = std::sqrt(std::max(det, 0.0));
  double denom = tr + 2 * sd;
  if (denom <= 0) return {};  // zero matrix
  double inv = 1.0 / std::sqrt(denom);
  return {(a.a + sd) * inv, a.b * inv, a.c * inv, (a.d + sd) * inv};
}

double decompose_residual(const Matrix2& s, const Matrix2& d2) {
  Matrix2 h = s.times_transpose();
  Matrix2 r{h.a / 2 - d2.a, h.b / 2 - d2.b, h.c / 2 - d2.c, h.d / 2 - d2.d};
  return r.frobenius();
}

IntegratorConfig default_integrator(const SdeModel& m, double sample_dt) {
  IntegratorConfig c;
  c.sample_dt = sample_dt;
  // Fractions live one lattice site away from the degenerate endpoints.
  double inv_n_two = m.two_state.N > 0 ? 1.0 / double(m.two_state.N) : 1e-3;
  double inv_n_market = m.market.N > 0 ? 1.0 / double(m.market.N) : 1e-3;
  switch (m.variant) {
    case SdeVariant::TwoStateFull:
      c.boundary[0] = {inv_n_two, 1 - inv_n_two};
      break;
    case SdeVariant::TwoStateAsymptotic:
    case SdeVariant::GeneralClass:
      c.boundary[0] = {1e-2, 1e3};
      break;
    case SdeVariant::ThreeStateFp:
      c.boundary[0] = {inv_n_market, 1 - inv_n_market};
      c.boundary[1] = {inv_n_market, 1 - inv_n_market};
      c.sum_limit = 1 - inv_n_market;
      break;
    case SdeVariant::ThreeStateTransformed:
      c.boundary[0] = {inv_n_market, 1 - inv_n_market};
      c.boundary[1] = {-1 + 1e-3, 1 - 1e-3};
      break;
  }
  return c;
}

namespace {

double fold_into(double v, double lo, double hi) {
  // Up to two folds covers every step the integrator can take; clamp after
  // that so pathological inputs cannot loop.
  for (int k = 0; k < 2; ++k) {
    if (v < lo) v = 2 * lo - v;
    if (v > hi) v = 2 * hi - v;
  }
  return std::min(std::max(v, lo), hi);
}

[[noreturn]] void throw_nonfinite(double t, const double* x, int dim) {
  std::ostringstream os;
  os << "sde: non-finite state at t = " << t << " (";
  for (int i = 0; i < dim; ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  throw std::runtime_error(os.str());
}

}  // namespace

Trajectory integrate_sde(const SdeModel& m, const std::vector<double>& x0, double t_end,
                         const IntegratorConfig& c, std::uint64_t seed) {
  if (int(x0.size()) != m.dim) throw std::invalid_argument("sde: x0 dimension mismatch");
  if (!(c.sample_dt > 0)) throw std::invalid_argument("sde: sample_dt must be > 0");
  if (!(t_end >= c.sample_dt)) throw std::invalid_argument("sde: t_end must be >= sample_dt");
  if (!(c.kappa > 0) || c.kappa > 1) throw std::invalid_argument("sde: kappa outside (0, 1]");
  const double max_dt = c.max_dt > 0 ? c.max_dt : c.sample_dt / 100;
  const double min_dt = c.min_dt > 0 ? c.min_dt : max_dt / 1000;
  if (min_dt > max_dt) throw std::invalid_argument("sde: min_dt exceeds max_dt");
  for (int i = 0; i < m.dim; ++i)
    if (!(c.boundary[std::size_t(i)].lo < c.boundary[std::size_t(i)].hi))
      throw std::invalid_argument("sde: empty boundary interval");

  Trajectory traj;
  traj.dt = c.sample_dt;
  traj.seed = seed;
  traj.columns = m.columns;
  traj.model_id = m.model_id;
  traj.values.resize(std::size_t(m.dim));
  auto n_samples = std::size_t(std::floor(t_end / c.sample_dt)) + 1;
  for (auto& v : traj.values) v.reserve(n_samples);

  Rng rng(seed);
  double x[2] = {0, 0}, drift[2], diff[4], z[2];
  for (int i = 0; i < m.dim; ++i) {
    x[i] = fold_into(x0[std::size_t(i)], c.boundary[std::size_t(i)].lo, c.boundary[std::size_t(i)].hi);
    traj.values[std::size_t(i)].push_back(x[i]);
  }
  double t = 0;
  for (std::size_t k = 1; k < n_samples; ++k) {
    const double t_target = double(k) * c.sample_dt;
    while (t < t_target) {
      m.coeffs(x, drift, diff);
      double dt = max_dt;
      for (int i = 0; i < m.dim; ++i) {
        const auto& bd = c.boundary[std::size_t(i)];
        double scale = std::min(x[i] - bd.lo, bd.hi - x[i]);
        scale = std::max(scale, 1e-12);
        double a = std::fabs(drift[i]);
        if (a > 0) dt = std::min(dt, c.kappa * scale / a);
        double b2;
        if (m.dim == 1)
          b2 = diff[0] * diff[0];
        else
          b2 = diff[2 * i] * diff[2 * i] + diff[2 * i + 1] * diff[2 * i + 1];
        if (b2 > 0) dt = std::min(dt, c.kappa * c.kappa * scale * scale / b2);
      }
      dt = std::max(dt, min_dt);
      dt = std::min(dt, t_target - t);
      double sq = std::sqrt(dt);
      for (int i = 0; i < m.dim; ++i) z[i] = rng.normal();
      if (m.dim == 1) {
        x[0] += drift[0] * dt + diff[0] * z[0] * sq;
      } else {
        x[0] += drift[0] * dt + (diff[0] * z[0] + diff[1] * z[1]) * sq;
        x[1] += drift[1] * dt + (diff[2] * z[0] + diff[3] * z[1]) * sq;
      }
      for (int i = 0; i < m.dim; ++i) {
        if (!std::isfinite(x[i])) throw_nonfinite(t, x, m.dim);
        x[i] = fold_into(x[i], c.boundary[std::size_t(i)].lo, c.boundary[std::size_t(i)].hi);
      }
      if (c.sum_limit > 0 && m.dim == 2 && x[0] + x[1] > c.sum_limit) {
        // Reflect across the line x0 + x1 = sum_limit, then re-box.
        double nx0 = c.sum_limit - x[1], nx1 = c.sum_limit - x[0];
        x[0] = fold_into(nx0, c.boundary[0].lo, c.boundary[0].hi);
        x[1] = fold_into(nx1, c.boundary[1].lo, c.boundary[1].hi);
        if (x[0] + x[1] > c.sum_limit) {
          double excess = (x[0] + x[1] - c.sum_limit) / 2;
          x[0] = std::max(x[0] - excess, c.boundary[0].lo);
          x[1] = std::max(x[1] - excess, c.boundary[1].lo);
        }
      }
      t += dt;
      if (c.step_observer) c.step_observer(t, x, dt);
    }
    t = t_target;
    for (int i = 0; i < m.dim; ++i) traj.values[std::size_t(i)].push_back(x[i]);
  }
  return traj;
}

}  // namespace herdlab
