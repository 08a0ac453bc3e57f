#include "herdlab/market.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace herdlab {

double mood(double n_p, double n_o) {
  double nc = n_p + n_o;
  if (nc <= 0) throw std::domain_error("mood: no chartists");
  return (n_o - n_p) / nc;
}

std::pair<double, double> populations_from_mood(double n_f, double xi) {
  double nc = 1 - n_f;
  return {nc * (1 - xi) / 2, nc * (1 + xi) / 2};
}

double log_price(double r0, double n_f, double xi) {
  if (n_f <= 0) throw std::domain_error("log_price: n_f must be > 0");
  return r0 * (1 - n_f) * xi / n_f;
}

std::vector<double> price_series(const Trajectory& t, double r0) {
  const auto& nf = t.column("n_f");
  const auto& xi = t.column("xi");
  std::vector<double> p(nf.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = log_price(r0, nf[i], xi[i]);
  return p;
}

std::vector<double> returns_series(const std::vector<double>& price, double dt, double window) {
  if (!(dt > 0)) throw std::invalid_argument("returns: dt must be > 0");
  double ratio = window / dt;
  auto k = std::size_t(std::llround(ratio));
  if (k == 0 || std::fabs(ratio - double(k)) > 1e-9 * ratio)
    throw std::invalid_argument("returns: window must be a positive integer multiple of dt");
  if (price.size() <= k) throw std::invalid_argument("returns: series shorter than the window");
  std::vector<double> r(price.size() - k);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = price[i + k] - price[i];
  return r;
}

std::vector<double> abs_values(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::fabs(v[i]);
  return out;
}

MarketSeries market_series(const Trajectory& t, double r0, double window) {
  MarketSeries m;
  m.t0 = t.t0;
  m.dt = t.dt;
  m.window = window;
  m.price = price_series(t, r0);
  m.ret = returns_series(m.price, t.dt, window);
  return m;
}

void MarketSeries::write_csv_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os << "#t0=" << t0 << "\n#dt=" << dt << "\n#window=" << window << "\n";
  os << "#t,p,r,abs_r\n";
  auto k = std::size_t(std::llround(window / dt));
  char buf[160];
  for (std::size_t i = 0; i < ret.size(); ++i) {
    double time = t0 + double(i + k) * dt;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", time, price[i + k], ret[i],
                  std::fabs(ret[i]));
    os << buf;
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace herdlab
