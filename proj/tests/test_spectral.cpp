#include <doctest.h>

#include "herdlab/rng.hpp"
#include "herdlab/spectral.hpp"

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

using namespace herdlab;

namespace {

// Quadratic-time reference transform; the oracle for the fast version.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0, 0};
    for (std::size_t j = 0; j < n; ++j) {
      double ang = -2.0 * M_PI * double(k * j % n) / double(n);
      acc += a[j] * std::complex<double>{std::cos(ang), std::sin(ang)};
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("fast transform matches the quadratic reference") {
  Rng rng(31337);
  std::vector<std::complex<double>> a(256);
  for (auto& v : a) v = {rng.normal(), rng.normal()};
  std::vector<std::complex<double>> ref = naive_dft(a);
  std::vector<std::complex<double>> fast = a;
  detail::fft_pow2(fast);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(fast[k] - ref[k]) < 1e-9);
}

TEST_CASE("transform preserves energy") {
  Rng rng(7);
  std::vector<std::complex<double>> a(1024);
  double time_energy = 0;
  for (auto& v : a) {
    v = {rng.normal(), rng.normal()};
    time_energy += std::norm(v);
  }
  std::vector<std::complex<double>> f = a;
  detail::fft_pow2(f);
  double freq_energy = 0;
  for (const auto& v : f) freq_energy += std::norm(v);
  CHECK(freq_energy / double(a.size()) == doctest::Approx(time_energy).epsilon(1e-12));
}

TEST_CASE("transform rejects non-power-of-two input") {
  std::vector<std::complex<double>> a(100);
  CHECK_THROWS(detail::fft_pow2(a));
}

TEST_CASE("white noise spectrum is flat at the variance level") {
  Rng rng(99);
  const double sigma = 1.7;
  std::vector<double> x(1 << 18);
  for (auto& v : x) v = sigma * rng.normal();
  PsdOptions o;
  o.segment_len = 1 << 10;
  SpectralDensity psd = welch_psd(x, 2.0, o);
  // One-sided density integrates to the variance.
  double df = psd.frequency[1] - psd.frequency[0];
  double integral = std::accumulate(psd.power.begin(), psd.power.end(), 0.0) * df;
  CHECK(integral == doctest::Approx(sigma * sigma).epsilon(0.03));
}

TEST_CASE("a pure tone lands in its frequency bin") {
  const double fs = 100.0, f0 = 12.5, amp = 2.0;
  std::vector<double> x(1 << 15);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = amp * std::sin(2.0 * M_PI * f0 * double(i) / fs);
  PsdOptions o;
  o.segment_len = 1 << 12;
  SpectralDensity psd = welch_psd(x, fs, o);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < psd.power.size(); ++i)
    if (psd.power[i] > psd.power[peak]) peak = i;
  CHECK(psd.frequency[peak] == doctest::Approx(f0).epsilon(1e-3));
  double df = psd.frequency[1] - psd.frequency[0];
  double integral = std::accumulate(psd.power.begin(), psd.power.end(), 0.0) * df;
  CHECK(integral == doctest::Approx(amp * amp / 2).epsilon(0.02));
}

TEST_CASE("parallel and serial spectra are bit-identical") {
  Rng rng(1234);
  std::vector<double> x(1 << 16);
  for (auto& v : x) v = rng.normal();
  PsdOptions o;
  o.segment_len = 1 << 11;
  o.jobs = 4;
  SpectralDensity par = welch_psd(x, 1.0, o);
  SpectralDensity ser = welch_psd_serial(x, 1.0, o);
  REQUIRE(par.power.size() == ser.power.size());
  CHECK(par.segments == ser.segments);
  for (std::size_t i = 0; i < par.power.size(); ++i) CHECK(par.power[i] == ser.power[i]);
}

TEST_CASE("spectrum metadata: grid, overlap, dc removal") {
  std::vector<double> x(1 << 12, 5.0);  // constant input: all power is DC
  PsdOptions o;
  o.segment_len = 1 << 10;
  o.overlap = 0.5;
  SpectralDensity psd = welch_psd(x, 1.0, o);
  CHECK(psd.segments == 7);  // hop 512 over 4096
  CHECK(psd.frequency.front() > 0.0);
  CHECK(psd.frequency.back() == doctest::Approx(0.5));
  for (double p : psd.power) CHECK(p == doctest::Approx(0.0));  // mean removed per segment
}

TEST_CASE("ensemble averaging of spectra") {
  SpectralDensity a, b;
  a.frequency = b.frequency = {0.1, 0.2};
  a.power = {1.0, 3.0};
  b.power = {3.0, 5.0};
  a.fs = b.fs = 1.0;
  a.segments = b.segments = 4;
  SpectralDensity m = average_psd({a, b});
  CHECK(m.power[0] == doctest::Approx(2.0));
  CHECK(m.power[1] == doctest::Approx(4.0));
  CHECK(m.segments == 8);
}

TEST_CASE("log-binned histogram on a hand case") {
  std::vector<double> samples{0.5, 1.5, 1.5, 5.0, 20.0};
  EmpiricalPdf pdf = empirical_pdf(samples, 1.0, 10.0, 2);
  REQUIRE(pdf.count.size() == 2);
  CHECK(pdf.count[0] == 2);
  CHECK(pdf.count[1] == 1);
  CHECK(pdf.below == 1);
  CHECK(pdf.above == 1);
  CHECK(pdf.total == 5);
  double w0 = std::sqrt(10.0) - 1.0;
  CHECK(pdf.density[0] == doctest::Approx(2.0 / (5.0 * w0)));
  CHECK(pdf.center[0] == doctest::Approx(std::pow(10.0, 0.25)));
  // In-range mass equals the in-range fraction.
  double mass = 0;
  for (std::size_t i = 0; i < pdf.density.size(); ++i)
    mass += pdf.density[i] * (pdf.edges[i + 1] - pdf.edges[i]);
  CHECK(mass == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("parallel and serial histograms are identical") {
  Rng rng(555);
  std::vector<double> x(200000);
  for (auto& v : x) v = std::exp(rng.normal());
  EmpiricalPdf par = empirical_pdf(x, 0.05, 20.0, 64, 4);
  EmpiricalPdf ser = empirical_pdf_serial(x, 0.05, 20.0, 64);
  CHECK(par.count == ser.count);
  CHECK(par.below == ser.below);
  CHECK(par.above == ser.above);
  for (std::size_t i = 0; i < par.density.size(); ++i) CHECK(par.density[i] == ser.density[i]);
}

TEST_CASE("histogram merging equals pooling") {
  Rng rng(556);
  std::vector<double> x(5000), y(7000);
  for (auto& v : x) v = std::exp(rng.normal());
  for (auto& v : y) v = std::exp(rng.normal());
  EmpiricalPdf px = empirical_pdf(x, 0.1, 10.0, 32);
  EmpiricalPdf py = empirical_pdf(y, 0.1, 10.0, 32);
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  EmpiricalPdf pp = empirical_pdf(pooled, 0.1, 10.0, 32);
  EmpiricalPdf pm = merge_pdf({px, py});
  CHECK(pm.count == pp.count);
  CHECK(pm.total == pp.total);
  for (std::size_t i = 0; i < pm.density.size(); ++i)
    CHECK(pm.density[i] == doctest::Approx(pp.density[i]).epsilon(1e-12));
}

TEST_CASE("power-law fit recovers exact input") {
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    double xi = std::pow(10.0, -1.0 + double(i) * 0.1);
    x.push_back(xi);
    y.push_back(3.0 * std::pow(xi, -2.5));
  }
  PowerLawFit f = fit_powerlaw(x, y, 0.0, 1e9);
  CHECK(f.exponent == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.stderr_ == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(f.points == 40);

  PowerLawFit windowed = fit_powerlaw(x, y, 0.1, 1.0);
  CHECK(windowed.points < 40);
  CHECK(windowed.exponent == doctest::Approx(2.5).epsilon(1e-10));

  CHECK_THROWS(fit_powerlaw(x, y, 5e8, 1e9));  // too few points in range
}

TEST_CASE("fit skips nonpositive values") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{1.0, 0.0, 1.0 / 9, -3.0, 1.0 / 25};
  PowerLawFit f = fit_powerlaw(x, y, 0, 10);  // usable: x = 1, 3, 5 exactly on x^-2
  CHECK(f.points == 3);
  CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("two-segment fit finds the break on clean input") {
  std::vector<double> x, y;
  const double fb = 1.0, b_low = 0.4, b_high = 1.5;
  for (int i = 0; i <= 120; ++i) {
    double xi = std::pow(10.0, -3.0 + double(i) * 0.05);  // 1e-3 .. 1e3
    x.push_back(xi);
    y.push_back(xi < fb ? std::pow(xi, -b_low) : std::pow(xi, -b_high));
  }
  FracturedFit f = fit_fractured(x, y, 1e-3, 1e3, 0.5);
  CHECK(f.low.exponent == doctest::Approx(b_low).epsilon(1e-6));
  CHECK(f.high.exponent == doctest::Approx(b_high).epsilon(1e-6));
  CHECK(f.f_break >= 0.8);
  CHECK(f.f_break <= 1.3);
  CHECK(f.residual_ss < 1e-10);

  // A window without room for both sides is refused.
  CHECK_THROWS(fit_fractured(x, y, 1.0, 2.0, 0.5));
}

TEST_CASE("tail estimator on exact order statistics") {
  // x_(i) = (i/n)^(-1/(lambda-1)) are the quantiles of the lambda power law.
  const double lambda = 3.5;
  std::vector<double> x;
  const int n = 100000;
  for (int i = 1; i <= n; ++i)
    x.push_back(std::pow(double(i) / double(n), -1.0 / (lambda - 1.0)));
  double hat = hill_exponent(x, 20000);
  CHECK(hat == doctest::Approx(lambda).epsilon(0.01));
}
