#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace herdlab {

namespace detail {
// In-place forward transform, length must be a power of two, no scaling.
void fft_pow2(std::vector<std::complex<double>>& a);
}  // namespace detail

struct PsdOptions {
  std::size_t segment_len = 1 << 12;  // power of two
  double overlap = 0.5;               // fraction of segment_len
  int jobs = 0;                       // 0: library default
};

struct SpectralDensity {
  std::vector<double> frequency;  // DC dropped, Nyquist kept
  std::vector<double> power;      // one-sided; integral over f approximates variance
  double fs = 0;
  std::size_t segments = 0;
};

// Averaged modified periodogram: Hann-windowed segments with the given
// overlap, per-segment mean removal, one-sided normalization 2 |X|^2/(fs U).
SpectralDensity welch_psd(const std::vector<double>& signal, double fs, const PsdOptions& o);
SpectralDensity welch_psd_serial(const std::vector<double>& signal, double fs,
                                 const PsdOptions& o);

// Pointwise mean of spectra on identical grids (ensemble averaging).
SpectralDensity average_psd(const std::vector<SpectralDensity>& members);

struct EmpiricalPdf {
  std::vector<double> edges;    // geometric, n_bins + 1
  std::vector<double> center;   // geometric mean of the bin edges
  std::vector<double> density;  // count / (total * linear width)
  std::vector<std::uint64_t> count;
  std::uint64_t total = 0;  // includes out-of-range samples
  std::uint64_t below = 0, above = 0;
};

// Histogram on log-spaced bins over [lo, hi]; samples outside the range are
// tallied but carry no bin.  Total mass of the density equals the in-range
// fraction of the input.
EmpiricalPdf empirical_pdf(const std::vector<double>& samples, double lo, double hi,
                           std::size_t n_bins, int jobs = 0);
EmpiricalPdf empirical_pdf_serial(const std::vector<double>& samples, double lo, double hi,
                                  std::size_t n_bins);

// Merges histograms with identical edges.
EmpiricalPdf merge_pdf(const std::vector<EmpiricalPdf>& parts);

struct PowerLawFit {
  double exponent = 0;  // y ~ amplitude * x^(-exponent)
  double stderr_ = 0;   // standard error of the exponent
  double amplitude = 0;
  double r2 = 0;
  double residual_ss = 0;  // in log y
  double x_lo = 0, x_hi = 0;
  std::size_t points = 0;
};

// Least squares on (log x, log y) restricted to [x_lo, x_hi]; points with
// y <= 0 are skipped.  Needs at least three usable points.
PowerLawFit fit_powerlaw(const std::vector<double>& x, const std::vector<double>& y, double x_lo,
                         double x_hi);

struct FracturedFit {
  PowerLawFit low, high;  // below and above the break
  double f_break = 0;
  double residual_ss = 0;  // low.residual_ss + high.residual_ss
};

// Two power-law segments with a grid-searched break; each side must span at
// least min_decades and hold at least five points.
FracturedFit fit_fractured(const std::vector<double>& x, const std::vector<double>& y,
                           double x_lo, double x_hi, double min_decades = 0.5);

// Tail exponent lambda of the density p(x) ~ x^(-lambda) from the largest
// tail_count order statistics (the classic conditional-MLE tail estimator;
// it estimates the survival exponent, so 1 is added).
double hill_exponent(std::vector<double> samples, std::size_t tail_count);

}  // namespace herdlab
