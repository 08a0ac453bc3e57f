#include "herdlab/spectral.hpp"

#include "herdlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace herdlab {

namespace detail {

void fft_pow2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2 * M_PI / double(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace detail

namespace {

struct WelchPlan {
  std::size_t seg_len = 0, hop = 0, n_seg = 0, n_freq = 0;
  std::vector<double> window;
  double u = 0;  // sum of squared window values
};

WelchPlan plan_welch(std::size_t n, double fs, const PsdOptions& o) {
  if (!(fs > 0)) throw std::invalid_argument("welch: fs must be > 0");
  const std::size_t L = o.segment_len;
  if (L < 8 || (L & (L - 1)) != 0)
    throw std::invalid_argument("welch: segment_len must be a power of two, >= 8");
  if (!(o.overlap >= 0) || o.overlap >= 1) throw std::invalid_argument("welch: overlap outside [0, 1)");
  if (n < L) throw std::invalid_argument("welch: signal shorter than one segment");
  WelchPlan p;
  p.seg_len = L;
  p.hop = std::max<std::size_t>(1, std::size_t(double(L) * (1 - o.overlap)));
  p.n_seg = (n - L) / p.hop + 1;
  p.n_freq = L / 2;  // bins 1 .. L/2 (DC dropped, Nyquist kept)
  p.window.resize(L);
  for (std::size_t i = 0; i < L; ++i)
    p.window[i] = 0.5 * (1 - std::cos(2 * M_PI * double(i) / double(L)));
  p.u = 0;
  for (double w : p.window) p.u += w * w;
  return p;
}

// Modified periodogram of one segment: remove the segment mean, apply the
// window, transform, fold to one side.  Nyquist keeps a factor 1, the rest 2.
void segment_periodogram(const std::vector<double>& signal, std::size_t start,
                         const WelchPlan& p, double fs,
                         std::vector<std::complex<double>>& buf, std::vector<double>& out) {
  double m = 0;
  for (std::size_t i = 0; i < p.seg_len; ++i) m += signal[start + i];
  m /= double(p.seg_len);
  buf.assign(p.seg_len, {});
  for (std::size_t i = 0; i < p.seg_len; ++i) buf[i] = (signal[start + i] - m) * p.window[i];
  detail::fft_pow2(buf);
  const double norm = 1.0 / (fs * p.u);
  out.resize(p.n_freq);
  for (std::size_t k = 1; k <= p.n_freq; ++k) {
    double mag = std::norm(buf[k]);
    out[k - 1] = (k == p.n_freq ? 1.0 : 2.0) * mag * norm;
  }
}

SpectralDensity assemble(const WelchPlan& p, double fs, std::vector<double> power) {
  SpectralDensity s;
  s.fs = fs;
  s.segments = p.n_seg;
  s.frequency.resize(p.n_freq);
  for (std::size_t k = 1; k <= p.n_freq; ++k) s.frequency[k - 1] = double(k) * fs / double(p.seg_len);
  for (auto& v : power) v /= double(p.n_seg);
  s.power = std::move(power);
  return s;
}

}  // namespace

SpectralDensity welch_psd_serial(const std::vector<double>& signal, double fs,
                                 const PsdOptions& o) {
  WelchPlan p = plan_welch(signal.size(), fs, o);
  std::vector<std::complex<double>> buf;
  std::vector<double> seg, acc(p.n_freq, 0.0);
  for (std::size_t s = 0; s < p.n_seg; ++s) {
    segment_periodogram(signal, s * p.hop, p, fs, buf, seg);
    for (std::size_t k = 0; k < p.n_freq; ++k) acc[k] += seg[k];
  }
  return assemble(p, fs, std::move(acc));
}

SpectralDensity welch_psd(const std::vector<double>& signal, double fs, const PsdOptions& o) {
  WelchPlan p = plan_welch(signal.size(), fs, o);
  // Periodograms land in per-segment slots and are reduced in segment order,
  // so the sum matches the serial path bit for bit at any thread count.
  std::vector<std::vector<double>> slots(p.n_seg);
  par::for_each(p.n_seg, o.jobs, [&](std::size_t s) {
    thread_local std::vector<std::complex<double>> buf;
    segment_periodogram(signal, s * p.hop, p, fs, buf, slots[s]);
  });
  std::vector<double> acc(p.n_freq, 0.0);
  for (std::size_t s = 0; s < p.n_seg; ++s)
    for (std::size_t k = 0; k < p.n_freq; ++k) acc[k] += slots[s][k];
  return assemble(p, fs, std::move(acc));
}

SpectralDensity average_psd(const std::vector<SpectralDensity>& members) {
  if (members.empty()) throw std::invalid_argument("average_psd: no members");
  SpectralDensity out = members.front();
  for (std::size_t m = 1; m < members.size(); ++m) {
    const auto& s = members[m];
    if (s.frequency.size() != out.frequency.size() || s.fs != out.fs)
      throw std::invalid_argument("average_psd: mismatched grids");
    for (std::size_t k = 0; k < out.power.size(); ++k) out.power[k] += s.power[k];
    out.segments += s.segments;
  }
  for (auto& v : out.power) v /= double(members.size());
  return out;
}

namespace {

struct PdfPlan {
  double lo = 0, hi = 0, log_lo = 0, inv_log_width = 0;
  std::size_t n_bins = 0;
};

PdfPlan plan_pdf(double lo, double hi, std::size_t n_bins) {
  if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("pdf: need 0 < lo < hi");
  if (n_bins < 2) throw std::invalid_argument("pdf: need at least two bins");
  PdfPlan p;
  p.lo = lo;
  p.hi = hi;
  p.n_bins = n_bins;
  p.log_lo = std::log(lo);
  p.inv_log_width = double(n_bins) / (std::log(hi) - p.log_lo);
  return p;
}

EmpiricalPdf finish_pdf(const PdfPlan& p, std::vector<std::uint64_t> count, std::uint64_t below,
                        std::uint64_t above, std::uint64_t total) {
  EmpiricalPdf out;
  out.count = std::move(count);
  out.below = below;
  out.above = above;
  out.total = total;
  out.edges.resize(p.n_bins + 1);
  out.center.resize(p.n_bins);
  out.density.resize(p.n_bins);
  double step = (std::log(p.hi) - p.log_lo) / double(p.n_bins);
  for (std::size_t i = 0; i <= p.n_bins; ++i) out.edges[i] = std::exp(p.log_lo + double(i) * step);
  out.edges.front() = p.lo;
  out.edges.back() = p.hi;
  for (std::size_t i = 0; i < p.n_bins; ++i) {
    out.center[i] = std::sqrt(out.edges[i] * out.edges[i + 1]);
    double width = out.edges[i + 1] - out.edges[i];
    out.density[i] = double(out.count[i]) / (double(total) * width);
  }
  return out;
}

template <class Tally>
void tally_range(const std::vector<double>& samples, std::size_t begin, std::size_t end,
                 const PdfPlan& p, Tally&& t) {
  for (std::size_t i = begin; i < end; ++i) {
    double x = samples[i];
    if (!(x >= p.lo)) {
      t.below += 1;
      continue;
    }
    if (x > p.hi) {
      t.above += 1;
      continue;
    }
    auto b = std::size_t((std::log(x) - p.log_lo) * p.inv_log_width);
    if (b >= p.n_bins) b = p.n_bins - 1;  // x == hi lands here
    t.count[b] += 1;
  }
}

struct PdfTally {
  std::vector<std::uint64_t> count;
  std::uint64_t below = 0, above = 0;
};

}  // namespace

EmpiricalPdf empirical_pdf_serial(const std::vector<double>& samples, double lo, double hi,
                                  std::size_t n_bins) {
  if (samples.empty()) throw std::invalid_argument("pdf: empty sample");
  PdfPlan p = plan_pdf(lo, hi, n_bins);
  PdfTally t;
  t.count.assign(n_bins, 0);
  tally_range(samples, 0, samples.size(), p, t);
  return finish_pdf(p, std::move(t.count), t.below, t.above, samples.size());
}

EmpiricalPdf empirical_pdf(const std::vector<double>& samples, double lo, double hi,
                           std::size_t n_bins, int jobs) {
  if (samples.empty()) throw std::invalid_argument("pdf: empty sample");
  PdfPlan p = plan_pdf(lo, hi, n_bins);
  int j = par::resolve(jobs);
  auto chunks = std::size_t(std::max(j, 1));
  std::vector<PdfTally> tallies(chunks);
  std::size_t per = (samples.size() + chunks - 1) / chunks;
  par::for_each(chunks, jobs, [&](std::size_t c) {
    tallies[c].count.assign(n_bins, 0);
    std::size_t b = c * per, e = std::min(samples.size(), b + per);
    if (b < e) tally_range(samples, b, e, p, tallies[c]);
  });
  PdfTally t;
  t.count.assign(n_bins, 0);
  // Integer tallies, so the merge order cannot change the result.
  for (const auto& part : tallies) {
    t.below += part.below;
    t.above += part.above;
    for (std::size_t i = 0; i < n_bins; ++i) t.count[i] += part.count[i];
  }
  return finish_pdf(p, std::move(t.count), t.below, t.above, samples.size());
}

EmpiricalPdf merge_pdf(const std::vector<EmpiricalPdf>& parts) {
  if (parts.empty()) throw std::invalid_argument("merge_pdf: no parts");
  EmpiricalPdf out = parts.front();
  for (std::size_t m = 1; m < parts.size(); ++m) {
    const auto& p = parts[m];
    if (p.edges != out.edges) throw std::invalid_argument("merge_pdf: mismatched edges");
    out.total += p.total;
    out.below += p.below;
    out.above += p.above;
    for (std::size_t i = 0; i < out.count.size(); ++i) out.count[i] += p.count[i];
  }
  for (std::size_t i = 0; i < out.count.size(); ++i) {
    double width = out.edges[i + 1] - out.edges[i];
    out.density[i] = double(out.count[i]) / (double(out.total) * width);
  }
  return out;
}

PowerLawFit fit_powerlaw(const std::vector<double>& x, const std::vector<double>& y, double x_lo,
                         double x_hi) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
  std::vector<double> u, v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_lo || x[i] > x_hi || !(y[i] > 0)) continue;
    u.push_back(std::log(x[i]));
    v.push_back(std::log(y[i]));
  }
  const auto n = u.size();
  if (n < 3) throw std::invalid_argument("fit: fewer than three usable points in range");
  double mu = std::accumulate(u.begin(), u.end(), 0.0) / double(n);
  double mv = std::accumulate(v.begin(), v.end(), 0.0) / double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (u[i] - mu) * (u[i] - mu);
    sxy += (u[i] - mu) * (v[i] - mv);
  }
  double slope = sxy / sxx;
  double intercept = mv - slope * mu;
  double rss = 0, tss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = v[i] - (intercept + slope * u[i]);
    rss += r * r;
    tss += (v[i] - mv) * (v[i] - mv);
  }
  PowerLawFit f;
  f.exponent = -slope;
  f.amplitude = std::exp(intercept);
  f.residual_ss = rss;
  f.r2 = tss > 0 ? 1 - rss / tss : 1;
  f.stderr_ = n > 3 ? std::sqrt(rss / double(n - 2) / sxx) : 0;
  f.x_lo = x_lo;
  f.x_hi = x_hi;
  f.points = n;
  return f;
}

FracturedFit fit_fractured(const std::vector<double>& x, const std::vector<double>& y,
                           double x_lo, double x_hi, double min_decades) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
  std::vector<double> candidates;
  for (double v : x)
    if (v > x_lo && v < x_hi) candidates.push_back(v);
  std::sort(candidates.begin(), candidates.end());
  const double span = std::pow(10.0, min_decades);
  bool found = false;
  FracturedFit best;
  for (double fb : candidates) {
    if (fb < x_lo * span || fb > x_hi / span) continue;
    PowerLawFit lo_fit, hi_fit;
    try {
      lo_fit = fit_powerlaw(x, y, x_lo, fb);
      hi_fit = fit_powerlaw(x, y, fb, x_hi);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (lo_fit.points < 5 || hi_fit.points < 5) continue;
    double ss = lo_fit.residual_ss + hi_fit.residual_ss;
    if (!found || ss < best.residual_ss) {
      found = true;
      best.low = lo_fit;
      best.high = hi_fit;
      best.f_break = fb;
      best.residual_ss = ss;
    }
  }
  if (!found) throw std::runtime_error("fit: no admissible break point");
  return best;
}

double hill_exponent(std::vector<double> samples, std::size_t tail_count) {
  if (tail_count < 2 || samples.size() <= tail_count)
    throw std::invalid_argument("hill: need 2 <= tail_count < sample size");
  std::sort(samples.begin(), samples.end(), std::greater<>());
  double x_ref = samples[tail_count];
  if (!(x_ref > 0)) throw std::invalid_argument("hill: tail must be positive");
  double acc = 0;
  for (std::size_t i = 0; i < tail_count; ++i) acc += std::log(samples[i] / x_ref);
  return 1 + double(tail_count) / acc;
}

}  // namespace herdlab
