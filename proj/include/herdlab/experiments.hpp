#pragma once

#include "herdlab/config.hpp"
#include "herdlab/spectral.hpp"
#include "herdlab/trajectory.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace herdlab {

// One validation check: a measured distance against its threshold.
struct CheckResult {
  std::string name;
  std::string metric;  // what `value` measures
  double value = 0;
  double threshold = 0;
  bool larger_is_worse = true;
  bool pass = false;
  std::string detail;
};

CheckResult make_check(std::string name, std::string metric, double value, double threshold,
                       std::string detail = "", bool larger_is_worse = true);

// ---- simulate / analyze -------------------------------------------------

struct SimulateResult {
  std::vector<std::string> files;
  std::vector<std::uint64_t> seeds;
  std::string manifest_path;
};

SimulateResult run_simulate(const ExperimentConfig& cfg, const std::string& out_dir, int jobs);

// Runs the model in cfg (all ensemble members), reduces to the model's
// primary observable, and emits pdf.csv, psd.csv, fits.json, manifest.json.
struct AnalyzeResult {
  EmpiricalPdf pdf;
  SpectralDensity psd;
  PowerLawFit tail_fit;
  PowerLawFit psd_fit;
  std::optional<FracturedFit> fractured;
  double tail_fit_lo = 0, tail_fit_hi = 0;
  double psd_fit_lo = 0, psd_fit_hi = 0;
};

AnalyzeResult run_analyze(const ExperimentConfig& cfg, const std::string& out_dir, int jobs);

// Primary observable series per model: two-state counts map to x = X/N,
// scaled two-state models report their own state, market models map to the
// absolute return over analysis.window_T.
std::vector<double> primary_observable(const ExperimentConfig& cfg, const Trajectory& t);

// ---- figure reproductions ----------------------------------------------

struct Fig1Options {
  std::string out_dir;
  std::uint64_t seed = 105;
  int jobs = 0;
  double sample_dt = 0;   // 0: per-point tuned value
  double t_end = 230000;  // base run length, scaled per point; >= 1e7 samples each
  bool include_smallest = true;  // also run the eps2 = 0.1 point
};

struct Fig1PointResult {
  double eps2 = 0;
  double lambda_theory = 0, beta_theory = 0;
  double lambda_hat = 0;        // shifted-abscissa tail fit
  double lambda_hat_plain = 0;  // same window, plain abscissa
  double beta_hat = 0;
  PowerLawFit pdf_fit, psd_fit;
  double pdf_fit_lo = 0, pdf_fit_hi = 0;
  double psd_fit_lo = 0, psd_fit_hi = 0;
  std::size_t samples = 0;
  std::uint64_t tail_window_count = 0;  // samples inside the pdf fit window
  double sample_dt = 0;                 // density-leg sampling interval
  double psd_sample_dt = 0;             // spectrum grid (may be a finer second run)
  std::size_t psd_samples = 0;
};

Fig1PointResult run_fig1_point(double eps2, const Fig1Options& o);
std::vector<Fig1PointResult> run_reproduce_fig1(const Fig1Options& o);

struct Fig3Options {
  std::string out_dir;
  std::uint64_t seed = 307;
  int jobs = 0;
  double sample_dt = 0.01;
  double t_end = 84000;
  double window_T = 1.0;
  // Spectrum fit band. Below ~0.01 the slow-channel knee flattens the
  // spectrum; above ~10 the sampling floor takes over. Both features would
  // drag a straight-line fit if left inside the band.
  double psd_fit_lo = 0.02;
  double psd_fit_hi = 10.0;
  std::vector<double> sensitivity_T = {0.1, 1.0, 10.0};
};

struct Fig3SensitivityRow {
  double window_T = 0;
  double lambda_hat = 0;
  double beta1 = 0, beta2 = 0, f_break = 0;
};

struct Fig3Result {
  PowerLawFit tail_fit;
  double lambda_hat = 0;       // shifted-abscissa tail fit
  double lambda_hat_hill = 0;  // order-statistics cross-check
  FracturedFit fracture;
  PowerLawFit single_fit;      // one slope over the same band
  double improvement = 0;      // 1 - fracture_ss / single_ss
  double pdf_fit_lo = 0, pdf_fit_hi = 0;
  double psd_fit_lo = 0, psd_fit_hi = 0;
  std::vector<Fig3SensitivityRow> sensitivity;
};

Fig3Result run_reproduce_fig3(const Fig3Options& o);

// ---- oracle and property checks (shared by validate and the test suite) --

// Two-state chain sampled by the event-driven simulator against the
// detailed-balance stationary pmf.
CheckResult check_jump_vs_oracle_tv(std::int64_t N, double t_end, std::uint64_t seed,
                                    double threshold);

// Event-driven two-state occupation vs the density of the matching
// finite-N diffusion for x = X/N.
CheckResult check_jump_vs_sde_ks(std::int64_t N, double t_end, std::uint64_t seed,
                                 double threshold, int jobs);

// Fixed-step simulator vs the event-driven one on the same configuration.
CheckResult check_fixed_dt_vs_event_ks(std::uint64_t seed, double threshold);

// Detailed-balance pmf vs the generator null-space solve (same chain).
CheckResult check_detailed_balance_vs_nullspace(double threshold);

// Occupation error vs the oracle must shrink as the run length doubles.
CheckResult check_tv_trend(std::uint64_t seed);

// Mood marginal of the exact three-group stationary solve vs long samples of
// the reduced two-variable diffusion.
CheckResult check_xi_marginal_vs_sde(std::int64_t N, std::uint64_t seed, double threshold);

// Decomposition round trip on random symmetric positive semidefinite inputs.
CheckResult check_decompose_random(std::size_t count, std::uint64_t seed, double threshold);

// Noise-matrix near-diagonality for the market diffusion at large H.
CheckResult check_decompose_financial_offdiag(double H, double threshold);

// Estimator oracles on synthetic inputs with known answers.
CheckResult check_estimator_white_noise(std::uint64_t seed, double threshold);
CheckResult check_estimator_powerlaw(std::uint64_t seed, double tolerance);
CheckResult check_estimator_fractured(std::uint64_t seed, double tolerance);

// Sampled SDE paths stay strictly inside their configured boundaries.
CheckResult check_boundary_respect(std::uint64_t seed);

// ---- validate -----------------------------------------------------------

struct ValidateOptions {
  std::string level = "quick";  // or "full"
  std::string out_dir;
  int jobs = 0;
  std::uint64_t seed = 9000;
  std::string inject_fault;  // "", or "two-state-rates"
};

struct ValidateReport {
  std::vector<CheckResult> checks;
  bool all_pass = false;
};

ValidateReport run_validate(const ValidateOptions& o);

// ---- shared output helpers ----------------------------------------------

void write_pdf_csv(const std::string& path, const EmpiricalPdf& pdf);
void write_psd_csv(const std::string& path, const SpectralDensity& psd);
std::string fractured_to_json_text(const FracturedFit& f);

// Abscissa used by the shifted tail fit.
inline double shifted_abscissa(double x) { return std::sqrt(x * (1 + x)); }

}  // namespace herdlab
