#pragma once

#include "herdlab/params.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace herdlab {

// Everything a run needs, deserialized from one JSON document.  Section
// defaults are applied on load, so serializing back yields the effective
// configuration (what the manifests record).
struct RunSection {
  double t_end = 100;
  double sample_dt = 0.1;
  std::uint64_t seed = 1;
  std::size_t ensemble = 1;
  double burn_in_frac = 0.1;
  double step_dt = 0;          // fixed-dt jump models only
  std::vector<double> x0;      // empty: model default start
};

struct IntegratorSection {
  double kappa = 0.05;
  double max_dt = 0;  // 0: sample_dt / 100
  double min_dt = 0;  // 0: max_dt / 1000
  std::vector<std::array<double, 2>> boundary;  // empty: model default
};

struct AnalysisSection {
  double window_T = 1.0;  // return window, market models
  std::size_t psd_segment = 1 << 14;
  double psd_overlap = 0.5;
  std::size_t pdf_bins_per_decade = 40;
  double pdf_lo = 0;  // 0: model boundary
  double pdf_hi = 0;
  double pdf_fit_lo = 0;  // 0: percentile default
  double pdf_fit_hi = 0;
  std::array<double, 2> pdf_fit_percentiles{0.5, 0.999};
  std::string pdf_abscissa = "plain";  // or "shifted": fit against sqrt(x (1+x))
  double psd_fit_lo = 0;  // 0: half a decade above the resolution floor
  double psd_fit_hi = 0;  // 0: a quarter decade below Nyquist
  double fracture_min_decades = 0.5;
};

struct ExperimentConfig {
  std::string model;
  std::string out;  // default output directory; the CLI flag overrides it
  TwoStateParams two_state{};
  GeneralThreeStateParams general3{};
  ThreeStateParams market{};
  double eps1 = 0, eps2 = 0;  // asymptotic two-state
  double sde_alpha = 0;
  double eta = 0, lambda = 0;  // general class
  RunSection run;
  IntegratorSection integrator;
  AnalysisSection analysis;

  bool is_jump() const;
  bool is_sde() const;
  bool is_market() const;  // trajectory maps to price and returns
  void validate() const;
};

// Known model identifiers, in documentation order.
const std::vector<std::string>& model_ids();

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_json_file(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& c);  // effective config

// FNV-1a over the canonical serialization of the model parameters; stable
// across runs and platforms, used to stamp outputs.
std::string params_digest(const ExperimentConfig& c);

}  // namespace herdlab
