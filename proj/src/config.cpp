#include "herdlab/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

using nlohmann::json;

namespace herdlab {

namespace {

const std::vector<std::string> kModelIds = {
    "jump-two-state",
    "jump-two-state-fixed",
    "jump-three-state",
    "jump-three-state-financial",
    "jump-three-state-financial-fixed",
    "sde-two-state-full",
    "sde-two-state-asymptotic",
    "sde-general-class",
    "sde-three-state-fp",
    "sde-three-state-transformed",
};

void check_keys(const json& j, const char* section, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end())
      throw std::invalid_argument(std::string("config: unknown key '") + key + "' in " + section);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void read_params(const json& j, ExperimentConfig& c) {
  const std::string& m = c.model;
  if (m == "jump-two-state" || m == "jump-two-state-fixed" || m == "sde-two-state-full") {
    check_keys(j, "params", {"sigma1", "sigma2", "h", "N", "alpha", "feedback"});
    read(j, "sigma1", c.two_state.sigma1);
    read(j, "sigma2", c.two_state.sigma2);
    read(j, "h", c.two_state.h);
    read(j, "N", c.two_state.N);
    read(j, "alpha", c.two_state.alpha);
    read(j, "feedback", c.two_state.feedback);
  } else if (m == "jump-three-state") {
    check_keys(j, "params", {"sigma", "h", "N"});
    read(j, "sigma", c.general3.sigma);
    read(j, "h", c.general3.hmat);
    read(j, "N", c.general3.N);
  } else if (m == "jump-three-state-financial" || m == "jump-three-state-financial-fixed" ||
             m == "sde-three-state-fp" || m == "sde-three-state-transformed") {
    check_keys(j, "params", {"eps_cf", "eps_fc", "eps_cc", "H", "h1", "alpha", "r0", "N"});
    read(j, "eps_cf", c.market.eps_cf);
    read(j, "eps_fc", c.market.eps_fc);
    read(j, "eps_cc", c.market.eps_cc);
    read(j, "H", c.market.H);
    read(j, "h1", c.market.h1);
    read(j, "alpha", c.market.alpha);
    read(j, "r0", c.market.r0);
    read(j, "N", c.market.N);
  } else if (m == "sde-two-state-asymptotic") {
    check_keys(j, "params", {"eps1", "eps2", "alpha"});
    read(j, "eps1", c.eps1);
    read(j, "eps2", c.eps2);
    read(j, "alpha", c.sde_alpha);
  } else if (m == "sde-general-class") {
    check_keys(j, "params", {"eta", "lambda"});
    read(j, "eta", c.eta);
    read(j, "lambda", c.lambda);
  }
}

json params_to_json(const ExperimentConfig& c) {
  json j = json::object();
  const std::string& m = c.model;
  if (m == "jump-two-state" || m == "jump-two-state-fixed" || m == "sde-two-state-full") {
    j["sigma1"] = c.two_state.sigma1;
    j["sigma2"] = c.two_state.sigma2;
    j["h"] = c.two_state.h;
    j["N"] = c.two_state.N;
    j["alpha"] = c.two_state.alpha;
    j["feedback"] = c.two_state.feedback;
  } else if (m == "jump-three-state") {
    j["sigma"] = c.general3.sigma;
    j["h"] = c.general3.hmat;
    j["N"] = c.general3.N;
  } else if (m == "jump-three-state-financial" || m == "jump-three-state-financial-fixed" ||
             m == "sde-three-state-fp" || m == "sde-three-state-transformed") {
    j["eps_cf"] = c.market.eps_cf;
    j["eps_fc"] = c.market.eps_fc;
    j["eps_cc"] = c.market.eps_cc;
    j["H"] = c.market.H;
    j["h1"] = c.market.h1;
    j["alpha"] = c.market.alpha;
    j["r0"] = c.market.r0;
    j["N"] = c.market.N;
  } else if (m == "sde-two-state-asymptotic") {
    j["eps1"] = c.eps1;
    j["eps2"] = c.eps2;
    j["alpha"] = c.sde_alpha;
  } else if (m == "sde-general-class") {
    j["eta"] = c.eta;
    j["lambda"] = c.lambda;
  }
  return j;
}

}  // namespace

bool ExperimentConfig::is_jump() const { return model.rfind("jump-", 0) == 0; }
bool ExperimentConfig::is_sde() const { return model.rfind("sde-", 0) == 0; }

bool ExperimentConfig::is_market() const {
  return model == "jump-three-state-financial" || model == "jump-three-state-financial-fixed" ||
         model == "sde-three-state-transformed";
}

void ExperimentConfig::validate() const {
  if (std::find(kModelIds.begin(), kModelIds.end(), model) == kModelIds.end())
    throw std::invalid_argument("config: unknown model '" + model + "'");
  if (model == "jump-two-state" || model == "jump-two-state-fixed" ||
      model == "sde-two-state-full")
    two_state.validate();
  else if (model == "jump-three-state")
    general3.validate();
  else if (model != "sde-two-state-asymptotic" && model != "sde-general-class")
    market.validate();
  if (model == "sde-two-state-asymptotic" && (!(eps1 > 0) || !(eps2 > 0) || sde_alpha < 0))
    throw std::invalid_argument("config: need eps1, eps2 > 0 and alpha >= 0");
  if (!(run.t_end > 0) || !(run.sample_dt > 0))
    throw std::invalid_argument("config: t_end and sample_dt must be > 0");
  if (run.ensemble == 0) throw std::invalid_argument("config: ensemble must be >= 1");
  if (run.burn_in_frac < 0 || run.burn_in_frac >= 1)
    throw std::invalid_argument("config: burn_in_frac outside [0, 1)");
  if (model == "jump-two-state-fixed" || model == "jump-three-state-financial-fixed")
    if (!(run.step_dt > 0)) throw std::invalid_argument("config: fixed-dt model needs run.step_dt");
  if (analysis.pdf_abscissa != "plain" && analysis.pdf_abscissa != "shifted")
    throw std::invalid_argument("config: pdf_abscissa must be 'plain' or 'shifted'");
}

const std::vector<std::string>& model_ids() { return kModelIds; }

ExperimentConfig config_from_json_text(const std::string& text) {
  json j = json::parse(text);
  check_keys(j, "top level", {"model", "out", "params", "run", "integrator", "analysis"});
  ExperimentConfig c;
  if (!j.contains("model")) throw std::invalid_argument("config: missing 'model'");
  c.model = j["model"].get<std::string>();
  read(j, "out", c.out);
  if (j.contains("params")) read_params(j["params"], c);
  if (j.contains("run")) {
    const json& r = j["run"];
    check_keys(r, "run",
               {"t_end", "sample_dt", "seed", "ensemble", "burn_in_frac", "step_dt", "x0"});
    read(r, "t_end", c.run.t_end);
    read(r, "sample_dt", c.run.sample_dt);
    read(r, "seed", c.run.seed);
    read(r, "ensemble", c.run.ensemble);
    read(r, "burn_in_frac", c.run.burn_in_frac);
    read(r, "step_dt", c.run.step_dt);
    read(r, "x0", c.run.x0);
  }
  if (j.contains("integrator")) {
    const json& r = j["integrator"];
    check_keys(r, "integrator", {"kappa", "max_dt", "min_dt", "boundary"});
    read(r, "kappa", c.integrator.kappa);
    read(r, "max_dt", c.integrator.max_dt);
    read(r, "min_dt", c.integrator.min_dt);
    read(r, "boundary", c.integrator.boundary);
  }
  if (j.contains("analysis")) {
    const json& r = j["analysis"];
    check_keys(r, "analysis",
               {"window_T", "psd_segment", "psd_overlap", "pdf_bins_per_decade", "pdf_lo",
                "pdf_hi", "pdf_fit_lo", "pdf_fit_hi", "pdf_fit_percentiles", "pdf_abscissa",
                "psd_fit_lo", "psd_fit_hi", "fracture_min_decades"});
    read(r, "window_T", c.analysis.window_T);
    read(r, "psd_segment", c.analysis.psd_segment);
    read(r, "psd_overlap", c.analysis.psd_overlap);
    read(r, "pdf_bins_per_decade", c.analysis.pdf_bins_per_decade);
    read(r, "pdf_lo", c.analysis.pdf_lo);
    read(r, "pdf_hi", c.analysis.pdf_hi);
    read(r, "pdf_fit_lo", c.analysis.pdf_fit_lo);
    read(r, "pdf_fit_hi", c.analysis.pdf_fit_hi);
    read(r, "pdf_fit_percentiles", c.analysis.pdf_fit_percentiles);
    read(r, "pdf_abscissa", c.analysis.pdf_abscissa);
    read(r, "psd_fit_lo", c.analysis.psd_fit_lo);
    read(r, "psd_fit_hi", c.analysis.psd_fit_hi);
    read(r, "fracture_min_decades", c.analysis.fracture_min_decades);
  }
  c.validate();
  return c;
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json j;
  j["model"] = c.model;
  if (!c.out.empty()) j["out"] = c.out;
  j["params"] = params_to_json(c);
  j["run"] = {{"t_end", c.run.t_end},
              {"sample_dt", c.run.sample_dt},
              {"seed", c.run.seed},
              {"ensemble", c.run.ensemble},
              {"burn_in_frac", c.run.burn_in_frac}};
  if (c.run.step_dt > 0) j["run"]["step_dt"] = c.run.step_dt;
  if (!c.run.x0.empty()) j["run"]["x0"] = c.run.x0;
  j["integrator"] = {{"kappa", c.integrator.kappa},
                     {"max_dt", c.integrator.max_dt},
                     {"min_dt", c.integrator.min_dt}};
  if (!c.integrator.boundary.empty()) j["integrator"]["boundary"] = c.integrator.boundary;
  j["analysis"] = {{"window_T", c.analysis.window_T},
                   {"psd_segment", c.analysis.psd_segment},
                   {"psd_overlap", c.analysis.psd_overlap},
                   {"pdf_bins_per_decade", c.analysis.pdf_bins_per_decade},
                   {"pdf_lo", c.analysis.pdf_lo},
                   {"pdf_hi", c.analysis.pdf_hi},
                   {"pdf_fit_lo", c.analysis.pdf_fit_lo},
                   {"pdf_fit_hi", c.analysis.pdf_fit_hi},
                   {"pdf_fit_percentiles", c.analysis.pdf_fit_percentiles},
                   {"pdf_abscissa", c.analysis.pdf_abscissa},
                   {"psd_fit_lo", c.analysis.psd_fit_lo},
                   {"psd_fit_hi", c.analysis.psd_fit_hi},
                   {"fracture_min_decades", c.analysis.fracture_min_decades}};
  return j.dump(2) + "\n";
}

std::string params_digest(const ExperimentConfig& c) {
  std::string canon = c.model + "|" + params_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace herdlab
