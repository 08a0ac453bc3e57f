// Command line front end.  Subcommands wrap the drivers in
// herdlab/experiments.hpp; all heavy lifting lives in the library.

#include <CLI11.hpp>

#include "herdlab/config.hpp"
#include "herdlab/experiments.hpp"
#include "herdlab/parallel.hpp"
#include "herdlab/version.hpp"

#include <cstdio>
#include <exception>
#include <string>

namespace {

void print_checks(const herdlab::ValidateReport& rep) {
  for (const auto& c : rep.checks) {
    std::printf("[%s] %-45s %s = %.6g (%s %.6g)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.metric.c_str(), c.value, c.larger_is_worse ? "<=" : ">=", c.threshold);
    if (!c.pass && !c.detail.empty()) std::printf("       %s\n", c.detail.c_str());
  }
  std::printf("%s\n", rep.all_pass ? "all checks passed" : "CHECKS FAILED");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"herding model simulation and analysis toolkit"};
  app.set_version_flag("--version", std::string(herdlab::kVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir, level = "quick", inject_fault;
  std::uint64_t seed = 0;
  bool seed_set = false, ensemble_set = false;
  std::size_t ensemble = 0;
  int jobs = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* c = cmd->add_option("--config", config_path, "JSON experiment config");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override base seed")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--ensemble", ensemble, "override ensemble size")
        ->each([&](const std::string&) { ensemble_set = true; });
    cmd->add_option("--jobs", jobs, "worker threads (0 = HERDLAB_JOBS or hardware)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "run trajectories and write them out");
  add_common(sim, true);

  CLI::App* ana = app.add_subcommand("analyze", "simulate, then estimate density and spectrum");
  add_common(ana, true);

  CLI::App* fig1 = app.add_subcommand(
      "reproduce-fig1", "two-state sweep: tail exponents and spectral slopes vs theory");
  add_common(fig1, false);

  CLI::App* fig3 = app.add_subcommand(
      "reproduce-fig3", "market model: return tail and two-slope spectrum");
  add_common(fig3, false);

  CLI::App* val = app.add_subcommand("validate", "run the internal consistency checks");
  add_common(val, false);
  val->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  val->add_option("--inject-fault", inject_fault, "perturb a rate function (testing only)")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim || *ana) {
      herdlab::ExperimentConfig cfg = herdlab::config_from_json_file(config_path);
      if (seed_set) cfg.run.seed = seed;
      if (ensemble_set) cfg.run.ensemble = ensemble;
      if (out_dir.empty()) out_dir = cfg.out.empty() ? "out" : cfg.out;
      if (*sim) {
        herdlab::SimulateResult r = herdlab::run_simulate(cfg, out_dir, jobs);
        std::printf("wrote %zu trajectories and %s\n", r.files.size(), r.manifest_path.c_str());
      } else {
        herdlab::AnalyzeResult r = herdlab::run_analyze(cfg, out_dir, jobs);
        std::printf("tail exponent %.4f (stderr %.4f), spectral slope %.4f\n",
                    r.tail_fit.exponent, r.tail_fit.stderr_, r.psd_fit.exponent);
        if (r.fractured)
          std::printf("fractured spectrum: beta1=%.4f beta2=%.4f f_break=%.6g\n",
                      r.fractured->low.exponent, r.fractured->high.exponent,
                      r.fractured->f_break);
        std::printf("outputs in %s\n", out_dir.c_str());
      }
    } else if (*fig1) {
      herdlab::Fig1Options o;
      o.out_dir = out_dir.empty() ? "fig1_out" : out_dir;
      if (seed_set) o.seed = seed;
      o.jobs = jobs;
      std::vector<herdlab::Fig1PointResult> rows = herdlab::run_reproduce_fig1(o);
      std::printf("%6s %14s %14s %12s %12s\n", "eps2", "lambda_hat", "lambda_theory", "beta_hat",
                  "beta_theory");
      for (const auto& r : rows)
        std::printf("%6g %14.4f %14.4f %12.4f %12.4f\n", r.eps2, r.lambda_hat, r.lambda_theory,
                    r.beta_hat, r.beta_theory);
      std::printf("outputs in %s\n", o.out_dir.c_str());
    } else if (*fig3) {
      herdlab::Fig3Options o;
      o.out_dir = out_dir.empty() ? "fig3_out" : out_dir;
      if (seed_set) o.seed = seed;
      o.jobs = jobs;
      herdlab::Fig3Result r = herdlab::run_reproduce_fig3(o);
      std::printf("return tail exponent %.4f (hill %.4f)\n", r.lambda_hat, r.lambda_hat_hill);
      std::printf("spectrum: beta1=%.4f beta2=%.4f f_break=%.6g improvement=%.1f%%\n",
                  r.fracture.low.exponent, r.fracture.high.exponent, r.fracture.f_break,
                  100 * r.improvement);
      std::printf("sensitivity over return window:\n");
      for (const auto& s : r.sensitivity)
        std::printf("  T=%-6g lambda=%.4f beta1=%.4f beta2=%.4f f_break=%.6g\n", s.window_T,
                    s.lambda_hat, s.beta1, s.beta2, s.f_break);
      std::printf("outputs in %s\n", o.out_dir.c_str());
    } else if (*val) {
      herdlab::ValidateOptions o;
      o.level = level;
      o.out_dir = out_dir.empty() ? "validate_out" : out_dir;
      o.jobs = jobs;
      if (seed_set) o.seed = seed;
      o.inject_fault = inject_fault;
      herdlab::ValidateReport rep = herdlab::run_validate(o);
      print_checks(rep);
      return rep.all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
