// Times the parallel kernels against their serial reference on sized-up
// inputs.  Wall-clock only; correctness of the pairs is covered by the test
// suite, which requires bit-identical results.

#include "herdlab/ensemble.hpp"
#include "herdlab/jump.hpp"
#include "herdlab/oracle.hpp"
#include "herdlab/parallel.hpp"
#include "herdlab/rng.hpp"
#include "herdlab/spectral.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

namespace {

using clock_type = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f, int repeats) {
  auto t0 = clock_type::now();
  for (int i = 0; i < repeats; ++i) f();
  auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int jobs = 0;
  if (argc > 1) jobs = std::stoi(argv[1]);
  std::printf("worker threads: %d (0 = library default)\n\n", jobs);

  herdlab::Rng rng(12345);

  {
    std::vector<double> signal(1 << 21);
    for (auto& v : signal) v = rng.normal();
    herdlab::PsdOptions o;
    o.segment_len = 1 << 13;
    o.jobs = jobs;
    double s = time_ms([&] { herdlab::welch_psd_serial(signal, 1.0, o); }, 3);
    double p = time_ms([&] { herdlab::welch_psd(signal, 1.0, o); }, 3);
    report("welch_psd", s, p);
  }

  {
    std::vector<double> samples(1 << 23);
    for (auto& v : samples) v = std::exp(3.0 * rng.normal());
    double s = time_ms([&] { herdlab::empirical_pdf_serial(samples, 1e-4, 1e4, 320); }, 3);
    double p = time_ms([&] { herdlab::empirical_pdf(samples, 1e-4, 1e4, 320, jobs); }, 3);
    report("empirical_pdf", s, p);
  }

  {
    herdlab::ThreeStateParams mp;
    mp.eps_cf = 3;
    mp.eps_fc = 3;
    mp.eps_cc = 3;
    mp.H = 100;
    mp.alpha = 0;
    mp.N = 120;
    herdlab::GeneratorMatrix g = herdlab::three_state_financial_generator(mp);
    std::vector<double> in(g.size(), 1.0 / double(g.size())), out(g.size());
    double s = time_ms([&] { herdlab::apply_generator_transpose_serial(g, in, out); }, 50);
    double p = time_ms([&] { herdlab::apply_generator_transpose(g, in, out, jobs); }, 50);
    report("generator matvec", s, p);
  }

  {
    herdlab::TwoStateParams p2;
    p2.sigma1 = 1.2;
    p2.sigma2 = 0.8;
    p2.h = 1.0;
    p2.N = 100;
    auto member = [&](std::size_t, std::uint64_t seed) {
      herdlab::JumpOptions o;
      o.t_end = 200;
      o.sample_dt = 0.1;
      o.seed = seed;
      return herdlab::simulate_two_state(p2, herdlab::default_two_state_x0(p2), o).event_count;
    };
    double s = time_ms([&] { herdlab::run_ensemble_serial<std::uint64_t>(8, 1, member); }, 3);
    double p = time_ms([&] { herdlab::run_ensemble<std::uint64_t>(8, 1, jobs, member); }, 3);
    report("ensemble of jump runs", s, p);
  }

  return 0;
}
