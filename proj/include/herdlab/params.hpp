#pragma once

#include <array>
#include <cstdint>

namespace herdlab {

// Agent counts.  Three-state models use all of counts[0..2]; two-state models
// use counts[0] = X (the tracked, herding-prone group) and counts[1] = N - X.
// For the market specialization the groups are, in order:
//   0 fundamentalists, 1 pessimistic chartists, 2 optimistic chartists.
struct PopulationState {
  std::array<std::int64_t, 3> counts{0, 0, 0};
  std::int64_t n = 0;

  static PopulationState two_state(std::int64_t x, std::int64_t n);
  static PopulationState three_state(std::int64_t x0, std::int64_t x1, std::int64_t x2);

  bool valid() const;
  double frac(int i) const { return double(counts[std::size_t(i)]) / double(n); }
  std::int64_t chartists() const { return counts[1] + counts[2]; }
};

struct TwoStateParams {
  double sigma1 = 0;  // spontaneous entry rate into the tracked group
  double sigma2 = 0;  // spontaneous exit rate out of it
  double h = 0;       // pairwise herding rate
  std::int64_t N = 0;
  double alpha = 0;       // feedback exponent; only used when feedback is on
  bool feedback = false;  // state-dependent rate modulation on/off

  void validate() const;  // throws std::invalid_argument
};

// Fully general three-group switching system.  sigma[j][i] is the individual
// j->i rate; hmat[j][i] the herding j->i rate and must be symmetric.
struct GeneralThreeStateParams {
  std::array<std::array<double, 3>, 3> sigma{};
  std::array<std::array<double, 3>, 3> hmat{};
  std::int64_t N = 0;

  void validate() const;
};

// Market specialization with one fundamentalist and two chartist groups.
// Rates are carried in reduced form: eps_cf = sigma_cf/h1, eps_fc = sigma_fc/h1,
// eps_cc = sigma_cc/(H*h1); H amplifies chartist<->chartist switching.
struct ThreeStateParams {
  double eps_cf = 0;
  double eps_fc = 0;
  double eps_cc = 0;
  double H = 1;
  double h1 = 1;
  double alpha = 0;  // feedback exponent
  double r0 = 1;     // price scale
  std::int64_t N = 0;

  double sigma_cf() const { return eps_cf * h1; }
  double sigma_fc() const { return eps_fc * h1; }
  double sigma_cc() const { return eps_cc * H * h1; }

  // Expansion into the general system: chartist->fundamentalist at sigma_cf
  // from either chartist group, fundamentalist->chartist at sigma_fc/2 into
  // each, chartist<->chartist at sigma_cc; herding rates h1 between the
  // fundamentalist group and each chartist group, H*h1 between chartists.
  GeneralThreeStateParams general() const;

  void validate() const;
};

// Balance point of the spontaneous rates, rounded to the lattice.
std::int64_t default_two_state_x0(const TwoStateParams& p);

// Equal split, remainder assigned to fundamentalists.
PopulationState default_three_state_x0(std::int64_t N);

}  // namespace herdlab
