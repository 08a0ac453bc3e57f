#pragma once

#include "herdlab/params.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace herdlab {

// Exact continuous-time generator of a finite-state model, kept in both
// outgoing (rows) and incoming (cols) adjacency so row sums and transpose
// products are cheap.  Off-diagonal entries only; the diagonal is -exit_rate.
struct GeneratorMatrix {
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows;  // i -> (j, q_ij)
  std::vector<std::vector<std::pair<std::int32_t, double>>> cols;  // j <- (i, q_ij)
  std::vector<double> exit_rate;

  std::size_t size() const { return rows.size(); }
  void finalize();  // rebuilds cols from rows
};

// Lexicographic enumeration of {(x0, x1, x2) : xi >= 0, sum = N}, ordered by
// (x0, x1).  Used as the state index of the three-group generators.
struct SimplexIndex {
  std::int64_t N = 0;

  explicit SimplexIndex(std::int64_t n) : N(n) {}
  std::size_t size() const { return std::size_t((N + 1) * (N + 2) / 2); }
  std::size_t index(std::int64_t x0, std::int64_t x1) const;
  PopulationState state(std::size_t idx) const;
};

GeneratorMatrix two_state_generator(const TwoStateParams& p);
GeneratorMatrix three_state_generator(const GeneralThreeStateParams& p);
GeneratorMatrix three_state_financial_generator(const ThreeStateParams& p);

// Stationary distribution of the two-state chain from the detailed-balance
// recursion pi(x+1)/pi(x) = up(x)/down(x+1), accumulated in log space.
// Independent of the generator-matrix machinery.
std::vector<double> stationary_birth_death(const TwoStateParams& p);

// Strong connectivity of the transition graph.
bool is_irreducible(const GeneratorMatrix& g);

// Solves pi Q = 0, sum pi = 1 by a sparse LU factorization.  Requires an
// irreducible generator; tiny negative entries from round-off are clipped.
std::vector<double> stationary_distribution(const GeneratorMatrix& g);

// out = Q^T in, the master-equation right-hand side d p/dt for column vector p.
void apply_generator_transpose(const GeneratorMatrix& g, const std::vector<double>& in,
                               std::vector<double>& out, int jobs = 0);
void apply_generator_transpose_serial(const GeneratorMatrix& g, const std::vector<double>& in,
                                      std::vector<double>& out);

// Evolves p0 forward by time t with the uniformization method.  The Poisson
// weights are built outward from the mode and renormalized, so the result is
// a probability vector to round-off.
std::vector<double> master_evolve(const GeneratorMatrix& g, std::vector<double> p0, double t,
                                  int jobs = 0);

// Distribution of the chartist mood (x2 - x1)/(x1 + x2) induced by a
// three-group distribution.  States with no chartists carry no mood; their
// probability is reported separately.
struct XiMarginal {
  std::vector<double> atoms;
  std::vector<double> weights;
  double dropped_mass = 0;
};

XiMarginal xi_marginal(const std::vector<double>& dist, std::int64_t N);

// Count distribution of one group under a three-group distribution.
std::vector<double> group_marginal(const std::vector<double>& dist, std::int64_t N, int group);

// Stationary density of dx = a(x) dt + b(x) dW reflected into [lo, hi]:
//   p(x) proportional to exp(Phi(x)) / b(x)^2,  Phi(x) = int 2 a / b^2.
// Evaluated by trapezoid quadrature on a log-spaced grid (lo > 0 required).
struct DensityOnGrid {
  std::vector<double> x;
  std::vector<double> pdf;
};

DensityOnGrid fp_stationary_density(const std::function<double(double)>& drift,
                                    const std::function<double(double)>& diff, double lo,
                                    double hi, std::size_t n);

// int_a^b pdf dx by trapezoid restricted to the grid.
double density_mass(const DensityOnGrid& d, double a, double b);

}  // namespace herdlab
