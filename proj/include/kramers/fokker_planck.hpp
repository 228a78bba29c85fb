#pragma once

#include <cstddef>
#include <vector>

#include "kramers/potential.hpp"
#include "kramers/semiclassical.hpp"

namespace kramers {

enum class RightBoundary { absorbing, reflecting };

// Cell-centred density on [x_left, x_right]; cell i has centre
// x_left + (i + 1/2) dx. The left edge is always reflecting.
struct GridDensity {
  double x_left = 0.0;
  double x_right = 1.0;
  std::size_t n_cells = 0;
  double dx = 0.0;
  std::vector<double> values;
  RightBoundary right = RightBoundary::absorbing;

  double centre(std::size_t i) const { return x_left + (static_cast<double>(i) + 0.5) * dx; }
  double mass() const;  // sum P_i dx
};

// dP/dt = L P with L tridiagonal: (L P)_i = lower_i P_{i-1} + diag_i P_i + upper_i P_{i+1}.
struct TransitionOperator {
  double x_left = 0.0;
  double x_right = 1.0;
  std::size_t n_cells = 0;
  double dx = 0.0;
  RightBoundary right = RightBoundary::absorbing;
  std::vector<double> lower;  // lower[0] unused
  std::vector<double> diag;
  std::vector<double> upper;  // upper[n-1] unused

  std::vector<double> apply(const std::vector<double>& p) const;
  // Sum over rows of column j: the rate of mass change carried by P_j.
  std::vector<double> column_sums() const;
};

// Exponentially fitted (Scharfetter-Gummel / Chang-Cooper) fluxes
//   F_{i+1/2} = (D/dx) [B(-z) P_i - B(z) P_{i+1}],  z = beta (V_i - V_{i+1}),
// B(z) = z / (e^z - 1), which vanish exactly on P ~ exp(-beta V). Zero flux
// at reflecting edges; the absorbing edge pins P = 0 on the boundary face.
TransitionOperator discretize(const Potential& v, const PhysParams& params, double x_left,
                              double x_right, std::size_t n_cells,
                              RightBoundary right = RightBoundary::absorbing);

GridDensity make_density(const TransitionOperator& op, std::vector<double> values);

// Boltzmann density exp(-beta V) restricted to x < x_cut, unit mass.
GridDensity boltzmann_density(const TransitionOperator& op, const Potential& v, double beta,
                              double x_cut);

struct SurvivalSeries {
  std::vector<double> t;
  std::vector<double> S;
};

struct EvolveResult {
  GridDensity density;
  SurvivalSeries survival;  // includes t = 0
};

// Backward Euler: (I - dt L) P^{n+1} = P^n, one Thomas solve per step.
EvolveResult evolve(const TransitionOperator& op, const GridDensity& initial, double dt,
                    std::size_t steps);

struct FitWindow {
  double upper = 0.95;  // start once S drops below this
  double lower = 0.05;  // stop once S drops below this
};

struct DecayFit {
  double rate = 0.0;
  double residual = 0.0;  // rms residual of ln S about the fit
  std::size_t points = 0;
};

// Least-squares slope of ln S(t) over the window. Throws ExtractionError if
// fewer than 3 points lie inside it.
DecayFit decay_rate(const SurvivalSeries& series, FitWindow window = {});

}  // namespace kramers
