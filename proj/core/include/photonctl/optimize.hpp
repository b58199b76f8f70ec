#pragma once

// Maximization of P_1 / P_2 over drive parameters: square pulses via the
// exact closed forms, swept-detuning (RAF) drives via the gf engine, plus
// the transcendental extremum equation for strong-field P_1.

#include <cstdint>
#include <utility>
#include <vector>

namespace photonctl {

enum class Objective { kP1, kP2 };

struct OptResult {
  std::vector<double> argmax;   // parameter vector, matching the operation
  double value = 0.0;           // objective at argmax
  std::uint64_t iterations = 0; // objective evaluations spent
  std::vector<double> bracket;  // final uncertainty half-width per parameter
  bool certified = false;       // argmax beat all probe points at +-bracket
};

// Best square-pulse duration at fixed omega. Coarse grid (>= 400 points,
// logarithmic above T=10, densified to >= 20 points per Rabi period) plus
// golden-section refinement of every near-optimal local maximum down to a
// 1e-6 bracket. Ties resolve to the smallest T. t_range must lie in (0,2000].
OptResult maximize_over_t(Objective obj, double omega,
                          std::pair<double, double> t_range);

// Global (omega, T) maximum: >= 200-point omega scan of maximize_over_t
// followed by coordinate-descent refinement to 1e-6 in both coordinates.
OptResult maximize_global(Objective obj, std::pair<double, double> omega_range,
                          std::pair<double, double> t_range);

struct RafOptOptions {
  int omega_points = 25;
  int delta_points = 37;
  double refine_tol = 1e-4;
  // Engine knobs for the many hierarchy propagations an optimization needs;
  // looser than the gf defaults but far tighter than the optimum's width.
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double step_cap_scale = 0.5;
  int n_max = 3;
};

// Best (omega, delta_rf) for the swept-detuning drive at fixed angular sweep
// rate nu_rf, default window and phase. Degenerate ranges (lo == hi) pin the
// parameter.
OptResult maximize_raf(Objective obj, std::pair<double, double> omega_range,
                       std::pair<double, double> delta_rf_range, double nu_rf,
                       const RafOptOptions& opt = {});

// n-th positive root of the strong-field extremum condition
// -2T + (2+T)cos(wT) + 2(4+T) w sin(wT) = 0, isolated by bracketing
// bisection around n*pi/omega and polished to machine precision.
// Throws NumericError when no sign change exists in the bracket.
double solve_p1_extremum(double omega, int root_index);

// Maximum of the 2pi-pulse envelope of strong-field P_2,
// e^{-T/2} T (5T+24)/64; the analytic argmax is T = 2(sqrt(61)-1)/5.
OptResult maximize_p2_envelope_two_pi(std::pair<double, double> t_range = {
                                          1e-3, 50.0});

// Discrete maximum of exact P_2 over 2pi pulses T = 2 pi n / omega within
// t_range; certificate checks the neighboring pulse orders.
OptResult maximize_p2_two_pi(double omega,
                             std::pair<double, double> t_range = {1e-3, 50.0});

}  // namespace photonctl
