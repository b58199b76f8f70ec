#pragma once

// Exact square-pulse photon statistics for a driven two-level emitter
// (Gamma = 1 units): P_0, P_1, P_2, <N>, <N(N-1)>, Mandel Q, together with
// the strong-field / semiclassical / short-pulse limit laws.

#include <complex>
#include <utility>

namespace photonctl {

// Carries the auxiliary roots y = sqrt(1-4 Omega^2), x = sqrt(1-16 Omega^2)
// that appear throughout the exact formulas. Both become imaginary in the
// underdamped regime; all observables are even in them and hence real.
struct SquarePulseContext {
  double omega = 0.0;
  double big_t = 0.0;
  double eta = 1.0;  // y_aux^2 = 1 - 4 omega^2
  double xi = 1.0;   // x_aux^2 = 1 - 16 omega^2
  std::complex<double> y_aux{1.0, 0.0};
  std::complex<double> x_aux{1.0, 0.0};

  // Throws ConfigError unless omega >= 0 and big_t >= 0 (both finite).
  static SquarePulseContext make(double omega, double big_t);
};

namespace detail {

struct CfValue {
  double value = 0.0;
  double imag_residue = 0.0;  // |Im| of the complex evaluation; 0 on the
                              // series path near the removable singularities
};

CfValue cf_pn_full(const SquarePulseContext& ctx, int n);
CfValue cf_mean_full(const SquarePulseContext& ctx);
CfValue cf_fac2_full(const SquarePulseContext& ctx);

}  // namespace detail

// Exact emission probabilities P_n (n = 0, 1, 2) after a square pulse of
// Rabi frequency omega and duration big_t, measured over a long window.
// Throws NumericError if the imaginary residue exceeds 1e-8.
double cf_pn(const SquarePulseContext& ctx, int n);

// Exact first factorial moments <N> and <N(N-1)> of the photon count.
double cf_mean_n(const SquarePulseContext& ctx);
double cf_fac2(const SquarePulseContext& ctx);

// Mandel Q = (<N(N-1)> - <N>^2) / <N>. Returns NaN when <N> < 1e-12.
double cf_q(const SquarePulseContext& ctx);

// Strong-field (omega >> 1) asymptotics of P_0, P_1, P_2.
double strong_field_pn(double omega, double big_t, int n);

// Upper envelopes of the strong-field oscillations:
// P_1 <= (8+3T) e^{-T/2} / 8,  P_2 <= T (5T+24) e^{-T/2} / 64.
std::pair<double, double> p1_p2_upper_bounds(double big_t);

// Short strong pulse at fixed pulse area: P_1 = sin^2(omega*T/2), P_0 = 1-P_1.
double pi_pulse_p1(double omega_t_product);

// Residual of the transcendental extremum condition for P_1 in the
// strong-field expression: -2T + (2+T)cos(wT) + 2(4+T) w sin(wT).
double p1_extremum_residual(double omega, double big_t);

// Finite-omega correction to the ideal pi pulse:
// P_1^Max ~ e^{-pi/(2 omega)} (1 + 3 pi / (8 omega)).
double p1max_strong_asymptote(double omega);

// Semiclassical (weak-field, long-time) Poisson law with rate omega^2 T.
double poisson_pn(double omega, double big_t, int n);

// Leading short-time behavior of the two-photon probability: omega^4 T^5/480.
double p2_short_time(double omega, double big_t);

// Long-time Mandel Q: -6 omega^2 / (1 + 2 omega^2)^2.
double q_longtime(double omega);

// Strong-field Mandel Q at finite T.
double q_strongfield(double omega, double big_t);

// Short strong pulse limit of Q: -sin^2(wT/2) generically, 6/7 exactly on
// the 2*pi*n resonance set (selected by the flag).
double q_shortpulse_limit(double omega_t_product, bool on_resonance_2pin);

}  // namespace photonctl
