#pragma once

// Generating-function engine: propagates the generalized Bloch equations for
// the counting variable s, the exact s-Taylor hierarchy for P_N, and the
// s-derivative systems at s=1 for <N> and <N(N-1)>.

#include <optional>
#include <vector>

#include "photonctl/control_field.hpp"

namespace photonctl {

struct GfOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // Step cap = step_cap_scale / max(sup Omega, sup |delta|, 1), further
  // bounded by the piecewise sample spacing, so Rabi/sweep timescales are
  // always resolved regardless of how smooth the solution looks.
  double step_cap_scale = 0.05;
  // photon_distribution flags n_max as too small when 1 - sum P_n exceeds
  // this threshold.
  double tail_threshold = 1e-6;
};

// Scalar generating-function state (U, V, W, Y)(s, t).
struct GFState {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double y = 0.5;
  double s = 1.0;
  double t = 0.0;
};

enum class DistributionMethod { kClosedForm, kHierarchy, kMonteCarlo };

struct PhotonDistribution {
  std::vector<double> probs;           // P_0 ... P_nmax
  double tail_bound = 0.0;             // 1 - sum probs
  DistributionMethod method = DistributionMethod::kHierarchy;
  std::vector<double> ci_halfwidths;   // populated by the Monte Carlo sampler
  bool tail_alert = false;             // tail_bound > tail_threshold
};

struct Moments {
  double mean_n = 0.0;  // <N>
  double fac2 = 0.0;    // <N(N-1)>
  double q = 0.0;       // Mandel Q; NaN when mean_n < 1e-12
};

// Integrate Eq.-of-motion of (U,V,W,Y)(s,t) from the ground state up to
// t_end at fixed counting variable s in [-1,1].
GFState propagate_gf(const ControlField& field, double s, double t_end,
                     const GfOptions& opt = {});

// P_0..P_nmax from the exact Taylor-coefficient hierarchy. horizon == nullopt
// means "auto": field support plus free decay until the physical excited
// population drops below 1e-12 (capped at support + 60).
PhotonDistribution photon_distribution(const ControlField& field, int n_max,
                                       std::optional<double> horizon = {},
                                       const GfOptions& opt = {});

// <N>, <N(N-1)>, Q from the first/second s-derivative blocks at s=1.
Moments moments(const ControlField& field, std::optional<double> horizon = {},
                const GfOptions& opt = {});

// Swept-detuning (RAF) drive: delta(t) = (delta_rf/2) cos(nu_rf t + phase).
// nu_rf is the angular sweep rate of the detuning argument.
struct RafParams {
  double omega = 0.0;
  double delta_rf = 0.0;
  double nu_rf = 0.0;
  double phase = 0.0;
  // 0 selects the default counting window of half a sweep period, pi/nu_rf
  // (one resonance crossing).
  double window = 0.0;
  // When true, appends field-off free decay after the window before reading
  // out the distribution; by default the readout is at the window edge with
  // the cw field on throughout.
  bool extended = false;
};

// The equivalent ControlField (RafDrive stores a cyclic frequency, so the
// angular rate nu_rf maps onto nu_rf / 2pi).
ControlField make_raf_field(const RafParams& p);

// Characteristic counting window: p.window, or pi/nu_rf when p.window == 0.
double raf_window(const RafParams& p);

PhotonDistribution raf_distribution(const RafParams& p, int n_max,
                                    const GfOptions& opt = {});

}  // namespace photonctl
