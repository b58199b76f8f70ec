#pragma once

#include <variant>
#include <vector>

namespace photonctl {

// Resonant rectangular drive: Rabi frequency omega for 0 <= t < duration,
// zero afterwards, zero detuning throughout.
struct SquarePulse {
  double omega = 0.0;
  double duration = 0.0;
};

// Constant-amplitude drive with a sinusoidally swept detuning
//   delta(t) = (delta_rf / 2) * cos(2*pi*nu_rf*t + phase).
// nu_rf is a cyclic frequency; window is the photon-counting horizon.
struct RafDrive {
  double omega = 0.0;
  double delta_rf = 0.0;
  double nu_rf = 0.0;
  double phase = 0.0;
  double window = 0.0;
};

// Sampled (omega, delta) table with linear interpolation between samples and
// zero field outside the sampled range. Sample times must strictly increase.
struct PiecewiseSample {
  double t = 0.0;
  double omega = 0.0;
  double delta = 0.0;
};

struct PiecewiseField {
  std::vector<PiecewiseSample> samples;
};

using ControlField = std::variant<SquarePulse, RafDrive, PiecewiseField>;

struct FieldValue {
  double omega = 0.0;
  double delta = 0.0;
};

// Instantaneous field. Pure in its inputs; t may be any real value.
FieldValue field_at(const ControlField& field, double t);

// Throws ConfigError when a field violates its parameter invariants
// (negative amplitudes, non-positive window, non-increasing sample times...).
void validate(const ControlField& field);

// End of drive support: beyond this time a square pulse and a piecewise table
// are identically zero; for a RAF drive this is the counting window.
double support_end(const ControlField& field);

// Times where the field is discontinuous or non-smooth. Integrators split
// integration intervals at these points.
std::vector<double> breakpoints(const ControlField& field);

// max(sup|omega|, sup|delta|, 1): the fastest angular scale of the drive,
// used for step-size caps.
double rate_scale(const ControlField& field);

// Smallest spacing between piecewise samples (infinity for other variants);
// adaptive steps are additionally capped by this spacing.
double min_sample_spacing(const ControlField& field);

}  // namespace photonctl
