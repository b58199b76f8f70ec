#pragma once

// Embedded Dormand-Prince 5(4) integrator. Header-only and generic over the
// state container (anything with size() and operator[] over doubles), so the
// same kernel drives the 4-variable physical block, the 4*(n_max+1)
// hierarchy, and the Monte Carlo amplitude equations.

#include <cmath>
#include <cstddef>
#include <limits>

#include "photonctl/errors.hpp"

namespace photonctl {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // Hard cap on the step size, independent of the error controller. Callers
  // set this from the fastest drive scale so oscillatory fields are resolved.
  double max_step = std::numeric_limits<double>::infinity();
  // 0 means "span / 16, clipped by max_step".
  double initial_step = 0.0;
  std::size_t max_steps = 50'000'000;
};

// One 5th/4th-order step pair from (t, y) with step h. rhs has signature
// rhs(const State&, double t, State& dydt). No step-size control here; the
// Monte Carlo sampler uses this directly to bisect jump times inside an
// accepted step.
template <class State, class Rhs>
void dopri5_pair(Rhs&& rhs, double t, double h, const State& y, State& y5, State& y4) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                          e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                          e6 = 187.0 / 2100, e7 = 1.0 / 40;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;

  const std::size_t n = y.size();
  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, tmp = y;

  rhs(y, t, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  rhs(tmp, t + c2 * h, k2);
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  rhs(tmp, t + c3 * h, k3);
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  rhs(tmp, t + c4 * h, k4);
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  rhs(tmp, t + c5 * h, k5);
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                         a64 * k4[i] + a65 * k5[i]);
  rhs(tmp, t + h, k6);
  for (std::size_t i = 0; i < n; ++i)
    y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                        b6 * k6[i]);
  rhs(y5, t + h, k7);
  for (std::size_t i = 0; i < n; ++i)
    y4[i] = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                        e6 * k6[i] + e7 * k7[i]);
}

// Hairer scaled RMS norm of the 5th/4th-order difference.
template <class State>
double ode_error_norm(const State& y, const State& y5, const State& y4,
                      double rel_tol, double abs_tol) {
  const std::size_t n = y.size();
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc =
        abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
    const double e = (y5[i] - y4[i]) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

// Advance y from t0 to t1 (t1 >= t0) with adaptive step control. Returns the
// last accepted step size, which callers feed into the next segment as
// initial_step. Throws IntegrationError when the controller underflows.
template <class State, class Rhs>
double integrate_adaptive(Rhs&& rhs, State& y, double t0, double t1,
                          const OdeOptions& opt = {}) {
  const double span = t1 - t0;
  if (!(span >= 0.0) || !std::isfinite(span))
    throw IntegrationError("integrate_adaptive: bad interval", t0, span);
  if (span == 0.0) return opt.initial_step;

  double h = opt.initial_step > 0.0 ? opt.initial_step : span / 16.0;
  h = std::min({h, opt.max_step, span});

  double t = t0;
  State y5 = y, y4 = y;
  double h_accepted = h;
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > opt.max_steps)
      throw IntegrationError("integrate_adaptive: step budget exhausted", t, h);
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(t), 1.0);
    if (h < h_min)
      throw IntegrationError("integrate_adaptive: step size underflow", t, h);

    const bool clipped = h >= t1 - t;
    const double h_try = clipped ? t1 - t : h;
    dopri5_pair(rhs, t, h_try, y, y5, y4);
    const double err = ode_error_norm(y, y5, y4, opt.rel_tol, opt.abs_tol);

    if (err <= 1.0) {
      t = clipped ? t1 : t + h_try;
      y = y5;
      h_accepted = h_try;
      const double grow =
          err <= 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h = std::min({std::max(grow, 0.2) * h_try, opt.max_step});
    } else {
      h = std::max(0.2, 0.9 * std::pow(err, -0.2)) * h_try;
    }
  }
  return h_accepted;
}

}  // namespace photonctl
