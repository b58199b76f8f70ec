#include "photonctl/control_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "photonctl/errors.hpp"

namespace photonctl {

namespace {

bool finite(double x) { return std::isfinite(x); }

FieldValue piecewise_at(const PiecewiseField& f, double t) {
  const auto& s = f.samples;
  if (s.empty() || t < s.front().t || t > s.back().t) return {0.0, 0.0};
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double x, const PiecewiseSample& p) { return x < p.t; });
  if (it == s.begin()) return {s.front().omega, s.front().delta};
  if (it == s.end()) return {s.back().omega, s.back().delta};
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return {lo.omega + w * (hi.omega - lo.omega), lo.delta + w * (hi.delta - lo.delta)};
}

}  // namespace

FieldValue field_at(const ControlField& field, double t) {
  return std::visit(
      [t](const auto& f) -> FieldValue {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SquarePulse>) {
          if (t >= 0.0 && t < f.duration) return {f.omega, 0.0};
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, RafDrive>) {
          if (t < 0.0 || t >= f.window) return {0.0, 0.0};
          const double arg = 2.0 * std::numbers::pi * f.nu_rf * t + f.phase;
          return {f.omega, 0.5 * f.delta_rf * std::cos(arg)};
        } else {
          return piecewise_at(f, t);
        }
      },
      field);
}

void validate(const ControlField& field) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SquarePulse>) {
          if (!finite(f.omega) || f.omega < 0.0)
            throw ConfigError("square pulse: omega must be finite and >= 0");
          if (!finite(f.duration) || f.duration <= 0.0)
            throw ConfigError("square pulse: duration must be finite and > 0");
        } else if constexpr (std::is_same_v<T, RafDrive>) {
          if (!finite(f.omega) || f.omega < 0.0)
            throw ConfigError("raf drive: omega must be finite and >= 0");
          if (!finite(f.delta_rf) || f.delta_rf < 0.0)
            throw ConfigError("raf drive: delta_rf must be finite and >= 0");
          if (!finite(f.nu_rf) || f.nu_rf <= 0.0)
            throw ConfigError("raf drive: nu_rf must be finite and > 0");
          if (!finite(f.phase)) throw ConfigError("raf drive: phase must be finite");
          if (!finite(f.window) || f.window <= 0.0)
            throw ConfigError("raf drive: window must be finite and > 0");
        } else {
          if (f.samples.size() < 2)
            throw ConfigError("piecewise field: need at least two samples");
          double prev = -std::numeric_limits<double>::infinity();
          for (const auto& s : f.samples) {
            if (!finite(s.t) || !finite(s.omega) || !finite(s.delta))
              throw ConfigError("piecewise field: samples must be finite");
            if (s.omega < 0.0)
              throw ConfigError("piecewise field: omega must be >= 0");
            if (s.t <= prev)
              throw ConfigError("piecewise field: sample times must strictly increase");
            prev = s.t;
          }
        }
      },
      field);
}

double support_end(const ControlField& field) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SquarePulse>) {
          return f.duration;
        } else if constexpr (std::is_same_v<T, RafDrive>) {
          return f.window;
        } else {
          return f.samples.empty() ? 0.0 : f.samples.back().t;
        }
      },
      field);
}

std::vector<double> breakpoints(const ControlField& field) {
  return std::visit(
      [](const auto& f) -> std::vector<double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SquarePulse>) {
          return {0.0, f.duration};
        } else if constexpr (std::is_same_v<T, RafDrive>) {
          return {0.0, f.window};
        } else {
          std::vector<double> ts;
          ts.reserve(f.samples.size());
          for (const auto& s : f.samples) ts.push_back(s.t);
          return ts;
        }
      },
      field);
}

double rate_scale(const ControlField& field) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SquarePulse>) {
          return std::max(f.omega, 1.0);
        } else if constexpr (std::is_same_v<T, RafDrive>) {
          return std::max({f.omega, 0.5 * f.delta_rf, 1.0});
        } else {
          double m = 1.0;
          for (const auto& s : f.samples)
            m = std::max({m, s.omega, std::abs(s.delta)});
          return m;
        }
      },
      field);
}

double min_sample_spacing(const ControlField& field) {
  if (const auto* p = std::get_if<PiecewiseField>(&field)) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < p->samples.size(); ++i)
      d = std::min(d, p->samples[i].t - p->samples[i - 1].t);
    return d;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace photonctl
