#include "photonctl/gf_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "photonctl/errors.hpp"
#include "photonctl/ode.hpp"

namespace photonctl {

namespace {

using State = std::vector<double>;

OdeOptions ode_options(const ControlField& field, const GfOptions& opt) {
  OdeOptions o;
  o.rel_tol = opt.rel_tol;
  o.abs_tol = opt.abs_tol;
  o.max_step = std::min(opt.step_cap_scale / rate_scale(field),
                        min_sample_spacing(field));
  return o;
}

// Integrate rhs through [0, t_end], splitting at the field's breakpoints so
// the controller never straddles a drive discontinuity.
template <class Rhs>
void drive_through(const ControlField& field, Rhs&& rhs, State& y,
                   double t_end, const GfOptions& opt) {
  OdeOptions o = ode_options(field, opt);
  std::vector<double> cuts = breakpoints(field);
  cuts.push_back(t_end);
  std::sort(cuts.begin(), cuts.end());
  double t = 0.0;
  double h = 0.0;
  for (double c : cuts) {
    if (c <= t || c > t_end) continue;
    o.initial_step = h;
    h = integrate_adaptive(rhs, y, t, c, o);
    t = c;
  }
  if (t < t_end) {
    o.initial_step = h;
    integrate_adaptive(rhs, y, t, t_end, o);
  }
}

// Scalar generating-function equations at fixed s.
struct ScalarRhs {
  const ControlField* field;
  double s;
  void operator()(const State& Y, double t, State& dY) const {
    const FieldValue f = field_at(*field, t);
    const double u = Y[0], v = Y[1], w = Y[2], y = Y[3];
    dY[0] = -u / 2 + f.delta * v;
    dY[1] = -f.delta * u - v / 2 - f.omega * w;
    dY[2] = f.omega * v - 0.5 * (1 + s) * (w + y);
    dY[3] = -0.5 * (1 - s) * (w + y);
  }
};

// Taylor-coefficient hierarchy in s, plus the physical (s=1) Bloch block at
// the tail of the state vector, used for the auto-horizon criterion.
struct HierarchyRhs {
  const ControlField* field;
  int n_max;
  void operator()(const State& Y, double t, State& dY) const {
    const FieldValue f = field_at(*field, t);
    const double O = f.omega, d = f.delta;
    for (int n = 0; n <= n_max; ++n) {
      const int i = 4 * n;
      const double u = Y[i], v = Y[i + 1], w = Y[i + 2], y = Y[i + 3];
      const double wm = n > 0 ? Y[i - 2] : 0.0;
      const double ym = n > 0 ? Y[i - 1] : 0.0;
      dY[i] = -u / 2 + d * v;
      dY[i + 1] = -d * u - v / 2 - O * w;
      dY[i + 2] = O * v - 0.5 * (w + wm) - 0.5 * (y + ym);
      dY[i + 3] = -0.5 * (w - wm) - 0.5 * (y - ym);
    }
    const int p = 4 * (n_max + 1);
    const double u = Y[p], v = Y[p + 1], w = Y[p + 2], y = Y[p + 3];
    dY[p] = -u / 2 + d * v;
    dY[p + 1] = -d * u - v / 2 - O * w;
    dY[p + 2] = O * v - (w + y);
    dY[p + 3] = 0.0;
  }
};

// First and second s-derivative blocks at s=1 on top of the physical block.
struct MomentsRhs {
  const ControlField* field;
  void operator()(const State& Y, double t, State& dY) const {
    const FieldValue f = field_at(*field, t);
    const double O = f.omega, d = f.delta;
    const double u = Y[0], v = Y[1], w = Y[2], y = Y[3];
    const double u1 = Y[4], v1 = Y[5], w1 = Y[6], y1 = Y[7];
    const double u2 = Y[8], v2 = Y[9], w2 = Y[10], y2 = Y[11];
    dY[0] = -u / 2 + d * v;
    dY[1] = -d * u - v / 2 - O * w;
    dY[2] = O * v - (w + y);
    dY[3] = 0.0;
    dY[4] = -u1 / 2 + d * v1;
    dY[5] = -d * u1 - v1 / 2 - O * w1;
    dY[6] = O * v1 - 0.5 * (w + y) - (w1 + y1);
    dY[7] = 0.5 * (w + y);
    dY[8] = -u2 / 2 + d * v2;
    dY[9] = -d * u2 - v2 / 2 - O * w2;
    dY[10] = O * v2 - (w1 + y1) - (w2 + y2);
    dY[11] = w1 + y1;
  }
};

constexpr double kSettled = 1e-12;  // excited-population cutoff for `auto`
constexpr double kDecayCap = 60.0;  // hard cap on the free-decay extension
constexpr double kDecayChunk = 2.0;

// Integrate through the drive, then (horizon == nullopt) chase the physical
// excited population below kSettled with the field off. excited(y) must read
// rho_ee from the state vector.
template <class Rhs, class Excited>
void run_to_horizon(const ControlField& field, Rhs&& rhs, State& y,
                    std::optional<double> horizon, const GfOptions& opt,
                    Excited&& excited) {
  const double sup = support_end(field);
  if (horizon) {
    drive_through(field, rhs, y, *horizon, opt);
    return;
  }
  drive_through(field, rhs, y, sup, opt);
  OdeOptions o = ode_options(field, opt);
  double t = sup;
  while (excited(y) >= kSettled && t < sup + kDecayCap) {
    const double next = std::min(t + kDecayChunk, sup + kDecayCap);
    integrate_adaptive(rhs, y, t, next, o);
    t = next;
  }
}

void check_options(const GfOptions& opt) {
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
    throw ConfigError("gf engine: tolerances must be > 0");
  if (!(opt.step_cap_scale > 0.0))
    throw ConfigError("gf engine: step_cap_scale must be > 0");
}

}  // namespace

GFState propagate_gf(const ControlField& field, double s, double t_end,
                     const GfOptions& opt) {
  check_options(opt);
  validate(field);
  if (!(s >= -1.0 && s <= 1.0))
    throw ConfigError("propagate_gf: s must lie in [-1, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw ConfigError("propagate_gf: t_end must be finite and >= 0");
  State y = {0.0, 0.0, -0.5, 0.5};
  ScalarRhs rhs{&field, s};
  drive_through(field, rhs, y, t_end, opt);
  return {y[0], y[1], y[2], y[3], s, t_end};
}

PhotonDistribution photon_distribution(const ControlField& field, int n_max,
                                       std::optional<double> horizon,
                                       const GfOptions& opt) {
  check_options(opt);
  validate(field);
  if (n_max < 0) throw ConfigError("photon_distribution: n_max must be >= 0");
  if (horizon && (!(*horizon >= 0.0) || !std::isfinite(*horizon)))
    throw ConfigError("photon_distribution: horizon must be finite and >= 0");

  State y(4 * (n_max + 2), 0.0);
  y[2] = -0.5;  // w_0
  y[3] = 0.5;   // y_0
  const int p = 4 * (n_max + 1);
  y[p + 2] = -0.5;  // physical block
  y[p + 3] = 0.5;

  HierarchyRhs rhs{&field, n_max};
  run_to_horizon(field, rhs, y, horizon, opt,
                 [p](const State& st) { return st[p + 2] + st[p + 3]; });

  PhotonDistribution dist;
  dist.method = DistributionMethod::kHierarchy;
  dist.probs.resize(n_max + 1);
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    dist.probs[n] = 2 * y[4 * n + 3];
    total += dist.probs[n];
  }
  dist.tail_bound = 1.0 - total;
  dist.tail_alert = dist.tail_bound > opt.tail_threshold;
  return dist;
}

Moments moments(const ControlField& field, std::optional<double> horizon,
                const GfOptions& opt) {
  check_options(opt);
  validate(field);
  if (horizon && (!(*horizon >= 0.0) || !std::isfinite(*horizon)))
    throw ConfigError("moments: horizon must be finite and >= 0");

  State y(12, 0.0);
  y[2] = -0.5;
  y[3] = 0.5;
  MomentsRhs rhs{&field};
  run_to_horizon(field, rhs, y, horizon, opt,
                 [](const State& st) { return st[2] + st[3]; });

  Moments m;
  m.mean_n = 2 * y[7];
  m.fac2 = 2 * y[11];
  m.q = m.mean_n < 1e-12 ? std::numeric_limits<double>::quiet_NaN()
                         : (m.fac2 - m.mean_n * m.mean_n) / m.mean_n;
  return m;
}

ControlField make_raf_field(const RafParams& p) {
  RafDrive d;
  d.omega = p.omega;
  d.delta_rf = p.delta_rf;
  d.nu_rf = p.nu_rf / (2 * std::numbers::pi);
  d.phase = p.phase;
  d.window = raf_window(p);
  return d;
}

double raf_window(const RafParams& p) {
  if (p.window > 0.0) return p.window;
  if (!(p.nu_rf > 0.0))
    throw ConfigError("raf: nu_rf must be > 0 to derive the default window");
  return std::numbers::pi / p.nu_rf;
}

PhotonDistribution raf_distribution(const RafParams& p, int n_max,
                                    const GfOptions& opt) {
  const ControlField field = make_raf_field(p);
  if (p.extended) return photon_distribution(field, n_max, std::nullopt, opt);
  return photon_distribution(field, n_max, raf_window(p), opt);
}

}  // namespace photonctl
