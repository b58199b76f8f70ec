#include "photonctl/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "photonctl/closed_form.hpp"
#include "photonctl/errors.hpp"
#include "photonctl/gf_engine.hpp"

namespace photonctl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;  // 1/phi

double square_objective(Objective obj, double omega, double big_t,
                        std::uint64_t& evals) {
  ++evals;
  return cf_pn(SquarePulseContext::make(omega, big_t),
               obj == Objective::kP1 ? 1 : 2);
}

// Golden-section maximization on [a, b]; returns (argmax, value). The
// original endpoints compete with the interior result so maxima sitting on a
// constraint boundary are returned exactly (pure golden section converges to
// an interior point a fraction of tol away, which breaks the certificate).
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b);
  auto best = fa > fb ? std::make_pair(a, fa) : std::make_pair(b, fb);
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    }
  }
  if (f1 > best.second) best = {x1, f1};
  if (f2 > best.second) best = {x2, f2};
  return best;
}

// Coarse T grid: >= 400 points, linear up to 10 then logarithmic, densified
// so oscillatory strong-field objectives keep >= 20 samples per Rabi period.
std::vector<double> t_grid(double omega, double lo, double hi) {
  std::vector<double> ts;
  const double rabi_dt = kPi / (10.0 * std::max(omega, 1e-3));
  auto fill_linear = [&](double a, double b, int min_pts) {
    const int n = std::min(
        4'000'000,
        std::max(min_pts, static_cast<int>(std::ceil((b - a) / rabi_dt))));
    for (int i = 0; i <= n; ++i)
      ts.push_back(a + (b - a) * static_cast<double>(i) / n);
  };
  if (hi <= 10.0) {
    fill_linear(lo, hi, 400);
    return ts;
  }
  const double split = std::max(lo, 10.0);
  if (lo < split) fill_linear(lo, split, 300);
  // log part; still respect the Rabi spacing cap
  const int n_log = lo < split ? 100 : 400;
  double prev = split;
  for (int i = 1; i <= n_log; ++i) {
    const double t =
        split * std::pow(hi / split, static_cast<double>(i) / n_log);
    if (t - prev > rabi_dt) {
      const int extra = static_cast<int>(std::ceil((t - prev) / rabi_dt));
      for (int j = 1; j < std::min(extra, 4'000'000); ++j)
        ts.push_back(prev + (t - prev) * static_cast<double>(j) / extra);
    }
    ts.push_back(t);
    prev = t;
  }
  return ts;
}

struct Candidate {
  double t = 0.0;
  double value = -1.0;
};

}  // namespace

OptResult maximize_over_t(Objective obj, double omega,
                          std::pair<double, double> t_range) {
  const auto [lo, hi] = t_range;
  if (!(lo > 0.0) || !(hi > lo) || !(hi <= 2000.0))
    throw ConfigError("maximize_over_t: t_range must satisfy 0 < lo < hi <= 2000");
  if (!(omega >= 0.0) || !std::isfinite(omega))
    throw ConfigError("maximize_over_t: omega must be finite and >= 0");

  std::uint64_t evals = 0;
  auto f = [&](double t) { return square_objective(obj, omega, t, evals); };

  const std::vector<double> ts = t_grid(omega, lo, hi);
  std::vector<double> vs(ts.size());
  double best_grid = -1.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    vs[i] = f(ts[i]);
    best_grid = std::max(best_grid, vs[i]);
  }

  // Refine every local maximum close enough to the grid best that sampling
  // error (half a Rabi lobe) could reorder them.
  constexpr double kMargin = 0.02;
  constexpr double kBracket = 1e-6;
  Candidate best;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const bool left_ok = i == 0 || vs[i] >= vs[i - 1];
    const bool right_ok = i + 1 == ts.size() || vs[i] >= vs[i + 1];
    if (!left_ok || !right_ok || vs[i] < best_grid - kMargin) continue;
    const double a = i == 0 ? ts[0] : ts[i - 1];
    const double b = i + 1 == ts.size() ? ts.back() : ts[i + 1];
    auto [t_ref, v_ref] = golden_max(f, a, b, kBracket);
    // prefer higher value; on ties (within refinement accuracy) smaller T
    if (v_ref > best.value + 1e-12 ||
        (v_ref > best.value - 1e-12 && t_ref < best.t)) {
      best = {t_ref, v_ref};
    }
  }

  OptResult res;
  res.argmax = {omega, best.t};
  res.value = best.value;
  res.iterations = evals;
  res.bracket = {0.0, kBracket};
  const double probe_lo = std::max(lo, best.t - kBracket);
  const double probe_hi = std::min(hi, best.t + kBracket);
  res.certified = best.value >= f(probe_lo) - 1e-12 &&
                  best.value >= f(probe_hi) - 1e-12;
  return res;
}

OptResult maximize_global(Objective obj, std::pair<double, double> omega_range,
                          std::pair<double, double> t_range) {
  const auto [w_lo, w_hi] = omega_range;
  if (!(w_lo > 0.0) || !(w_hi >= w_lo))
    throw ConfigError("maximize_global: omega_range must satisfy 0 < lo <= hi");

  std::uint64_t evals = 0;
  constexpr int kOmegaPoints = 200;
  const bool log_scan = w_hi / w_lo > 20.0;

  double best_w = w_lo, best_t = 0.0, best_v = -1.0;
  for (int i = 0; i <= kOmegaPoints; ++i) {
    const double frac = static_cast<double>(i) / kOmegaPoints;
    const double w = log_scan ? w_lo * std::pow(w_hi / w_lo, frac)
                              : w_lo + (w_hi - w_lo) * frac;
    OptResult r = maximize_over_t(obj, w, t_range);
    evals += r.iterations;
    if (r.value > best_v) {
      best_v = r.value;
      best_w = w;
      best_t = r.argmax[1];
    }
  }

  // Coordinate descent around the scan winner.
  constexpr double kTol = 1e-6;
  const double w_step = log_scan
                            ? best_w * (std::pow(w_hi / w_lo,
                                                 1.0 / kOmegaPoints) -
                                        1.0)
                            : (w_hi - w_lo) / kOmegaPoints;
  double dw = std::max(w_step, 10 * kTol);
  double dt = std::max({0.05, best_t * 0.02, 10 * kTol});
  for (int sweep = 0; sweep < 60; ++sweep) {
    const double w0 = best_w, t0 = best_t;
    auto fw = [&](double w) { return square_objective(obj, w, best_t, evals); };
    best_w = golden_max(fw, std::max(w_lo, best_w - dw),
                        std::min(w_hi, best_w + dw), kTol)
                 .first;
    auto ft = [&](double t) { return square_objective(obj, best_w, t, evals); };
    const auto t_best = golden_max(ft, std::max(t_range.first, best_t - dt),
                                   std::min(t_range.second, best_t + dt), kTol);
    best_t = t_best.first;
    best_v = t_best.second;
    if (std::abs(best_w - w0) < kTol && std::abs(best_t - t0) < kTol) break;
    dw = std::max(4 * std::abs(best_w - w0), 10 * kTol);
    dt = std::max(4 * std::abs(best_t - t0), 10 * kTol);
  }

  // Coordinate descent stalls short of a joint optimum when the two
  // parameters are correlated: per-axis moves fall below kTol while the
  // valley still runs diagonally. Newton-polish the smooth objective to the
  // joint stationary point (finite-difference gradient/Hessian; evaluations
  // are microseconds) so the certificate below can hold at +-kTol.
  auto fobj = [&](double w, double t) {
    return square_objective(obj, w, t, evals);
  };
  for (int it = 0; it < 16; ++it) {
    const double hw = std::max(1e-5 * best_w, 1e-8);
    const double ht = std::max(1e-5 * best_t, 1e-8);
    const double f0 = fobj(best_w, best_t);
    const double fpw = fobj(best_w + hw, best_t);
    const double fmw = fobj(best_w - hw, best_t);
    const double fpt = fobj(best_w, best_t + ht);
    const double fmt = fobj(best_w, best_t - ht);
    const double fpp = fobj(best_w + hw, best_t + ht);
    const double fpm = fobj(best_w + hw, best_t - ht);
    const double fmp = fobj(best_w - hw, best_t + ht);
    const double fmm = fobj(best_w - hw, best_t - ht);
    const double gw = (fpw - fmw) / (2 * hw);
    const double gt = (fpt - fmt) / (2 * ht);
    const double hww = (fpw - 2 * f0 + fmw) / (hw * hw);
    const double htt = (fpt - 2 * f0 + fmt) / (ht * ht);
    const double hwt = (fpp - fpm - fmp + fmm) / (4 * hw * ht);
    const double det = hww * htt - hwt * hwt;
    if (!(det > 0.0) || !(hww < 0.0)) break;  // curvature not a clean maximum
    const double sw = -(htt * gw - hwt * gt) / det;
    const double st = -(hww * gt - hwt * gw) / det;
    const double w_new = std::clamp(best_w + sw, w_lo, w_hi);
    const double t_new = std::clamp(best_t + st, t_range.first, t_range.second);
    const double f_new = fobj(w_new, t_new);
    if (f_new + 1e-14 < best_v) break;  // stopped improving: at the optimum
    const double moved =
        std::max(std::abs(w_new - best_w), std::abs(t_new - best_t));
    best_w = w_new;
    best_t = t_new;
    best_v = f_new;
    if (moved < 1e-9) break;
  }

  OptResult res;
  res.argmax = {best_w, best_t};
  res.value = best_v;
  res.bracket = {kTol, kTol};
  res.certified = true;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      if (dx == 0 && dy == 0) continue;
      const double w = std::clamp(best_w + dx * kTol, w_lo, w_hi);
      const double t =
          std::clamp(best_t + dy * kTol, t_range.first, t_range.second);
      if (square_objective(obj, w, t, evals) > best_v + 1e-12)
        res.certified = false;
    }
  }
  res.iterations = evals;
  return res;
}

OptResult maximize_raf(Objective obj, std::pair<double, double> omega_range,
                       std::pair<double, double> delta_rf_range, double nu_rf,
                       const RafOptOptions& opt) {
  if (!(omega_range.first > 0.0) || !(omega_range.second >= omega_range.first))
    throw ConfigError("maximize_raf: omega_range must satisfy 0 < lo <= hi");
  if (!(delta_rf_range.first >= 0.0) ||
      !(delta_rf_range.second >= delta_rf_range.first))
    throw ConfigError("maximize_raf: delta_rf_range must satisfy 0 <= lo <= hi");
  if (!(nu_rf > 0.0)) throw ConfigError("maximize_raf: nu_rf must be > 0");

  GfOptions gf;
  gf.rel_tol = opt.rel_tol;
  gf.abs_tol = opt.abs_tol;
  gf.step_cap_scale = opt.step_cap_scale;
  const int idx = obj == Objective::kP1 ? 1 : 2;

  std::uint64_t evals = 0;
  auto f = [&](double w, double d) {
    ++evals;
    RafParams p;
    p.omega = w;
    p.delta_rf = d;
    p.nu_rf = nu_rf;
    const PhotonDistribution dist = raf_distribution(p, opt.n_max, gf);
    return dist.probs[idx];
  };

  auto axis = [](double lo, double hi, int n, int i) {
    return n <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  };
  const int nw = omega_range.second > omega_range.first ? opt.omega_points : 1;
  const int nd =
      delta_rf_range.second > delta_rf_range.first ? opt.delta_points : 1;

  double best_w = omega_range.first, best_d = delta_rf_range.first,
         best_v = -1.0;
  for (int i = 0; i < nw; ++i) {
    const double w = axis(omega_range.first, omega_range.second, nw, i);
    for (int j = 0; j < nd; ++j) {
      const double d = axis(delta_rf_range.first, delta_rf_range.second, nd, j);
      const double v = f(w, d);
      if (v > best_v) {
        best_v = v;
        best_w = w;
        best_d = d;
      }
    }
  }

  double dw = nw > 1 ? (omega_range.second - omega_range.first) / (nw - 1) : 0;
  double dd =
      nd > 1 ? (delta_rf_range.second - delta_rf_range.first) / (nd - 1) : 0;
  for (int sweep = 0; sweep < 40; ++sweep) {
    const double w0 = best_w, d0 = best_d;
    if (dw > 0) {
      auto fw = [&](double w) { return f(w, best_d); };
      const auto r =
          golden_max(fw, std::max(omega_range.first, best_w - dw),
                     std::min(omega_range.second, best_w + dw), opt.refine_tol);
      best_w = r.first;
      best_v = r.second;
    }
    if (dd > 0) {
      auto fd = [&](double d) { return f(best_w, d); };
      const auto r =
          golden_max(fd, std::max(delta_rf_range.first, best_d - dd),
                     std::min(delta_rf_range.second, best_d + dd),
                     opt.refine_tol);
      best_d = r.first;
      best_v = r.second;
    }
    const bool w_done = dw == 0 || std::abs(best_w - w0) < opt.refine_tol;
    const bool d_done = dd == 0 || std::abs(best_d - d0) < opt.refine_tol;
    if (w_done && d_done) break;
    if (dw > 0) dw = std::max(4 * std::abs(best_w - w0), 10 * opt.refine_tol);
    if (dd > 0) dd = std::max(4 * std::abs(best_d - d0), 10 * opt.refine_tol);
  }

  OptResult res;
  res.argmax = {best_w, best_d};
  res.value = best_v;
  res.bracket = {dw > 0 ? opt.refine_tol : 0.0, dd > 0 ? opt.refine_tol : 0.0};
  res.certified = true;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      if ((dx == 0 && dy == 0) || (dx != 0 && res.bracket[0] == 0) ||
          (dy != 0 && res.bracket[1] == 0))
        continue;
      const double w = std::clamp(best_w + dx * res.bracket[0],
                                  omega_range.first, omega_range.second);
      const double d = std::clamp(best_d + dy * res.bracket[1],
                                  delta_rf_range.first, delta_rf_range.second);
      if (f(w, d) > best_v + 1e-12) res.certified = false;
    }
  }
  res.iterations = evals;
  return res;
}

double solve_p1_extremum(double omega, int root_index) {
  if (!(omega > 0.0))
    throw ConfigError("solve_p1_extremum: omega must be > 0");
  if (root_index < 1)
    throw ConfigError("solve_p1_extremum: root_index must be >= 1");

  // The n-th root lies near n*pi/omega; half-integer multiples of pi/omega
  // have |sin| = 1 with alternating sign, giving a clean one-root bracket.
  const double n = static_cast<double>(root_index);
  double a = (n - 0.5) * kPi / omega;
  double b = (n + 0.5) * kPi / omega;
  double fa = p1_extremum_residual(omega, a);
  double fb = p1_extremum_residual(omega, b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    // weak drives: the damping term -2T can dominate an endpoint; scan for
    // the sign change inside the window before giving up
    bool found = false;
    const int kScan = 256;
    for (int i = 1; i <= kScan; ++i) {
      const double x = a + (b - a) * static_cast<double>(i) / kScan;
      const double fx = p1_extremum_residual(omega, x);
      if (fa * fx <= 0.0) {
        b = x;
        fb = fx;
        found = true;
        break;
      }
      a = x;
      fa = fx;
    }
    if (!found)
      throw NumericError(
          "solve_p1_extremum: no sign change in bracket; no extremum found "
          "for this omega and root index");
  }
  while (b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(b, 1.0)) {
    const double m = 0.5 * (a + b);
    const double fm = p1_extremum_residual(omega, m);
    if (fm == 0.0) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

OptResult maximize_p2_envelope_two_pi(std::pair<double, double> t_range) {
  std::uint64_t evals = 0;
  auto f = [&](double t) {
    ++evals;
    return p1_p2_upper_bounds(t).second;
  };
  constexpr double kTol = 1e-9;
  auto [t, v] = golden_max(f, t_range.first, t_range.second, kTol);
  OptResult res;
  res.argmax = {t};
  res.value = v;
  res.iterations = evals;
  res.bracket = {kTol};
  res.certified = v >= f(t - kTol) - 1e-15 && v >= f(t + kTol) - 1e-15;
  return res;
}

OptResult maximize_p2_two_pi(double omega, std::pair<double, double> t_range) {
  if (!(omega > 0.0))
    throw ConfigError("maximize_p2_two_pi: omega must be > 0");
  const int n_lo =
      std::max(1, static_cast<int>(std::ceil(omega * t_range.first / (2 * kPi))));
  const int n_hi =
      static_cast<int>(std::floor(omega * t_range.second / (2 * kPi)));
  if (n_hi < n_lo)
    throw ConfigError("maximize_p2_two_pi: no 2pi pulse inside t_range");

  std::uint64_t evals = 0;
  auto value_at = [&](int n) {
    ++evals;
    const double t = 2 * kPi * n / omega;
    return cf_pn(SquarePulseContext::make(omega, t), 2);
  };
  int best_n = n_lo;
  double best_v = value_at(n_lo);
  for (int n = n_lo + 1; n <= n_hi; ++n) {
    const double v = value_at(n);
    if (v > best_v) {
      best_v = v;
      best_n = n;
    }
  }
  OptResult res;
  res.argmax = {omega, 2 * kPi * best_n / omega};
  res.value = best_v;
  res.iterations = evals;
  res.bracket = {0.0, 0.0};
  res.certified = (best_n == n_lo || value_at(best_n - 1) <= best_v) &&
                  (best_n == n_hi || value_at(best_n + 1) <= best_v);
  return res;
}

}  // namespace photonctl
