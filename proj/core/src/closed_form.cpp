#include "photonctl/closed_form.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "photonctl/errors.hpp"

namespace photonctl {

namespace {

using cplx = std::complex<double>;

// The exact formulas divide by powers of eta = 1-4w^2 (or xi = 1-16w^2) with
// brackets that vanish to matching order. Inside this window we evaluate the
// de-singularized Taylor series in eta (xi) instead; the leading coefficients
// that are identically zero are skipped analytically rather than summed.
constexpr int kTerms = 32;
constexpr double kForceWindow = 1e-6;   // always use the series here
constexpr double kWindow = 0.05;        // ... and here, if the gate holds
constexpr double kGate = 400.0;         // gate on T^2 |eta|
// Beyond this duration e^{-T/2} underflows; every exponential contribution
// is identically zero in double precision.
constexpr double kDeadPulse = 1490.0;

bool series_path(double s, double big_t) {
  const double a = std::abs(s);
  return a <= kForceWindow || (a <= kWindow && big_t * big_t * a <= kGate);
}

// ch[m] = (T^2/4)^m / (2m)!  -> cosh(T sqrt(eta)/2) = sum ch[m] eta^m
// sy[m] = (T/2)^(2m+1)/(2m+1)! -> sinh(T sqrt(eta)/2)/sqrt(eta) = sum sy[m] eta^m
struct SeriesTables {
  std::array<double, kTerms + 2> ch{};
  std::array<double, kTerms + 2> sy{};
};

SeriesTables make_tables(double big_t) {
  SeriesTables t;
  t.ch[0] = 1.0;
  t.sy[0] = big_t / 2;
  const double q = big_t * big_t / 4;
  for (int m = 1; m < kTerms + 2; ++m) {
    t.ch[m] = t.ch[m - 1] * q / ((2 * m - 1) * (2 * m));
    t.sy[m] = t.sy[m - 1] * q / ((2 * m) * (2 * m + 1));
  }
  return t;
}

double p0_series(double eta, double big_t) {
  if (big_t >= kDeadPulse) return 0.0;
  const SeriesTables t = make_tables(big_t);
  double s = 0.0;
  for (int k = kTerms; k >= 1; --k) {
    const double ck =
        t.ch[k] + t.ch[k - 1] + 2 * t.sy[k - 1] + (k == 1 ? 1.0 : 0.0);
    s = s * eta + ck;
  }
  return std::exp(-big_t / 2) / 2 * s;
}

double p1_series(double eta, double big_t) {
  if (big_t >= kDeadPulse) return 0.0;
  const SeriesTables t = make_tables(big_t);
  const double T = big_t;
  double s = 0.0;
  for (int k = kTerms; k >= 2; --k) {
    const double wk = (T - 8) * t.ch[k] + (4 + T) * t.ch[k - 1] -
                      6 * t.sy[k] + 2 * (1 + T) * t.sy[k - 1];
    s = s * eta + wk;
  }
  return (1 - eta) * std::exp(-T / 2) / 8 * s;
}

double p2_series(double eta, double big_t) {
  if (big_t >= kDeadPulse) return 0.0;
  const SeriesTables t = make_tables(big_t);
  const double T = big_t;
  double s = 0.0;
  for (int k = kTerms + 1; k >= 4; --k) {
    const double dk = 96 * t.ch[k] + (T * T - 28 * T - 32) * t.ch[k - 1] +
                      T * (T + 8) * t.ch[k - 2] +
                      2 * (60 - 9 * T) * t.sy[k - 1] +
                      2 * (T * T - T - 24) * t.sy[k - 2];
    s = s * eta + dk;
  }
  const double om = eta - 1;
  return om * om * std::exp(-T / 2) / 64 * s;
}

double mean_series(double xi, double big_t, double omega) {
  const double T = big_t;
  const double o2 = omega * omega;
  const double pref = o2 / ((1 + 2 * o2) * (1 + 2 * o2));
  const double linear = T * (1 + 2 * o2) - 2 + 2 * o2;
  if (T >= kDeadPulse) return pref * linear;
  // cosh(sqrt z) and sinh(sqrt z)/sqrt z as entire series in z = xi T^2/16
  const double z = xi * T * T / 16;
  double c = 0.0, s = 0.0, cterm = 1.0, sterm = 1.0;
  for (int m = 0; m < kTerms; ++m) {
    c += cterm;
    s += sterm;
    cterm *= z / ((2 * m + 1) * (2 * m + 2));
    sterm *= z / ((2 * m + 2) * (2 * m + 3));
  }
  const double br = linear + std::exp(-3 * T / 4) *
                                 ((2 - 2 * o2) * c + (2 - 14 * o2) * (T / 4) * s);
  return pref * br;
}

double fac2_rational(double xi, double big_t) {
  const double T = big_t;
  const double d = xi - 9;
  return 2 *
         (T * T * d * d + 32 * (63 + 5 * xi) +
          2 * T * (-351 + 30 * xi + xi * xi)) /
         (d * d * d * d);
}

double fac2_series(double xi, double big_t) {
  const double T = big_t;
  const double pref = (1 - xi) * (1 - xi) / 8;
  if (T >= kDeadPulse) return pref * fac2_rational(xi, T);
  // Pair contribution G(x)+G(-x) with G = e^{xT/4} N(x) / ((x-3)^4 x^3):
  // equal to 2 sum_k h_{3+2k} xi^k where h_j are the Taylor coefficients of
  // e^{xT/4} N(x) (x-3)^{-4}; h_1 vanishes identically.
  constexpr int J = 3 + 2 * kTerms;
  std::array<double, J + 1> e{}, d{};
  e[0] = 1.0;
  for (int a = 1; a <= J; ++a) e[a] = e[a - 1] * (T / 4) / a;
  d[0] = 1.0 / 81.0;  // (x-3)^{-4} = sum_c C(c+3,3)/3^{c+4} x^c
  for (int c = 1; c <= J; ++c) d[c] = d[c - 1] * (c + 3) / (3.0 * c);
  const std::array<double, 4> n = {12.0, -(16 + 3 * T), -2 * (6 + T), T};
  std::array<double, J + 1> h{};
  for (int j = 0; j <= J; ++j) {
    double acc = 0.0;
    for (int b = 0; b <= 3 && b <= j; ++b) {
      double ed = 0.0;
      for (int a = 0; a <= j - b; ++a) ed += e[a] * d[j - b - a];
      acc += n[b] * ed;
    }
    h[j] = acc;
  }
  double pair = 0.0;
  for (int k = kTerms - 1; k >= 0; --k) pair = pair * xi + h[3 + 2 * k];
  pair *= 2 * std::exp(-3 * T / 4);
  return pref * (pair + fac2_rational(xi, T));
}

// Folded exponentials: a = e^{(y-1)T/2}, b = e^{-(y+1)T/2} both have
// non-positive real exponent parts for every physical omega, so
// e^{-T/2} cosh(Ty/2) = (a+b)/2 and e^{-T/2} sinh(Ty/2) = (a-b)/2 never
// overflow even for long pulses.
struct Folded {
  cplx ch, sh;
  double em;
};

Folded fold(const cplx& root, double big_t, double scale) {
  const cplx a = std::exp((root - 1.0) * (big_t / scale));
  const cplx b = std::exp(-(root + 1.0) * (big_t / scale));
  return {0.5 * (a + b), 0.5 * (a - b), std::exp(-big_t / scale)};
}

cplx p0_folded(const cplx& y, double eta, double big_t) {
  const Folded f = fold(y, big_t, 2.0);
  return ((1 + eta) * f.ch + (eta - 1) * f.em + 2.0 * y * f.sh) / (2 * eta);
}

cplx p1_folded(const cplx& y, double eta, double big_t) {
  const double T = big_t;
  const Folded f = fold(y, T, 2.0);
  const cplx w = (-8 + T + (4 + T) * eta) * f.ch +
                 2 * (4 + T - (2 + T) * eta) * f.em +
                 2 * (-3 + (1 + T) * eta) * (f.sh / y);
  return (1 - eta) / (8 * eta * eta) * w;
}

cplx p2_folded(const cplx& y, double eta, double big_t) {
  const double T = big_t;
  const Folded f = fold(y, T, 2.0);
  const cplx br =
      (T * (T + 8) * eta * eta + (T * T - 28 * T - 32) * eta + 96) * f.ch +
      4 * (T * (T + 4) * eta * eta - (T * T + 8 * T - 8) * eta - 24) * f.em +
      2 * ((T * T - T - 24) * eta + (60 - 9 * T)) * (y * f.sh);
  const double om = eta - 1;
  return om * om / (64 * eta * eta * eta * eta) * br;
}

cplx mean_folded(const cplx& x, double big_t, double omega) {
  const double T = big_t;
  const double o2 = omega * omega;
  const Folded f = fold(x, T, 4.0);  // e^{-3T/4} folded via scale... see below
  // fold() with scale 4 gives e^{-T/4} cosh(Tx/4); one extra e^{-T/2} factor
  // turns it into the e^{-3T/4} cosh(Tx/4) the formula needs.
  const double extra = std::exp(-T / 2);
  const cplx br = T * (1 + 2 * o2) - 2 + 2 * o2 +
                  extra * ((2 - 2 * o2) * f.ch + (2 - 14 * o2) * (f.sh / x));
  return o2 / ((1 + 2 * o2) * (1 + 2 * o2)) * br;
}

cplx fac2_folded(const cplx& x, double xi, double big_t) {
  const double T = big_t;
  // e^{(x-3)T/4} and e^{-(x+3)T/4}: real parts never positive.
  const cplx a = std::exp((x - 3.0) * (T / 4));
  const cplx b = std::exp(-(x + 3.0) * (T / 4));
  const cplx x3 = x * x * x;
  const cplx t1 = a * (12.0 - (16 + 3 * T) * x - 2 * (6 + T) * x * x + T * x3) /
                  (std::pow(x - 3.0, 4) * x3);
  const cplx t2 = b * (-12.0 - (16 + 3 * T) * x + 2 * (6 + T) * x * x + T * x3) /
                  (std::pow(x + 3.0, 4) * x3);
  const double pref = (1 - xi) * (1 - xi) / 8;
  return pref * (t1 + t2 + fac2_rational(xi, T));
}

double checked(const detail::CfValue& v, const char* what) {
  if (v.imag_residue > 1e-8)
    throw NumericError(std::string(what) +
                       ": imaginary residue exceeds 1e-8; evaluation unstable");
  return v.value;
}

}  // namespace

SquarePulseContext SquarePulseContext::make(double omega, double big_t) {
  if (!std::isfinite(omega) || omega < 0.0)
    throw ConfigError("square pulse context: omega must be finite and >= 0");
  if (!std::isfinite(big_t) || big_t < 0.0)
    throw ConfigError("square pulse context: big_t must be finite and >= 0");
  SquarePulseContext ctx;
  ctx.omega = omega;
  ctx.big_t = big_t;
  ctx.eta = 1 - 4 * omega * omega;
  ctx.xi = 1 - 16 * omega * omega;
  ctx.y_aux = std::sqrt(cplx(ctx.eta, 0.0));
  ctx.x_aux = std::sqrt(cplx(ctx.xi, 0.0));
  return ctx;
}

namespace detail {

CfValue cf_pn_full(const SquarePulseContext& ctx, int n) {
  if (n < 0 || n > 2) throw ConfigError("cf_pn: n must be 0, 1 or 2");
  const double T = ctx.big_t;
  const double eta = ctx.eta;
  if (series_path(eta, T)) {
    const double v = n == 0   ? p0_series(eta, T)
                     : n == 1 ? p1_series(eta, T)
                              : p2_series(eta, T);
    return {v, 0.0};
  }
  const cplx z = n == 0   ? p0_folded(ctx.y_aux, eta, T)
                 : n == 1 ? p1_folded(ctx.y_aux, eta, T)
                          : p2_folded(ctx.y_aux, eta, T);
  return {z.real(), std::abs(z.imag())};
}

CfValue cf_mean_full(const SquarePulseContext& ctx) {
  if (ctx.omega == 0.0) return {0.0, 0.0};
  if (series_path(ctx.xi, ctx.big_t))
    return {mean_series(ctx.xi, ctx.big_t, ctx.omega), 0.0};
  const cplx z = mean_folded(ctx.x_aux, ctx.big_t, ctx.omega);
  return {z.real(), std::abs(z.imag())};
}

CfValue cf_fac2_full(const SquarePulseContext& ctx) {
  if (ctx.omega == 0.0) return {0.0, 0.0};
  if (series_path(ctx.xi, ctx.big_t))
    return {fac2_series(ctx.xi, ctx.big_t), 0.0};
  const cplx z = fac2_folded(ctx.x_aux, ctx.xi, ctx.big_t);
  return {z.real(), std::abs(z.imag())};
}

}  // namespace detail

double cf_pn(const SquarePulseContext& ctx, int n) {
  return checked(detail::cf_pn_full(ctx, n), "cf_pn");
}

double cf_mean_n(const SquarePulseContext& ctx) {
  return checked(detail::cf_mean_full(ctx), "cf_mean_n");
}

double cf_fac2(const SquarePulseContext& ctx) {
  return checked(detail::cf_fac2_full(ctx), "cf_fac2");
}

double cf_q(const SquarePulseContext& ctx) {
  const double mean = cf_mean_n(ctx);
  if (mean < 1e-12) return std::numeric_limits<double>::quiet_NaN();
  return (cf_fac2(ctx) - mean * mean) / mean;
}

double strong_field_pn(double omega, double big_t, int n) {
  const double T = big_t;
  const double em = std::exp(-T / 2);
  const double c = std::cos(omega * T);
  switch (n) {
    case 0: {
      const double half = std::cos(omega * T / 2);
      return em * half * half;
    }
    case 1:
      return em / 8 * (4 + 2 * T - (4 + T) * c);
    case 2:
      return em / 64 * T * ((8 + T) * c + 4 * T + 16);
    default:
      throw ConfigError("strong_field_pn: n must be 0, 1 or 2");
  }
}

std::pair<double, double> p1_p2_upper_bounds(double big_t) {
  const double em = std::exp(-big_t / 2);
  return {(8 + 3 * big_t) * em / 8, em * big_t * (5 * big_t + 24) / 64};
}

double pi_pulse_p1(double omega_t_product) {
  const double s = std::sin(omega_t_product / 2);
  return s * s;
}

double p1_extremum_residual(double omega, double big_t) {
  const double T = big_t;
  return -2 * T + (2 + T) * std::cos(omega * T) +
         2 * (4 + T) * omega * std::sin(omega * T);
}

double p1max_strong_asymptote(double omega) {
  if (!(omega > 0.0))
    throw ConfigError("p1max_strong_asymptote: omega must be > 0");
  const double pi = std::numbers::pi;
  return std::exp(-pi / (2 * omega)) * (1 + 3 * pi / (8 * omega));
}

double poisson_pn(double omega, double big_t, int n) {
  if (n < 0) throw ConfigError("poisson_pn: n must be >= 0");
  const double lam = omega * omega * big_t;
  if (n == 0) return std::exp(-lam);
  if (lam == 0.0) return 0.0;
  return std::exp(n * std::log(lam) - lam - std::lgamma(n + 1.0));
}

double p2_short_time(double omega, double big_t) {
  const double o2 = omega * omega;
  const double t2 = big_t * big_t;
  return o2 * o2 * t2 * t2 * big_t / 480;
}

double q_longtime(double omega) {
  const double o2 = omega * omega;
  return -6 * o2 / ((1 + 2 * o2) * (1 + 2 * o2));
}

double q_strongfield(double omega, double big_t) {
  const double T = big_t;
  const double ce = std::cos(omega * T) * std::exp(-3 * T / 4);
  const double num = -(1 - ce) * (1 - ce) + 3 * T * ce;
  return num / (2 * (1 + T - ce));
}

double q_shortpulse_limit(double omega_t_product, bool on_resonance_2pin) {
  if (on_resonance_2pin) return 6.0 / 7.0;
  const double s = std::sin(omega_t_product / 2);
  return -s * s;
}

}  // namespace photonctl
