#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>

#include "photonctl/closed_form.hpp"
#include "photonctl/errors.hpp"

using namespace photonctl;

namespace {

// Reference values from a 50-digit arbitrary-precision evaluation of the
// exact generating-function solution, rounded to 18 significant digits.
// Rows probe the overdamped (omega < 1/4), intermediate and underdamped
// regimes, both removable singularities (omega = 1/4 and omega = 1/2, via
// straddling points), strong fields, and a long-pulse extreme.
struct Anchor {
  double omega, big_t;
  double p0, p1, p2, mean, fac2;
};

constexpr Anchor kAnchors[] = {
    {0.05, 3, 0.996389125860237279, 0.00360960928131537717, 1.26475266434533122e-6,
     0.00361213910399633825, 2.53014004633337126e-6},
    {0.3, 4, 0.810737693016797617, 0.184286771606266054, 0.00494186500189442658,
     0.194271599314417208, 0.0100862719409810111},
    {0.5, 0.5, 0.985669741074746786, 0.0143268161631910051, 3.44260630027284492e-6,
     0.0143337018430797825, 6.88614718670793580e-6},
    {0.5, 5, 0.415555305533487651, 0.509023184825934911, 0.0727280354796030632,
     0.662597036376241614, 0.161841557201551918},
    {0.5, 6.75, 0.247145706086994133, 0.564104093178212850, 0.173677535383729433,
     0.957171342730924203, 0.440771741506668760},
    {0.5, 10, 0.0825398507387969719, 0.445687119210340792, 0.371040375654934305,
     1.50001499401425298, 1.40774775192816894},
    {0.25, 1, 0.986744618575154020, 0.0132495100644844974, 5.87084445820124999e-6,
     0.0132612533011265660, 0.0000117447844310228531},
    {0.25, 5, 0.816709438758104767, 0.177633809796435846, 0.00560829566273347178,
     0.188995931041482957, 0.0115083019757016964},
    {0.25, 10, 0.592884740466917722, 0.353802413240904026, 0.0507076292091259468,
     0.463090991752349036, 0.117393881793568623},
    {0.49, 3, 0.694270456426130194, 0.295067504888675140, 0.0105744046921824163,
     0.316479480942491798, 0.0216762022325820901},
    {0.51, 3, 0.672308272152654444, 0.315274308763307596, 0.0123066391610797717,
     0.340220289804932933, 0.0252801366749474983},
    {0.26, 7, 0.701515177186285380, 0.277483592254574811, 0.0205330734824466116,
     0.319958543722369751, 0.0439011286622707808},
    {2, 5, 0.00133596005878101102, 0.272655249709200097, 0.179037760890600476,
     2.52841016712758712, 5.26401526407342967},
    {5, 10, 0.00596936093533187025, 0.0112453480248756982, 0.0772107712248692779,
     5.36311007109726544, 28.1814064787008796},
    {1, 100, 3.29673368562984649e-23, 1.20019422310804872e-20, 2.47797466315284807e-19,
     33.3333333333333333, 1088.81481481481481},
    {1.25, 4.86, 0.0541007886837327313, 0.178663962209964346, 0.556840472980842065,
     1.94482466978059269, 2.50567507142834049},
    // Straddles of the removable singularities exercise the series path.
    {0.2499999, 5, 0.816709574259402955, 0.177633683072355689, 0.00560828699999615724,
     0.188995786647970464, 0.0115082839602473309},
    {0.2500001, 5, 0.816709303256769493, 0.177633936520543200, 0.00560830432548045160,
     0.188996075435042650, 0.0115083199911767403},
    {0.4999999, 5, 0.415555469062203097, 0.509023074260812380, 0.0727279855447903794,
     0.662596816797537141, 0.161841438812587857},
    {0.5000001, 5, 0.415555142004786705, 0.509023295391019332, 0.0727280854144366395,
     0.662597255954957990, 0.161841675590574531},
};

// Probabilities: absolute floor for the tiny entries plus a relative band.
bool prob_ok(double got, double ref) {
  return std::abs(got - ref) <= 1e-10 + 1e-9 * std::abs(ref);
}

}  // namespace

TEST_CASE("exact P_n and factorial moments match high-precision references") {
  for (const Anchor& a : kAnchors) {
    CAPTURE(a.omega);
    CAPTURE(a.big_t);
    const auto ctx = SquarePulseContext::make(a.omega, a.big_t);
    CHECK(prob_ok(cf_pn(ctx, 0), a.p0));
    CHECK(prob_ok(cf_pn(ctx, 1), a.p1));
    CHECK(prob_ok(cf_pn(ctx, 2), a.p2));
    CHECK(cf_mean_n(ctx) == doctest::Approx(a.mean).epsilon(1e-9));
    CHECK(cf_fac2(ctx) == doctest::Approx(a.fac2).epsilon(1e-9));
  }
}

TEST_CASE("Mandel Q assembles from the moments and matches references") {
  struct QRef {
    double omega, big_t, q;
  };
  constexpr QRef kQ[] = {
      {0.3, 500, -0.386042893317809277},
      {1, 500, -0.667111111111111111},
      {3, 500, -0.150857747674422666},
      {1, 100, -0.668888888888888889},
      {2, 5, -0.446463443248668285},
  };
  for (const QRef& r : kQ) {
    CAPTURE(r.omega);
    const auto ctx = SquarePulseContext::make(r.omega, r.big_t);
    CHECK(cf_q(ctx) == doctest::Approx(r.q).epsilon(1e-8));
  }
}

TEST_CASE("Q is NaN for a dead drive") {
  const auto ctx = SquarePulseContext::make(0.0, 5.0);
  CHECK(std::isnan(cf_q(ctx)));
  CHECK(cf_pn(ctx, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cf_mean_n(ctx) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("context construction validates and classifies regimes") {
  CHECK_THROWS_AS(SquarePulseContext::make(-0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(SquarePulseContext::make(0.1, -1.0), ConfigError);

  const auto od = SquarePulseContext::make(0.1, 1.0);
  CHECK(od.eta > 0.0);
  CHECK(od.xi > 0.0);
  CHECK(od.y_aux.imag() == 0.0);

  const auto ud = SquarePulseContext::make(2.0, 1.0);
  CHECK(ud.eta < 0.0);
  CHECK(ud.xi < 0.0);
  CHECK(ud.y_aux.real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(ud.y_aux.imag() > 0.0);
}

TEST_CASE("probability sanity band across a wide parameter sweep") {
  for (double omega : {0.01, 0.1, 0.2501, 0.35, 0.5, 0.75, 1.0, 3.0, 12.0, 40.0}) {
    for (double big_t : {0.001, 0.1, 1.0, 6.0, 25.0, 120.0}) {
      CAPTURE(omega);
      CAPTURE(big_t);
      const auto ctx = SquarePulseContext::make(omega, big_t);
      const double p0 = cf_pn(ctx, 0);
      const double p1 = cf_pn(ctx, 1);
      const double p2 = cf_pn(ctx, 2);
      CHECK(p0 >= -1e-12);
      CHECK(p1 >= -1e-12);
      CHECK(p2 >= -1e-12);
      CHECK(p0 + p1 + p2 <= 1.0 + 1e-10);
      // Moment consistency: <N> >= P1 + 2 P2, <N(N-1)> >= 2 P2.
      CHECK(cf_mean_n(ctx) >= p1 + 2.0 * p2 - 1e-10);
      CHECK(cf_fac2(ctx) >= 2.0 * p2 - 1e-10);
    }
  }
}

TEST_CASE("limit laws agree with the exact formulas in their regimes") {
  SUBCASE("weak-field Poisson law") {
    // omega^2 T = 0.5 with omega -> 0: exact P_n approach Poisson(0.5).
    const double omega = 0.005, big_t = 0.5 / (omega * omega);
    const auto ctx = SquarePulseContext::make(omega, big_t);
    for (int n : {0, 1, 2}) {
      CHECK(cf_pn(ctx, n) ==
            doctest::Approx(poisson_pn(omega, big_t, n)).epsilon(0.02));
    }
  }
  SUBCASE("strong-field laws and their envelopes") {
    const double omega = 60.0, big_t = 2.0;
    const auto ctx = SquarePulseContext::make(omega, big_t);
    for (int n : {0, 1, 2}) {
      CHECK(cf_pn(ctx, n) ==
            doctest::Approx(strong_field_pn(omega, big_t, n)).epsilon(0.05));
    }
    const auto [b1, b2] = p1_p2_upper_bounds(big_t);
    CHECK(strong_field_pn(omega, big_t, 1) <= b1 + 1e-12);
    CHECK(strong_field_pn(omega, big_t, 2) <= b2 + 1e-12);
    // Envelope touched exactly when sin/cos factors peak.
    CHECK(p1_p2_upper_bounds(0.0).first == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("short-time P2 power law") {
    const double omega = 0.3, big_t = 0.01;
    const auto ctx = SquarePulseContext::make(omega, big_t);
    CHECK(cf_pn(ctx, 2) ==
          doctest::Approx(p2_short_time(omega, big_t)).epsilon(0.02));
  }
  SUBCASE("long-time Q plateau") {
    CHECK(q_longtime(1.0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    const auto ctx = SquarePulseContext::make(1.0, 500.0);
    CHECK(cf_q(ctx) == doctest::Approx(q_longtime(1.0)).epsilon(0.005));
    // Fixed-point reference for a detuning-free drive away from omega = 1.
    CHECK(q_longtime(0.3) == doctest::Approx(-0.387819592071243895).epsilon(1e-12));
  }
  SUBCASE("pi pulse and its finite-field correction") {
    CHECK(pi_pulse_p1(3.14159265358979323846) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p1max_strong_asymptote(10.0) ==
          doctest::Approx(0.955320430769477338).epsilon(1e-12));
    CHECK(p1max_strong_asymptote(100.0) ==
          doctest::Approx(0.996012126559080323).epsilon(1e-12));
  }
  SUBCASE("short strong pulse Q limits") {
    CHECK(q_shortpulse_limit(3.14159265358979323846, false) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(q_shortpulse_limit(6.28318530717958648, true) ==
          doctest::Approx(6.0 / 7.0).epsilon(1e-12));
  }
  SUBCASE("extremum residual changes sign across the first P1 maximum") {
    // At omega = 10 the first extremum sits near pi/omega.
    CHECK(p1_extremum_residual(10.0, 0.30) * p1_extremum_residual(10.0, 0.33) < 0.0);
  }
}

TEST_CASE("series path and generic path agree where they hand over") {
  // Straddling each removable singularity exercises both evaluation paths;
  // the values must be continuous at the slope of the exact functions
  // (|dP/domega| < 3 here), with no jump at the hand-over.
  for (double eps : {1e-7, 1e-5, 1e-3}) {
    for (double base : {0.25, 0.5}) {
      const auto lo = SquarePulseContext::make(base - eps, 5.0);
      const auto hi = SquarePulseContext::make(base + eps, 5.0);
      for (int n : {0, 1, 2}) {
        CAPTURE(base);
        CAPTURE(eps);
        CHECK(std::abs(cf_pn(lo, n) - cf_pn(hi, n)) < 10.0 * eps + 1e-9);
      }
    }
  }
}
