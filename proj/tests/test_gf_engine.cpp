#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>

#include "photonctl/closed_form.hpp"
#include "photonctl/control_field.hpp"
#include "photonctl/errors.hpp"
#include "photonctl/gf_engine.hpp"

using namespace photonctl;

namespace {
constexpr double kPi = 3.14159265358979323846;

ControlField square(double omega, double big_t) {
  return SquarePulse{omega, big_t};
}
}  // namespace

TEST_CASE("normalization: the generating function at s=1 is conserved") {
  // 2*Y(s=1, t) = 1 for every drive and every time: no photons are lost.
  for (double t_end : {0.5, 5.0, 40.0}) {
    const auto g = propagate_gf(square(0.7, 6.0), 1.0, t_end);
    CHECK(std::abs(2.0 * g.y - 1.0) < 1e-9);
  }
  RafParams rp;
  rp.omega = 3.2;
  rp.delta_rf = 88.0;
  rp.nu_rf = 0.15;
  const auto g = propagate_gf(make_raf_field(rp), 1.0, raf_window(rp));
  CHECK(std::abs(2.0 * g.y - 1.0) < 1e-9);
}

TEST_CASE("s = 0 reproduces the vacuum (no-count) probability") {
  // P(no photons in [0,t]) = 2*Y(s=0, t); compare with the exact P_0 at a
  // horizon long enough for the post-pulse decay to finish.
  const double omega = 0.5, big_t = 5.0;
  const auto g = propagate_gf(square(omega, big_t), 0.0, big_t + 40.0);
  const auto ctx = SquarePulseContext::make(omega, big_t);
  CHECK(2.0 * g.y == doctest::Approx(cf_pn(ctx, 0)).epsilon(1e-8));
}

TEST_CASE("hierarchy distribution matches the exact closed forms") {
  struct Probe {
    double omega, big_t;
  };
  constexpr Probe kProbes[] = {
      {0.05, 3}, {0.3, 4}, {0.25, 5}, {0.5, 6.75}, {0.5, 10}, {2, 5}, {1.25, 4.86},
  };
  for (const Probe& pr : kProbes) {
    CAPTURE(pr.omega);
    CAPTURE(pr.big_t);
    const auto ctx = SquarePulseContext::make(pr.omega, pr.big_t);
    const auto dist = photon_distribution(square(pr.omega, pr.big_t), 6);
    REQUIRE(dist.probs.size() == 7);
    CHECK(dist.method == DistributionMethod::kHierarchy);
    for (int n : {0, 1, 2}) {
      CHECK(std::abs(dist.probs[static_cast<std::size_t>(n)] - cf_pn(ctx, n)) <
            1e-8);
    }
    CHECK(dist.tail_bound >= -1e-9);
  }
}

TEST_CASE("P_0..P_2 are independent of n_max (lower-triangular hierarchy)") {
  const auto small = photon_distribution(square(1.25, 4.86), 3);
  const auto large = photon_distribution(square(1.25, 4.86), 12);
  for (std::size_t n = 0; n < 4; ++n) {
    CHECK(std::abs(small.probs[n] - large.probs[n]) < 1e-10);
  }
}

TEST_CASE("tail alert fires when n_max is too small for a bright drive") {
  const auto starved = photon_distribution(square(1.0, 100.0), 3);
  CHECK(starved.tail_alert);
  CHECK(starved.tail_bound > 0.5);  // <N> = 33 here; 4 bins hold almost nothing
  const auto ok = photon_distribution(square(0.3, 4.0), 6);
  CHECK_FALSE(ok.tail_alert);
}

TEST_CASE("moments match the exact factorial moments and Q") {
  struct Probe {
    double omega, big_t, mean, fac2;
  };
  constexpr Probe kProbes[] = {
      {0.3, 4, 0.194271599314417208, 0.0100862719409810111},
      {0.5, 6.75, 0.957171342730924203, 0.440771741506668760},
      {2, 5, 2.52841016712758712, 5.26401526407342967},
      {5, 10, 5.36311007109726544, 28.1814064787008796},
  };
  for (const Probe& pr : kProbes) {
    CAPTURE(pr.omega);
    const auto m = moments(square(pr.omega, pr.big_t));
    CHECK(m.mean_n == doctest::Approx(pr.mean).epsilon(1e-8));
    CHECK(m.fac2 == doctest::Approx(pr.fac2).epsilon(1e-8));
    const double q_ref = (pr.fac2 - pr.mean * pr.mean) / pr.mean;
    CHECK(m.q == doctest::Approx(q_ref).epsilon(1e-7));
  }
  // Dead drive: <N> = 0 and Q is the NaN sentinel.
  const auto dead = moments(square(0.0, 1.0));
  CHECK(std::abs(dead.mean_n) < 1e-12);
  CHECK(std::isnan(dead.q));
}

TEST_CASE("explicit horizon cuts the count short") {
  // Counting only during the pulse (no decay tail) must give fewer photons
  // than the full default horizon.
  const auto partial = moments(square(0.5, 5.0), 5.0);
  const auto full = moments(square(0.5, 5.0));
  CHECK(partial.mean_n < full.mean_n);
  CHECK(full.mean_n == doctest::Approx(0.662597036376241614).epsilon(1e-8));
}

TEST_CASE("distribution sums to one within the tail bound") {
  for (int n_max : {4, 8}) {
    const auto dist = photon_distribution(square(0.5, 10.0), n_max);
    double sum = 0.0;
    for (double p : dist.probs) {
      CHECK(p >= -1e-10);
      sum += p;
    }
    CHECK(sum + dist.tail_bound == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sum <= 1.0 + 1e-9);
  }
}

TEST_CASE("piecewise staircase converges to its smooth target") {
  // A fine staircase approximating omega(t) = sin^2(pi t / 8) over [0,8]
  // should agree with the same curve sampled densely by the integrator.
  PiecewiseField fine;
  const int kSteps = 400;
  for (int i = 0; i <= kSteps; ++i) {
    const double t = 8.0 * i / kSteps;
    const double s = std::sin(kPi * t / 8.0);
    fine.samples.push_back({t, s * s, 0.0});
  }
  const auto m_fine = moments(ControlField{fine});

  PiecewiseField coarse;
  for (int i = 0; i <= 40; ++i) {
    const double t = 8.0 * i / 40;
    const double s = std::sin(kPi * t / 8.0);
    coarse.samples.push_back({t, s * s, 0.0});
  }
  const auto m_coarse = moments(ControlField{coarse});
  CHECK(m_fine.mean_n == doctest::Approx(m_coarse.mean_n).epsilon(1e-3));
  CHECK(m_fine.mean_n > 0.1);  // the drive actually does something
}

TEST_CASE("raf defaults: window, conventions, extended readout") {
  RafParams p;
  p.omega = 3.2;
  p.delta_rf = 88.0;
  p.nu_rf = 0.15;

  CHECK(raf_window(p) == doctest::Approx(kPi / 0.15).epsilon(1e-14));
  p.window = 7.5;
  CHECK(raf_window(p) == 7.5);
  p.window = 0.0;

  // The built field carries the angular convention: delta(0) = delta_rf / 2.
  const auto f = make_raf_field(p);
  CHECK(field_at(f, 0.0).delta == doctest::Approx(44.0).epsilon(1e-12));
  const double quarter = 0.5 * kPi / p.nu_rf;
  CHECK(field_at(f, quarter).delta == doctest::Approx(0.0).scale(44.0).epsilon(1e-10));

  // Reference row computed with the angular convention (Gamma = 20 MHz lab
  // values delta_rf = 88 MHz, nu_rf = 3 MHz, omega = 64 MHz).
  const auto dist = raf_distribution(p, 6);
  CHECK(dist.probs[0] == doctest::Approx(0.087464200085).epsilon(1e-6));
  CHECK(dist.probs[1] == doctest::Approx(0.675004795385).epsilon(1e-6));
  CHECK(dist.probs[2] == doctest::Approx(0.202485919693).epsilon(1e-6));
  CHECK(dist.probs[3] == doctest::Approx(0.0315364556).epsilon(1e-5));

  // Extended readout lets residual excitation decay into the counters:
  // counts can only grow, so every cumulative sum P(N <= k) is non-increasing.
  RafParams pe = p;
  pe.extended = true;
  const auto de = raf_distribution(pe, 6);
  double cum = 0.0, cum_ext = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    cum += dist.probs[k];
    cum_ext += de.probs[k];
    CHECK(cum_ext <= cum + 1e-9);
  }
  CHECK(de.probs[0] < dist.probs[0]);  // strictly: some excitation remains
}

TEST_CASE("raf rows reproduce the reference table") {
  struct Row {
    double delta_rf, omega;
    double p0, p1, p2;
  };
  // High-precision references for the angular sweep convention, nu_rf = 0.15.
  constexpr Row kRows[] = {
      {50.0, 3.2, 0.013758345343, 0.528494816617, 0.324502246842},
      {88.0, 3.2, 0.087464200085, 0.675004795385, 0.202485919693},
      {130.0, 3.2, 0.192021568256, 0.676984808336, 0.119474075809},
      {160.0, 5.0, 0.037937372427, 0.720970087385, 0.206334972055},
  };
  for (const Row& r : kRows) {
    CAPTURE(r.delta_rf);
    RafParams p;
    p.omega = r.omega;
    p.delta_rf = r.delta_rf;
    p.nu_rf = 0.15;
    const auto dist = raf_distribution(p, 6);
    CHECK(dist.probs[0] == doctest::Approx(r.p0).epsilon(5e-6));
    CHECK(dist.probs[1] == doctest::Approx(r.p1).epsilon(5e-6));
    CHECK(dist.probs[2] == doctest::Approx(r.p2).epsilon(5e-6));
  }
}

TEST_CASE("input validation propagates through the engine") {
  CHECK_THROWS_AS(photon_distribution(square(-1.0, 1.0), 4), ConfigError);
  CHECK_THROWS_AS(photon_distribution(square(1.0, 1.0), -1), ConfigError);
  CHECK_THROWS_AS(propagate_gf(square(1.0, 1.0), 1.5, 1.0), ConfigError);

  RafParams p;
  p.omega = 1.0;
  p.delta_rf = 5.0;
  p.nu_rf = -0.1;
  CHECK_THROWS_AS(raf_distribution(p, 4), ConfigError);
}
