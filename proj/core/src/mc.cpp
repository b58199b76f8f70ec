#include "photonctl/mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include "photonctl/errors.hpp"
#include "photonctl/ode.hpp"

namespace photonctl {

namespace {

using Amp = std::array<double, 4>;  // Re c_g, Im c_g, Re c_e, Im c_e

// i d/dt c = H_eff c with H = -(d/2) sz + (O/2) sx (sz = |e><e| - |g><g|)
// and the -i/2 |e><e| decay term.
struct AmpRhs {
  const ControlField* field;
  void operator()(const Amp& y, double t, Amp& dy) const {
    const FieldValue f = field_at(*field, t);
    const double hd = 0.5 * f.delta, ho = 0.5 * f.omega;
    const double gr = y[0], gi = y[1], er = y[2], ei = y[3];
    dy[0] = hd * gi + ho * ei;
    dy[1] = -hd * gr - ho * er;
    dy[2] = ho * gi - hd * ei - 0.5 * er;
    dy[3] = -ho * gr + hd * er - 0.5 * ei;
  }
};

double norm2(const Amp& y) {
  return y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
}

// Counterfactual per-trajectory stream: each trajectory's generator depends
// only on (seed, index), so serial and parallel runs agree bit-for-bit.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(mix64(mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1))));
}

double next_uniform(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

constexpr double kDecayCap = 60.0;

// Locate the norm crossing inside an accepted step [t, t+h] by bisection on
// the step length, re-stepping from the same anchor state each probe. The
// norm is non-increasing, so the bracket is valid throughout.
double bisect_jump(const AmpRhs& rhs, const Amp& anchor, double t, double h,
                   double r, Amp& at_jump) {
  double lo = 0.0, hi = h;
  Amp y5 = anchor, y4 = anchor;
  while (hi - lo > 1e-10 * std::max(1.0, t + hi)) {
    const double mid = 0.5 * (lo + hi);
    dopri5_pair(rhs, t, mid, anchor, y5, y4);
    if (norm2(y5) < r) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  dopri5_pair(rhs, t, hi, anchor, y5, y4);
  at_jump = y5;
  return t + hi;
}

struct TrajectoryResult {
  int count = 0;
};

// Integrate the drive window [0, support] adaptively with jump detection,
// then handle the field-free tail analytically: c_g freezes while
// |c_e(t)|^2 decays as e^{-(t-support)}, so the only possible remaining
// crossing time has a closed form.
TrajectoryResult run_trajectory(const ControlField& field, double support,
                                double horizon, const McOptions& opt,
                                std::mt19937_64& rng,
                                TrajectoryRecord* record) {
  const AmpRhs rhs{&field};
  Amp y = {1.0, 0.0, 0.0, 0.0};
  double r = next_uniform(rng);
  TrajectoryResult res;

  auto emit = [&](double tj) {
    ++res.count;
    if (record) record->emission_times.push_back(tj);
  };

  std::vector<double> cuts = breakpoints(field);
  const double drive_end = std::min(support, horizon);
  cuts.push_back(drive_end);
  std::sort(cuts.begin(), cuts.end());

  const double cap = std::min(opt.step_cap_scale / rate_scale(field),
                              min_sample_spacing(field));
  double t = 0.0;
  double h = cap;
  Amp y5 = y, y4 = y;
  for (double seg_end : cuts) {
    if (seg_end <= t || seg_end > drive_end) continue;
    while (t < seg_end) {
      const double h_min =
          16.0 * std::numeric_limits<double>::epsilon() * std::max(t, 1.0);
      if (h < h_min)
        throw IntegrationError("mc trajectory: step size underflow", t, h);
      const bool clipped = h >= seg_end - t;
      const double h_try = clipped ? seg_end - t : h;
      dopri5_pair(rhs, t, h_try, y, y5, y4);
      const double err = ode_error_norm(y, y5, y4, opt.rel_tol, opt.abs_tol);
      if (err > 1.0) {
        h = std::max(0.2, 0.9 * std::pow(err, -0.2)) * h_try;
        continue;
      }
      if (norm2(y5) < r) {
        Amp at_jump;
        const double tj = bisect_jump(rhs, y, t, h_try, r, at_jump);
        emit(tj);
        y = {1.0, 0.0, 0.0, 0.0};  // collapse to ground
        r = next_uniform(rng);
        t = tj;
      } else {
        y = y5;
        t = clipped ? seg_end : t + h_try;
      }
      const double grow =
          err <= 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h = std::min(std::max(grow, 0.2) * h_try, cap);
    }
  }

  // Analytic field-free tail.
  while (t < horizon) {
    const double cg2 = y[0] * y[0] + y[1] * y[1];
    const double ce2 = y[2] * y[2] + y[3] * y[3];
    if (r <= cg2 || ce2 <= 0.0) break;  // norm floor above threshold
    const double tj = t + std::log(ce2 / (r - cg2));
    if (tj > horizon) break;
    emit(tj);
    break;  // ground state plus zero field: no further evolution
  }

  if (record) record->final_time = horizon;
  return res;
}

double wilson_halfwidth(double k, double n) {
  constexpr double z = 1.959963984540054;  // 95%
  const double p = k / n;
  const double denom = 1.0 + z * z / n;
  return z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
}

}  // namespace

McEstimate simulate(const ControlField& field, std::optional<double> horizon,
                    std::uint64_t n_traj, std::uint64_t seed, int n_max,
                    const McOptions& opt,
                    std::vector<TrajectoryRecord>* records) {
  validate(field);
  if (n_traj < 1) throw ConfigError("mc simulate: n_traj must be >= 1");
  if (n_max < 0) throw ConfigError("mc simulate: n_max must be >= 0");
  const double support = support_end(field);
  const double end = horizon ? *horizon : support + kDecayCap;
  if (!(end >= 0.0) || !std::isfinite(end))
    throw ConfigError("mc simulate: horizon must be finite and >= 0");

  if (records) {
    records->clear();
    records->resize(n_traj);
  }

  unsigned hw = opt.threads > 0 ? static_cast<unsigned>(opt.threads)
                                : std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::uint64_t>(hw, n_traj));

  std::vector<std::vector<std::uint64_t>> counts(n_threads);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w]() {
      auto& local = counts[w];
      for (std::uint64_t i = w; i < n_traj; i += n_threads) {
        std::mt19937_64 rng = trajectory_rng(seed, i);
        TrajectoryRecord* rec = records ? &(*records)[i] : nullptr;
        const int k =
            run_trajectory(field, support, end, opt, rng, rec).count;
        if (static_cast<std::size_t>(k) >= local.size()) local.resize(k + 1);
        ++local[k];
      }
    });
  }
  for (auto& th : pool) th.join();

  std::size_t width = static_cast<std::size_t>(n_max) + 1;
  for (const auto& local : counts) width = std::max(width, local.size());
  std::vector<std::uint64_t> total(width, 0);
  for (const auto& local : counts)
    for (std::size_t k = 0; k < local.size(); ++k) total[k] += local[k];

  McEstimate est;
  est.n_traj = n_traj;
  est.seed = seed;
  est.probs.resize(width);
  est.ci_halfwidths.resize(width);
  const double n = static_cast<double>(n_traj);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < width; ++k) {
    const double c = static_cast<double>(total[k]);
    est.probs[k] = c / n;
    est.ci_halfwidths[k] = wilson_halfwidth(c, n);
    m1 += static_cast<double>(k) * c;
    m2 += static_cast<double>(k) * static_cast<double>(k) * c;
  }
  m1 /= n;
  m2 /= n;
  est.mean_n = m1;
  est.mean_se = n > 1 ? std::sqrt(std::max(0.0, m2 - m1 * m1) / (n - 1)) : 0.0;
  return est;
}

void dump_trajectories(std::ostream& os,
                       const std::vector<TrajectoryRecord>& records) {
  for (const auto& rec : records) {
    bool first = true;
    for (double t : rec.emission_times) {
      if (!first) os << '\t';
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12g", t);
      os << buf;
      first = false;
    }
    os << '\n';
  }
}

}  // namespace photonctl
