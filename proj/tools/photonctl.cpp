// photonctl: command-line front end for the photon-statistics engine.
//
// Subcommands:
//   square     closed-form + hierarchy statistics for a square pulse
//   raf        swept-detuning (RAF) drive statistics
//   scan       (omega, T) grid -> CSV
//   optimize   maximize P1 or P2 over drive parameters
//   mc         quantum-jump Monte Carlo estimate
//   reproduce  built-in reference datasets (table1 | fig9 | fig20)
//
// All quantities are in Gamma units (decay rate = 1) unless --gamma-mhz is
// given, in which case rates/frequencies are read in MHz and times in
// microseconds; reports echo both. Exit status: 0 on success, 1 on usage or
// numeric errors, 2 when a reproduce/optimize threshold flag fired.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "photonctl/closed_form.hpp"
#include "photonctl/control_field.hpp"
#include "photonctl/errors.hpp"
#include "photonctl/gf_engine.hpp"
#include "photonctl/mc.hpp"
#include "photonctl/optimize.hpp"
#include "photonctl/run_config.hpp"
#include "photonctl/units.hpp"

using json = nlohmann::ordered_json;
using namespace photonctl;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string fmt12(double v) { return fmt(v, 12); }

struct Units {
  EmitterParams emitter;

  bool mhz() const { return emitter.gamma_mhz.has_value(); }
  // Convert a CLI input to Gamma units (identity without --gamma-mhz).
  double in(double v, UnitKind k) const {
    return mhz() ? to_dimensionless(emitter, v, k) : v;
  }
  // Echo string: dimensionless value plus the laboratory value when known.
  std::string echo(double v, UnitKind k) const {
    const char* unit = k == UnitKind::Time ? "1/Gamma" : "Gamma";
    std::string s = fmt(v) + " " + unit;
    if (mhz()) {
      const double lab = from_dimensionless(emitter, v, k);
      s += " (" + fmt(lab) + (k == UnitKind::Time ? " us" : " MHz") + ")";
    }
    return s;
  }
  json jparam(double v, UnitKind k) const {
    json j;
    j["gamma_units"] = v;
    if (mhz())
      j[k == UnitKind::Time ? "us" : "mhz"] = from_dimensionless(emitter, v, k);
    return j;
  }
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// Print fired threshold flags, attach wall time, write the JSON mirror.
int finish(json& rep, const Timer& timer, const std::string& json_path,
           const std::vector<std::string>& flags) {
  rep["flags_fired"] = flags;
  rep["wall_ms"] = timer.ms();
  std::printf("wall_ms: %s\n", fmt(timer.ms(), 4).c_str());
  for (const auto& f : flags) std::printf("flag: %s\n", f.c_str());
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw ConfigError("cannot open json report path: " + json_path);
    out << rep.dump(2) << "\n";
  }
  return flags.empty() ? 0 : 2;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PHOTONCTL_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw ConfigError(std::string("PHOTONCTL_SEED is not an integer: ") +
                        env);
    return v;
  }
  return 1;
}

// Grid spec: "a,b,c" explicit | "lo:hi:n" linear | "log:lo:hi:n" geometric.
std::vector<double> parse_grid(const std::string& spec, const char* what) {
  auto bad = [&](const std::string& why) {
    throw ConfigError(std::string(what) + " grid '" + spec + "': " + why);
  };
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) bad("'" + s + "' is not a number");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      bad("'" + s + "' is not a number");
      return 0.0;
    }
  };
  std::vector<std::string> parts;
  std::string chunk;
  std::istringstream in(spec);
  const char sep = spec.find(':') != std::string::npos ? ':' : ',';
  while (std::getline(in, chunk, sep)) parts.push_back(chunk);
  if (parts.empty()) bad("empty");

  std::vector<double> out;
  if (sep == ',') {
    for (const auto& p : parts) out.push_back(num(p));
    return out;
  }
  const bool log = parts[0] == "log";
  if (log) parts.erase(parts.begin());
  if (parts.size() != 3) bad("expected [log:]lo:hi:n");
  const double lo = num(parts[0]), hi = num(parts[1]);
  const int n = static_cast<int>(num(parts[2]));
  if (n < 1) bad("n must be >= 1");
  if (log && !(lo > 0 && hi > 0)) bad("log grid needs positive bounds");
  if (n == 1) return {lo};
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    out.push_back(log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  return out;
}

json dist_json(const PhotonDistribution& d) {
  json j;
  j["p"] = d.probs;
  j["tail_bound"] = d.tail_bound;
  j["method"] = d.method == DistributionMethod::kClosedForm ? "closed-form"
                : d.method == DistributionMethod::kHierarchy ? "hierarchy"
                                                             : "monte-carlo";
  if (!d.ci_halfwidths.empty()) j["ci_halfwidths"] = d.ci_halfwidths;
  return j;
}

// ---------------------------------------------------------------------- //
// square

struct SquareArgs {
  double omega = kNaN, duration = kNaN;
  int n_max = 6;
  double horizon = kNaN;  // NaN = auto
  double gamma_mhz = 0.0;
  std::string config, json_path;
};

int cmd_square(const SquareArgs& a) {
  Timer timer;
  Units u;
  if (a.gamma_mhz > 0) u.emitter.gamma_mhz = a.gamma_mhz;

  SquarePulse pulse;
  if (!a.config.empty()) {
    const ControlField f =
        field_from_config(RunConfig::parse_file(a.config), u.emitter);
    const auto* sq = std::get_if<SquarePulse>(&f);
    if (!sq) throw ConfigError("square: config does not define field=square");
    pulse = *sq;
  } else {
    if (std::isnan(a.omega) || std::isnan(a.duration))
      throw ConfigError("square: --omega and --duration are required");
    pulse.omega = u.in(a.omega, UnitKind::Rate);
    pulse.duration = u.in(a.duration, UnitKind::Time);
  }
  const std::optional<double> horizon =
      std::isnan(a.horizon) ? std::optional<double>{}
                            : std::optional<double>{u.in(a.horizon,
                                                         UnitKind::Time)};

  std::printf("command: square\nparameters:\n");
  std::printf("  omega    = %s\n", u.echo(pulse.omega, UnitKind::Rate).c_str());
  std::printf("  duration = %s\n",
              u.echo(pulse.duration, UnitKind::Time).c_str());
  std::printf("  n_max    = %d\n", a.n_max);
  if (horizon)
    std::printf("  horizon  = %s\n", u.echo(*horizon, UnitKind::Time).c_str());
  else
    std::printf("  horizon  = auto (support + free decay)\n");

  const GfOptions gf;
  std::printf("tolerances: rel_tol=%g abs_tol=%g\n", gf.rel_tol, gf.abs_tol);

  const ControlField field = pulse;
  const PhotonDistribution dist =
      photon_distribution(field, a.n_max, horizon, gf);
  const Moments mom = moments(field, horizon, gf);
  const auto ctx = SquarePulseContext::make(pulse.omega, pulse.duration);
  const double cf[3] = {cf_pn(ctx, 0), cf_pn(ctx, 1), cf_pn(ctx, 2)};
  const double cf_mean = cf_mean_n(ctx), cf_f2 = cf_fac2(ctx);

  std::printf("results:\n  %-3s %-14s %-14s %s\n", "n", "closed_form",
              "hierarchy", "|diff|");
  for (int n = 0; n <= a.n_max; ++n) {
    if (n <= 2)
      std::printf("  %-3d %-14s %-14s %s\n", n, fmt(cf[n]).c_str(),
                  fmt(dist.probs[n]).c_str(),
                  fmt(std::abs(cf[n] - dist.probs[n]), 3).c_str());
    else
      std::printf("  %-3d %-14s %-14s\n", n, "-", fmt(dist.probs[n]).c_str());
  }
  double sum = 0;
  for (double p : dist.probs) sum += p;
  std::printf("  sum_p = %s  tail_bound = %s\n", fmt(sum).c_str(),
              fmt(dist.tail_bound, 3).c_str());
  std::printf("  mean_n = %s  (closed form %s, |diff| %s)\n",
              fmt(mom.mean_n).c_str(), fmt(cf_mean).c_str(),
              fmt(std::abs(mom.mean_n - cf_mean), 3).c_str());
  std::printf("  fac2   = %s  (closed form %s, |diff| %s)\n",
              fmt(mom.fac2).c_str(), fmt(cf_f2).c_str(),
              fmt(std::abs(mom.fac2 - cf_f2), 3).c_str());
  std::printf("  Q      = %s\n", fmt(mom.q).c_str());

  json rep;
  rep["command"] = "square";
  rep["parameters"]["omega"] = u.jparam(pulse.omega, UnitKind::Rate);
  rep["parameters"]["duration"] = u.jparam(pulse.duration, UnitKind::Time);
  rep["parameters"]["n_max"] = a.n_max;
  rep["parameters"]["horizon"] =
      horizon ? json(*horizon) : json("auto");
  rep["tolerances"] = {{"rel_tol", gf.rel_tol}, {"abs_tol", gf.abs_tol}};
  rep["results"] = dist_json(dist);
  rep["results"]["closed_form"] = {cf[0], cf[1], cf[2]};
  rep["results"]["mean_n"] = mom.mean_n;
  rep["results"]["fac2"] = mom.fac2;
  rep["results"]["q"] = mom.q;
  return finish(rep, timer, a.json_path, {});
}

// ---------------------------------------------------------------------- //
// raf

struct RafArgs {
  double omega = kNaN, delta_rf = kNaN, nu_rf = kNaN;
  double phase = 0.0, window = 0.0;
  bool extended = false;
  int n_max = 5;
  double gamma_mhz = 0.0;
  std::string config, json_path;
};

int cmd_raf(const RafArgs& a) {
  Timer timer;
  Units u;
  if (a.gamma_mhz > 0) u.emitter.gamma_mhz = a.gamma_mhz;

  RafParams p;
  if (!a.config.empty()) {
    const RunConfig cfg = RunConfig::parse_file(a.config);
    if (cfg.text_or("field", "") != "raf")
      throw ConfigError("raf: config does not define field=raf");
    p.omega = u.in(cfg.number("omega"), UnitKind::Rate);
    p.delta_rf = u.in(cfg.number("delta_rf"), UnitKind::Rate);
    p.nu_rf = u.in(cfg.number("nu_rf"), UnitKind::Frequency);
    p.phase = cfg.number_or("phase", 0.0);
    p.window = cfg.has("window") ? u.in(cfg.number("window"), UnitKind::Time)
                                 : 0.0;
  } else {
    if (std::isnan(a.omega) || std::isnan(a.delta_rf) || std::isnan(a.nu_rf))
      throw ConfigError("raf: --omega, --delta-rf and --nu-rf are required");
    p.omega = u.in(a.omega, UnitKind::Rate);
    p.delta_rf = u.in(a.delta_rf, UnitKind::Rate);
    p.nu_rf = u.in(a.nu_rf, UnitKind::Frequency);
    p.phase = a.phase;
    p.window = a.window > 0 ? u.in(a.window, UnitKind::Time) : 0.0;
  }
  p.extended = a.extended;
  const double window = raf_window(p);

  std::printf("command: raf\nparameters:\n");
  std::printf("  omega    = %s\n", u.echo(p.omega, UnitKind::Rate).c_str());
  std::printf("  delta_rf = %s\n", u.echo(p.delta_rf, UnitKind::Rate).c_str());
  std::printf("  nu_rf    = %s  (angular sweep rate)\n",
              u.echo(p.nu_rf, UnitKind::Frequency).c_str());
  std::printf("  phase    = %s rad\n", fmt(p.phase).c_str());
  std::printf("  window   = %s%s\n", u.echo(window, UnitKind::Time).c_str(),
              p.window > 0 ? "" : "  [default: half sweep period pi/nu_rf]");
  std::printf("  extended = %s  (%s)\n", p.extended ? "yes" : "no",
              p.extended ? "free decay appended after the window"
                         : "counting stops at the window edge");
  std::printf("  n_max    = %d\n", a.n_max);
  std::printf("convention: delta(t) = (delta_rf/2) cos(nu_rf t + phase)\n");

  const GfOptions gf;
  std::printf("tolerances: rel_tol=%g abs_tol=%g\n", gf.rel_tol, gf.abs_tol);
  const PhotonDistribution dist = raf_distribution(p, a.n_max, gf);

  std::printf("results:\n  %-3s %s\n", "n", "P_n");
  for (int n = 0; n <= a.n_max; ++n)
    std::printf("  %-3d %s\n", n, fmt(dist.probs[n]).c_str());
  std::printf("  tail_bound = %s\n", fmt(dist.tail_bound, 3).c_str());

  json rep;
  rep["command"] = "raf";
  rep["parameters"]["omega"] = u.jparam(p.omega, UnitKind::Rate);
  rep["parameters"]["delta_rf"] = u.jparam(p.delta_rf, UnitKind::Rate);
  rep["parameters"]["nu_rf"] = u.jparam(p.nu_rf, UnitKind::Frequency);
  rep["parameters"]["phase"] = p.phase;
  rep["parameters"]["window"] = u.jparam(window, UnitKind::Time);
  rep["parameters"]["extended"] = p.extended;
  rep["parameters"]["n_max"] = a.n_max;
  rep["tolerances"] = {{"rel_tol", gf.rel_tol}, {"abs_tol", gf.abs_tol}};
  rep["results"] = dist_json(dist);
  return finish(rep, timer, a.json_path, {});
}

// ---------------------------------------------------------------------- //
// scan

struct ScanArgs {
  std::string omega_spec, t_spec, out, target = "all";
  double gamma_mhz = 0.0;
  std::string json_path;
};

int cmd_scan(const ScanArgs& a) {
  Timer timer;
  Units u;
  if (a.gamma_mhz > 0) u.emitter.gamma_mhz = a.gamma_mhz;
  if (a.target != "all" && a.target != "p1" && a.target != "p2")
    throw ConfigError("scan: --target must be p1, p2, or all");

  std::vector<double> omegas = parse_grid(a.omega_spec, "omega");
  std::vector<double> ts = parse_grid(a.t_spec, "duration");
  for (double& w : omegas) w = u.in(w, UnitKind::Rate);
  for (double& t : ts) t = u.in(t, UnitKind::Time);

  struct Row {
    double omega, t, p[3], mean, q;
  };
  std::vector<Row> rows;
  rows.reserve(omegas.size() * ts.size());
  for (double w : omegas) {  // omega-major row order
    for (double t : ts) {
      const auto ctx = SquarePulseContext::make(w, t);
      Row r{w, t, {cf_pn(ctx, 0), cf_pn(ctx, 1), cf_pn(ctx, 2)},
            cf_mean_n(ctx), cf_q(ctx)};
      rows.push_back(r);
    }
  }

  std::ofstream out(a.out);
  if (!out) throw ConfigError("scan: cannot open output path: " + a.out);
  out << "omega,T,p0,p1,p2,mean_n,q\n";
  for (const Row& r : rows)
    out << fmt12(r.omega) << ',' << fmt12(r.t) << ',' << fmt12(r.p[0]) << ','
        << fmt12(r.p[1]) << ',' << fmt12(r.p[2]) << ',' << fmt12(r.mean) << ','
        << fmt12(r.q) << '\n';
  out.close();

  // Grid summary: best objective value and where it sits.
  const int obj_idx = a.target == "p2" ? 2 : 1;
  const Row* best = &rows.front();
  for (const Row& r : rows)
    if (r.p[obj_idx] > best->p[obj_idx]) best = &r;

  std::printf("command: scan\n");
  std::printf("grid: %zu omega x %zu T = %zu rows (omega-major)\n",
              omegas.size(), ts.size(), rows.size());
  std::printf("wrote: %s\n", a.out.c_str());
  std::printf("grid max %s = %s at omega=%s T=%s\n",
              obj_idx == 1 ? "p1" : "p2", fmt(best->p[obj_idx]).c_str(),
              fmt(best->omega).c_str(), fmt(best->t).c_str());

  json rep;
  rep["command"] = "scan";
  rep["parameters"]["omega"] = omegas;
  rep["parameters"]["T"] = ts;
  rep["parameters"]["target"] = a.target;
  rep["results"]["rows"] = rows.size();
  rep["results"]["out"] = a.out;
  rep["results"]["grid_max"] = {{"objective", obj_idx == 1 ? "p1" : "p2"},
                                {"value", best->p[obj_idx]},
                                {"omega", best->omega},
                                {"T", best->t}};
  return finish(rep, timer, a.json_path, {});
}

// ---------------------------------------------------------------------- //
// optimize

struct OptimizeArgs {
  std::string target, field = "square";
  double omega_min = kNaN, omega_max = kNaN;
  double t_min = 0.01, t_max = 50.0;
  double delta_rf_min = kNaN, delta_rf_max = kNaN, nu_rf = kNaN;
  bool two_pi = false;
  double gamma_mhz = 0.0;
  std::string json_path;
};

void print_opt(const OptResult& r, const std::vector<std::string>& names) {
  std::printf("results:\n");
  for (std::size_t i = 0; i < r.argmax.size(); ++i)
    std::printf("  argmax %-9s = %s  (bracket +-%s)\n", names[i].c_str(),
                fmt(r.argmax[i], 9).c_str(), fmt(r.bracket[i], 3).c_str());
  std::printf("  value            = %s\n", fmt(r.value, 9).c_str());
  std::printf("  evaluations      = %llu\n",
              static_cast<unsigned long long>(r.iterations));
  std::printf("  certified        = %s  (argmax beats all probe points at "
              "+-bracket)\n",
              r.certified ? "yes" : "no");
}

json opt_json(const OptResult& r, const std::vector<std::string>& names) {
  json j;
  for (std::size_t i = 0; i < r.argmax.size(); ++i) {
    j["argmax"][names[i]] = r.argmax[i];
    j["bracket"][names[i]] = r.bracket[i];
  }
  j["value"] = r.value;
  j["evaluations"] = r.iterations;
  j["certified"] = r.certified;
  return j;
}

// Certificate probe table around a square-pulse argmax.
void print_square_probes(Objective obj, const OptResult& r) {
  std::printf("  certificate probes (objective at argmax offset):\n");
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      if (dx == 0 && dy == 0) continue;
      if (dx != 0 && (r.argmax.size() < 2 || r.bracket[0] == 0)) continue;
      const double w =
          std::max(1e-12, r.argmax[0] + dx * (r.bracket.empty() ? 0
                                                                : r.bracket[0]));
      const double t = std::max(
          1e-12, r.argmax[1] + dy * (r.bracket.size() > 1 ? r.bracket[1] : 0));
      const double v =
          cf_pn(SquarePulseContext::make(w, t), obj == Objective::kP1 ? 1 : 2);
      std::printf("    omega%+d T%+d: %s\n", dx, dy, fmt(v, 9).c_str());
    }
  }
}

int cmd_optimize(const OptimizeArgs& a) {
  Timer timer;
  Units u;
  if (a.gamma_mhz > 0) u.emitter.gamma_mhz = a.gamma_mhz;
  const Objective obj = a.target == "p1"   ? Objective::kP1
                        : a.target == "p2" ? Objective::kP2
                                           : throw ConfigError(
                                                 "optimize: --target must be "
                                                 "p1 or p2");
  if (std::isnan(a.omega_min) || std::isnan(a.omega_max))
    throw ConfigError("optimize: --omega-min and --omega-max are required");
  const double w_lo = u.in(a.omega_min, UnitKind::Rate);
  const double w_hi = u.in(a.omega_max, UnitKind::Rate);
  const double t_lo = u.in(a.t_min, UnitKind::Time);
  const double t_hi = u.in(a.t_max, UnitKind::Time);

  std::printf("command: optimize\nparameters:\n");
  std::printf("  target = %s, field = %s\n", a.target.c_str(),
              a.field.c_str());
  std::printf("  omega in [%s, %s]\n", u.echo(w_lo, UnitKind::Rate).c_str(),
              u.echo(w_hi, UnitKind::Rate).c_str());

  json rep;
  rep["command"] = "optimize";
  rep["parameters"]["target"] = a.target;
  rep["parameters"]["field"] = a.field;
  rep["parameters"]["omega_range"] = {w_lo, w_hi};

  OptResult r;
  std::vector<std::string> names;
  if (a.field == "square") {
    std::printf("  T in [%s, %s]\n", u.echo(t_lo, UnitKind::Time).c_str(),
                u.echo(t_hi, UnitKind::Time).c_str());
    rep["parameters"]["t_range"] = {t_lo, t_hi};
    if (a.two_pi) {
      if (obj != Objective::kP2)
        throw ConfigError("optimize: --two-pi applies to --target p2");
      if (w_lo != w_hi)
        throw ConfigError("optimize: --two-pi needs a pinned omega "
                          "(omega-min == omega-max)");
      r = maximize_p2_two_pi(w_lo, {t_lo, t_hi});
      names = {"omega", "T"};
      std::printf("  constraint: omega*T = 2 pi n\n");
    } else if (w_lo == w_hi) {
      r = maximize_over_t(obj, w_lo, {t_lo, t_hi});
      names = {"omega", "T"};
    } else {
      r = maximize_global(obj, {w_lo, w_hi}, {t_lo, t_hi});
      names = {"omega", "T"};
    }
    print_opt(r, names);
    if (!a.two_pi) print_square_probes(obj, r);
  } else if (a.field == "raf") {
    if (std::isnan(a.delta_rf_min) || std::isnan(a.delta_rf_max) ||
        std::isnan(a.nu_rf))
      throw ConfigError("optimize: raf needs --delta-rf-min, --delta-rf-max "
                        "and --nu-rf");
    const double d_lo = u.in(a.delta_rf_min, UnitKind::Rate);
    const double d_hi = u.in(a.delta_rf_max, UnitKind::Rate);
    const double nu = u.in(a.nu_rf, UnitKind::Frequency);
    std::printf("  delta_rf in [%s, %s], nu_rf = %s\n",
                u.echo(d_lo, UnitKind::Rate).c_str(),
                u.echo(d_hi, UnitKind::Rate).c_str(),
                u.echo(nu, UnitKind::Frequency).c_str());
    rep["parameters"]["delta_rf_range"] = {d_lo, d_hi};
    rep["parameters"]["nu_rf"] = nu;
    r = maximize_raf(obj, {w_lo, w_hi}, {d_lo, d_hi}, nu);
    names = {"omega", "delta_rf"};
    print_opt(r, names);
  } else {
    throw ConfigError("optimize: --field must be square or raf");
  }

  rep["results"] = opt_json(r, names);
  std::vector<std::string> flags;
  if (!r.certified)
    flags.push_back("optimum not certified against probe points");
  return finish(rep, timer, a.json_path, flags);
}

// ---------------------------------------------------------------------- //
// mc

struct McArgs {
  std::string field = "square";
  double omega = kNaN, duration = kNaN;
  double delta_rf = kNaN, nu_rf = kNaN, phase = 0.0, window = 0.0;
  bool extended = false;
  std::uint64_t n_traj = 10000;
  std::optional<std::uint64_t> seed;
  int n_max = 8;
  double horizon = kNaN;
  int threads = 0;
  double gamma_mhz = 0.0;
  std::string config, dump, json_path;
};

int cmd_mc(const McArgs& a) {
  Timer timer;
  Units u;
  if (a.gamma_mhz > 0) u.emitter.gamma_mhz = a.gamma_mhz;
  const std::uint64_t seed = resolve_seed(a.seed);

  ControlField field;
  std::optional<double> horizon;
  std::string field_desc;
  if (!a.config.empty()) {
    field = field_from_config(RunConfig::parse_file(a.config), u.emitter);
    field_desc = "config " + a.config;
  } else if (a.field == "square") {
    if (std::isnan(a.omega) || std::isnan(a.duration))
      throw ConfigError("mc: square needs --omega and --duration");
    field = SquarePulse{u.in(a.omega, UnitKind::Rate),
                        u.in(a.duration, UnitKind::Time)};
    field_desc = "square omega=" + fmt(u.in(a.omega, UnitKind::Rate)) +
                 " T=" + fmt(u.in(a.duration, UnitKind::Time));
  } else if (a.field == "raf") {
    if (std::isnan(a.omega) || std::isnan(a.delta_rf) || std::isnan(a.nu_rf))
      throw ConfigError("mc: raf needs --omega, --delta-rf and --nu-rf");
    RafParams p;
    p.omega = u.in(a.omega, UnitKind::Rate);
    p.delta_rf = u.in(a.delta_rf, UnitKind::Rate);
    p.nu_rf = u.in(a.nu_rf, UnitKind::Frequency);
    p.phase = a.phase;
    p.window = a.window > 0 ? u.in(a.window, UnitKind::Time) : 0.0;
    field = make_raf_field(p);
    // Match raf_distribution's readout: count inside the window unless the
    // run is marked extended (then free decay is included via auto horizon).
    if (!a.extended) horizon = raf_window(p);
    field_desc = "raf omega=" + fmt(p.omega) + " delta_rf=" + fmt(p.delta_rf) +
                 " nu_rf=" + fmt(p.nu_rf);
  } else {
    throw ConfigError("mc: --field must be square or raf (or use --config)");
  }
  if (!std::isnan(a.horizon)) horizon = u.in(a.horizon, UnitKind::Time);

  validate(field);
  McOptions opt;
  opt.threads = a.threads;

  std::printf("command: mc\nparameters:\n");
  std::printf("  field   = %s\n", field_desc.c_str());
  std::printf("  n_traj  = %llu\n", static_cast<unsigned long long>(a.n_traj));
  std::printf("  seed    = %llu\n", static_cast<unsigned long long>(seed));
  std::printf("  n_max   = %d\n", a.n_max);
  if (horizon)
    std::printf("  horizon = %s\n", u.echo(*horizon, UnitKind::Time).c_str());
  else
    std::printf("  horizon = auto (support + free decay)\n");
  std::printf("tolerances: rel_tol=%g abs_tol=%g\n", opt.rel_tol, opt.abs_tol);

  std::vector<TrajectoryRecord> records;
  const McEstimate est =
      simulate(field, horizon, a.n_traj, seed, a.n_max,
               opt, a.dump.empty() ? nullptr : &records);

  // Reference distribution from the deterministic hierarchy.
  GfOptions gf;
  const PhotonDistribution ref = photon_distribution(
      field, static_cast<int>(est.probs.size()) - 1, horizon, gf);

  std::printf("results:\n  %-3s %-12s %-12s %-12s %s\n", "n", "p_hat",
              "ci95_half", "hierarchy", "|dev|/ci");
  for (std::size_t n = 0; n < est.probs.size(); ++n) {
    const double dev = std::abs(est.probs[n] - ref.probs[n]);
    std::printf("  %-3zu %-12s %-12s %-12s %s\n", n, fmt(est.probs[n]).c_str(),
                fmt(est.ci_halfwidths[n], 3).c_str(),
                fmt(ref.probs[n]).c_str(),
                est.ci_halfwidths[n] > 0 ? fmt(dev / est.ci_halfwidths[n], 3)
                                               .c_str()
                                         : "-");
  }
  std::printf("  mean_n = %s +- %s (se)\n", fmt(est.mean_n).c_str(),
              fmt(est.mean_se, 3).c_str());

  if (!a.dump.empty()) {
    std::ofstream out(a.dump);
    if (!out) throw ConfigError("mc: cannot open dump path: " + a.dump);
    dump_trajectories(out, records);
    std::printf("dumped %zu trajectories to %s\n", records.size(),
                a.dump.c_str());
  }

  json rep;
  rep["command"] = "mc";
  rep["parameters"]["field"] = field_desc;
  rep["parameters"]["n_traj"] = a.n_traj;
  rep["parameters"]["n_max"] = a.n_max;
  rep["parameters"]["horizon"] = horizon ? json(*horizon) : json("auto");
  rep["parameters"]["threads"] = a.threads;
  rep["seed"] = seed;
  rep["tolerances"] = {{"rel_tol", opt.rel_tol}, {"abs_tol", opt.abs_tol}};
  rep["results"]["p_hat"] = est.probs;
  rep["results"]["ci_halfwidths"] = est.ci_halfwidths;
  rep["results"]["hierarchy"] = ref.probs;
  rep["results"]["mean_n"] = est.mean_n;
  rep["results"]["mean_se"] = est.mean_se;
  return finish(rep, timer, a.json_path, {});
}

// ---------------------------------------------------------------------- //
// reproduce

struct ReproduceArgs {
  std::string target, out, json_path;
};

struct Table1Row {
  double delta_rf, nu_mhz, omega;
  double ref[3];
};

// Published reference rows: (delta_rf, nu_rf in MHz, omega) -> P0, P1, P2 at
// emitter Gamma = 20 MHz (so nu_rf = 3 MHz reads as 0.15 Gamma, angular).
constexpr Table1Row kTable1[] = {
    {50.0, 3.0, 3.2, {0.01, 0.53, 0.32}},
    {88.0, 3.0, 3.2, {0.09, 0.68, 0.20}},
    {130.0, 3.0, 3.2, {0.24, 0.66, 0.10}},
    {160.0, 3.0, 5.0, {0.04, 0.72, 0.21}},
};
constexpr double kTable1GammaMhz = 20.0;
constexpr double kTable1Tol = 0.03;

int reproduce_table1(const ReproduceArgs& a) {
  Timer timer;
  EmitterParams emitter;
  emitter.gamma_mhz = kTable1GammaMhz;

  std::printf("command: reproduce table1\n");
  std::printf("emitter: Gamma = %g MHz\n", kTable1GammaMhz);
  std::printf("conventions: delta(t) = (delta_rf/2) cos(nu_rf t), phase = 0, "
              "window = pi/nu_rf (one crossing), readout at window edge\n");
  std::printf("tolerance per entry: %.2f absolute\n", kTable1Tol);

  json rows = json::array();
  std::vector<std::string> flags;
  std::ostringstream csv;
  csv << "delta_rf,nu_rf,omega,p0,p1,p2,ref_p0,ref_p1,ref_p2\n";

  std::printf("  %-9s %-6s  %-9s %-6s %-8s %-9s %-6s %-8s %-9s %-6s %-8s\n",
              "delta_rf", "omega", "p0", "ref", "|dev|", "p1", "ref", "|dev|",
              "p2", "ref", "|dev|");
  int worst_n = -1;
  double worst_dev = 0;
  for (const Table1Row& row : kTable1) {
    RafParams p;
    p.omega = row.omega;
    p.delta_rf = row.delta_rf;
    p.nu_rf = to_dimensionless(emitter, row.nu_mhz, UnitKind::Frequency);
    const PhotonDistribution dist = raf_distribution(p, 6, {});
    double dev[3];
    for (int n = 0; n < 3; ++n) dev[n] = std::abs(dist.probs[n] - row.ref[n]);
    std::printf("  %-9s %-6s  %-9s %-6s %-8s %-9s %-6s %-8s %-9s %-6s %-8s\n",
                fmt(row.delta_rf).c_str(), fmt(row.omega).c_str(),
                fmt(dist.probs[0]).c_str(), fmt(row.ref[0]).c_str(),
                fmt(dev[0], 3).c_str(), fmt(dist.probs[1]).c_str(),
                fmt(row.ref[1]).c_str(), fmt(dev[1], 3).c_str(),
                fmt(dist.probs[2]).c_str(), fmt(row.ref[2]).c_str(),
                fmt(dev[2], 3).c_str());
    csv << fmt12(row.delta_rf) << ',' << fmt12(p.nu_rf) << ','
        << fmt12(row.omega) << ',' << fmt12(dist.probs[0]) << ','
        << fmt12(dist.probs[1]) << ',' << fmt12(dist.probs[2]) << ','
        << fmt12(row.ref[0]) << ',' << fmt12(row.ref[1]) << ','
        << fmt12(row.ref[2]) << '\n';
    json jr;
    jr["delta_rf"] = row.delta_rf;
    jr["omega"] = row.omega;
    jr["computed"] = {dist.probs[0], dist.probs[1], dist.probs[2]};
    jr["reference"] = {row.ref[0], row.ref[1], row.ref[2]};
    jr["abs_dev"] = {dev[0], dev[1], dev[2]};
    rows.push_back(jr);
    for (int n = 0; n < 3; ++n) {
      if (dev[n] > worst_dev) {
        worst_dev = dev[n];
        worst_n = n;
      }
      if (dev[n] > kTable1Tol)
        flags.push_back("delta_rf=" + fmt(row.delta_rf) + " P" +
                        std::to_string(n) + " deviates " + fmt(dev[n], 3) +
                        " (> " + fmt(kTable1Tol) + ")");
    }
  }
  int within = 0;
  for (const auto& jr : rows)
    for (const auto& d : jr["abs_dev"])
      if (d.get<double>() <= kTable1Tol) ++within;
  std::printf("entries within %.2f: %d of %d (worst |dev| %s on P%d)\n",
              kTable1Tol, within, 12, fmt(worst_dev, 3).c_str(), worst_n);
  if (!flags.empty())
    std::printf("note: the delta_rf=130 row's P0 is known to sit ~0.05 from "
                "the reference value under these conventions while the other "
                "eleven entries agree within 0.02; see README "
                "(reference-data notes).\n");

  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw ConfigError("reproduce: cannot open: " + a.out);
    out << csv.str();
    std::printf("wrote: %s\n", a.out.c_str());
  }

  json rep;
  rep["command"] = "reproduce";
  rep["parameters"]["target"] = "table1";
  rep["parameters"]["gamma_mhz"] = kTable1GammaMhz;
  rep["tolerances"]["per_entry"] = kTable1Tol;
  rep["results"]["rows"] = rows;
  rep["results"]["entries_within_tol"] = within;
  return finish(rep, timer, a.json_path, flags);
}

// Shared omega grid for the maxima-vs-omega bundles: log-spaced plus the
// anchor points themselves.
std::vector<double> fig_grid() {
  std::vector<double> ws;
  for (int i = 0; i < 25; ++i)
    ws.push_back(0.05 * std::pow(20.0 / 0.05, i / 24.0));
  for (double anchor : {0.05, 0.5, 10.0}) ws.push_back(anchor);
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end(),
                       [](double a, double b) { return std::abs(a - b) <
                                                       1e-12; }),
           ws.end());
  return ws;
}

struct Anchor {
  std::string name;
  double computed, reference, tol;
  bool relative;
  bool ok() const {
    const double dev = std::abs(computed - reference);
    return relative ? dev <= tol * std::abs(reference) : dev <= tol;
  }
  std::string line() const {
    std::string s = name + ": computed " + fmt(computed) + ", reference " +
                    fmt(reference) + ", dev " +
                    fmt(std::abs(computed - reference), 3) +
                    (relative ? " (rel tol " : " (abs tol ") + fmt(tol) + ") " +
                    (ok() ? "ok" : "VIOLATED");
    return s;
  }
};

int reproduce_fig(const ReproduceArgs& a, Objective obj) {
  Timer timer;
  const bool p1 = obj == Objective::kP1;
  const char* tag = p1 ? "fig9" : "fig20";
  std::printf("command: reproduce %s\n", tag);
  std::printf("grid: 25 log-spaced omega in [0.05, 20] plus anchor points\n");

  const std::vector<double> ws = fig_grid();
  std::ostringstream csv;
  csv << "omega," << (p1 ? "p1_max" : "p2_max") << ",argmax_T,note\n";
  json rows = json::array();
  double at_005 = 0, at_05 = 0, t_at_05 = 0, at_10 = 0;
  for (double w : ws) {
    const double t_hi =
        std::min(2000.0, std::max(50.0, (p1 ? 8.0 : 16.0) / (w * w)));
    const OptResult r = maximize_over_t(obj, w, {0.01, t_hi});
    std::string note;
    if (std::abs(w - 0.05) < 1e-12) {
      at_005 = r.value;
      note = p1 ? "anchor:semi-classical e^-1" : "anchor:semi-classical 2e^-2";
    } else if (std::abs(w - 0.5) < 1e-12 && p1) {
      at_05 = r.value;
      t_at_05 = r.argmax[1];
      note = "anchor:intermediate";
    } else if (std::abs(w - 10.0) < 1e-12 && p1) {
      at_10 = r.value;
      note = "anchor:strong-field asymptote";
    }
    csv << fmt12(w) << ',' << fmt12(r.value) << ',' << fmt12(r.argmax[1])
        << ',' << note << '\n';
    json jr;
    jr["omega"] = w;
    jr[p1 ? "p1_max" : "p2_max"] = r.value;
    jr["argmax_T"] = r.argmax[1];
    if (!note.empty()) jr["note"] = note;
    rows.push_back(jr);
  }

  std::vector<Anchor> anchors;
  if (p1) {
    anchors.push_back({"semi-classical limit (omega=0.05) vs e^-1", at_005,
                       std::exp(-1.0), 0.02, true});
    anchors.push_back({"intermediate (omega=0.5) value", at_05, 0.56, 0.01,
                       false});
    anchors.push_back({"intermediate (omega=0.5) argmax T", t_at_05, 6.75,
                       0.1, false});
    anchors.push_back({"strong field (omega=10) vs asymptote", at_10,
                       p1max_strong_asymptote(10.0), 0.01, true});
  } else {
    const OptResult g = maximize_global(obj, {0.05, 20.0}, {0.01, 50.0});
    anchors.push_back({"global maximum value", g.value, 0.56, 0.01, false});
    anchors.push_back({"global maximum omega", g.argmax[0], 1.25, 0.05,
                       false});
    anchors.push_back({"global maximum T", g.argmax[1], 4.86, 0.1, false});
    const OptResult env = maximize_p2_envelope_two_pi();
    const double t61 = 2.0 * (std::sqrt(61.0) - 1.0) / 5.0;
    anchors.push_back({"strong-field 2pi-pulse envelope max", env.value, 0.41,
                       0.01, false});
    anchors.push_back({"strong-field 2pi-pulse envelope argmax T",
                       env.argmax[0], t61, 0.02, false});
    const OptResult tp = maximize_p2_two_pi(50.0);
    std::printf("exact 2pi-pulse check at omega=50: value %s at T = %s "
                "(envelope %s at %s)\n",
                fmt(tp.value).c_str(), fmt(tp.argmax[1]).c_str(),
                fmt(env.value).c_str(), fmt(env.argmax[0]).c_str());
    anchors.push_back({"semi-classical limit (omega=0.05) vs 2e^-2", at_005,
                       2.0 * std::exp(-2.0), 0.02, true});
  }

  std::vector<std::string> flags;
  std::printf("anchors:\n");
  for (const Anchor& an : anchors) {
    std::printf("  %s\n", an.line().c_str());
    if (!an.ok()) flags.push_back(an.name + " outside tolerance");
  }

  const std::string out_path = a.out.empty() ? std::string(tag) + ".csv"
                                             : a.out;
  std::ofstream out(out_path);
  if (!out) throw ConfigError("reproduce: cannot open: " + out_path);
  out << csv.str();
  out.close();
  std::printf("wrote: %s\n", out_path.c_str());

  json rep;
  rep["command"] = "reproduce";
  rep["parameters"]["target"] = tag;
  rep["results"]["rows"] = rows;
  for (const Anchor& an : anchors)
    rep["results"]["anchors"].push_back({{"name", an.name},
                                         {"computed", an.computed},
                                         {"reference", an.reference},
                                         {"tol", an.tol},
                                         {"relative", an.relative},
                                         {"ok", an.ok()}});
  rep["results"]["out"] = out_path;
  return finish(rep, timer, a.json_path, flags);
}

int cmd_reproduce(const ReproduceArgs& a) {
  if (a.target == "table1") return reproduce_table1(a);
  if (a.target == "fig9") return reproduce_fig(a, Objective::kP1);
  if (a.target == "fig20") return reproduce_fig(a, Objective::kP2);
  throw ConfigError("reproduce: --target must be table1, fig9, or fig20");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photon statistics and pulse optimization for a driven "
               "two-level emitter"};
  app.require_subcommand(1);

  SquareArgs sq;
  auto* c_sq = app.add_subcommand(
      "square", "closed-form + hierarchy statistics for a square pulse");
  c_sq->add_option("-w,--omega", sq.omega,
                   "Rabi frequency (Gamma; MHz with --gamma-mhz)");
  c_sq->add_option("-T,--duration", sq.duration,
                   "pulse length (1/Gamma; us with --gamma-mhz)");
  c_sq->add_option("-n,--n-max", sq.n_max, "largest photon number")
      ->check(CLI::Range(0, 64));
  c_sq->add_option("--horizon", sq.horizon,
                   "explicit counting horizon (default: auto)");
  c_sq->add_option("--gamma-mhz", sq.gamma_mhz, "emitter decay rate in MHz");
  c_sq->add_option("--config", sq.config, "key=value run-config file");
  c_sq->add_option("--json", sq.json_path, "write a JSON report here");

  RafArgs raf;
  auto* c_raf = app.add_subcommand(
      "raf", "swept-detuning drive: delta(t) = (delta_rf/2) cos(nu_rf t)");
  c_raf->add_option("-w,--omega", raf.omega, "Rabi frequency");
  c_raf->add_option("-d,--delta-rf", raf.delta_rf,
                    "peak-to-peak detuning modulation");
  c_raf->add_option("--nu-rf", raf.nu_rf, "angular sweep rate");
  c_raf->add_option("--phase", raf.phase, "sweep phase at t=0 (radians)");
  c_raf->add_option("--window", raf.window,
                    "counting window (default pi/nu_rf)");
  c_raf->add_flag("--extended", raf.extended,
                  "append free decay after the window");
  c_raf->add_option("-n,--n-max", raf.n_max, "largest photon number")
      ->check(CLI::Range(0, 64));
  c_raf->add_option("--gamma-mhz", raf.gamma_mhz, "emitter decay rate in MHz");
  c_raf->add_option("--config", raf.config, "key=value run-config file");
  c_raf->add_option("--json", raf.json_path, "write a JSON report here");

  ScanArgs scan;
  auto* c_scan =
      app.add_subcommand("scan", "square-pulse grid -> CSV "
                                 "(omega,T,p0,p1,p2,mean_n,q)");
  c_scan->add_option("-w,--omega", scan.omega_spec,
                     "grid: a,b,c | lo:hi:n | log:lo:hi:n")
      ->required();
  c_scan->add_option("-T,--duration", scan.t_spec,
                     "grid: a,b,c | lo:hi:n | log:lo:hi:n")
      ->required();
  c_scan->add_option("-o,--out", scan.out, "CSV output path")->required();
  c_scan->add_option("--target", scan.target,
                     "objective highlighted in the summary (p1|p2|all)");
  c_scan->add_option("--gamma-mhz", scan.gamma_mhz,
                     "emitter decay rate in MHz");
  c_scan->add_option("--json", scan.json_path, "write a JSON report here");

  OptimizeArgs opt;
  auto* c_opt =
      app.add_subcommand("optimize", "maximize P1 or P2 over drive "
                                     "parameters");
  c_opt->add_option("--target", opt.target, "p1 | p2")->required();
  c_opt->add_option("--field", opt.field, "square | raf");
  c_opt->add_option("--omega-min", opt.omega_min, "lower Rabi bound");
  c_opt->add_option("--omega-max", opt.omega_max, "upper Rabi bound");
  c_opt->add_option("--t-min", opt.t_min, "lower duration bound (square)");
  c_opt->add_option("--t-max", opt.t_max, "upper duration bound (square)");
  c_opt->add_option("--delta-rf-min", opt.delta_rf_min,
                    "lower modulation bound (raf)");
  c_opt->add_option("--delta-rf-max", opt.delta_rf_max,
                    "upper modulation bound (raf)");
  c_opt->add_option("--nu-rf", opt.nu_rf, "angular sweep rate (raf)");
  c_opt->add_flag("--two-pi", opt.two_pi,
                  "restrict to omega*T = 2 pi n (square, p2)");
  c_opt->add_option("--gamma-mhz", opt.gamma_mhz, "emitter decay rate in MHz");
  c_opt->add_option("--json", opt.json_path, "write a JSON report here");

  McArgs mc;
  auto* c_mc = app.add_subcommand("mc", "quantum-jump Monte Carlo estimate");
  c_mc->add_option("--field", mc.field, "square | raf");
  c_mc->add_option("-w,--omega", mc.omega, "Rabi frequency");
  c_mc->add_option("-T,--duration", mc.duration, "square pulse length");
  c_mc->add_option("-d,--delta-rf", mc.delta_rf, "raf modulation");
  c_mc->add_option("--nu-rf", mc.nu_rf, "raf angular sweep rate");
  c_mc->add_option("--phase", mc.phase, "raf sweep phase");
  c_mc->add_option("--window", mc.window, "raf counting window");
  c_mc->add_flag("--extended", mc.extended, "raf: include post-window decay");
  c_mc->add_option("--n-traj", mc.n_traj, "trajectory count")
      ->check(CLI::PositiveNumber);
  std::uint64_t seed_flag = 0;
  auto* seed_opt = c_mc->add_option(
      "--seed", seed_flag, "RNG seed (default: $PHOTONCTL_SEED, else 1)");
  c_mc->add_option("-n,--n-max", mc.n_max, "largest photon number")
      ->check(CLI::Range(0, 64));
  c_mc->add_option("--horizon", mc.horizon, "explicit counting horizon");
  c_mc->add_option("--threads", mc.threads,
                   "worker threads (0 = hardware concurrency)");
  c_mc->add_option("--gamma-mhz", mc.gamma_mhz, "emitter decay rate in MHz");
  c_mc->add_option("--config", mc.config, "key=value run-config file");
  c_mc->add_option("--dump", mc.dump, "write per-trajectory emission times");
  c_mc->add_option("--json", mc.json_path, "write a JSON report here");

  ReproduceArgs rep;
  auto* c_rep = app.add_subcommand(
      "reproduce", "built-in reference datasets: table1 | fig9 | fig20");
  c_rep->add_option("--target", rep.target, "table1 | fig9 | fig20")
      ->required();
  c_rep->add_option("-o,--out", rep.out, "CSV output path");
  c_rep->add_option("--json", rep.json_path, "write a JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_sq) return cmd_square(sq);
    if (*c_raf) return cmd_raf(raf);
    if (*c_scan) return cmd_scan(scan);
    if (*c_opt) return cmd_optimize(opt);
    if (*c_mc) {
      if (*seed_opt) mc.seed = seed_flag;
      return cmd_mc(mc);
    }
    if (*c_rep) return cmd_reproduce(rep);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
