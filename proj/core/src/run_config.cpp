#include "photonctl/run_config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "photonctl/errors.hpp"
#include "photonctl/gf_engine.hpp"

namespace photonctl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size())
      throw ConfigError("config: trailing characters after number in '" + key +
                        " = " + value + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config: expected a number for '" + key + "', got '" +
                      value + "'");
  }
}

double maybe_convert(double value, UnitKind kind, const EmitterParams& emitter) {
  if (!emitter.gamma_mhz) return value;
  return to_dimensionless(emitter, value, kind);
}

}  // namespace

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    cfg.map_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse(in);
}

bool RunConfig::has(const std::string& key) const { return map_.count(key) > 0; }

double RunConfig::number(const std::string& key) const {
  const auto it = map_.find(key);
  if (it == map_.end()) throw ConfigError("config: missing key '" + key + "'");
  return parse_number(key, it->second);
}

double RunConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string RunConfig::text(const std::string& key) const {
  const auto it = map_.find(key);
  if (it == map_.end()) throw ConfigError("config: missing key '" + key + "'");
  return it->second;
}

std::string RunConfig::text_or(const std::string& key,
                               std::string fallback) const {
  const auto it = map_.find(key);
  return it == map_.end() ? std::move(fallback) : it->second;
}

ControlField field_from_config(const RunConfig& cfg,
                               const EmitterParams& emitter) {
  const std::string variant = cfg.text("field");
  if (variant == "square") {
    SquarePulse p;
    p.omega = maybe_convert(cfg.number("omega"), UnitKind::Rate, emitter);
    p.duration =
        maybe_convert(cfg.number("duration"), UnitKind::Time, emitter);
    ControlField field = p;
    validate(field);
    return field;
  }
  if (variant == "raf") {
    RafParams p;
    p.omega = maybe_convert(cfg.number("omega"), UnitKind::Rate, emitter);
    p.delta_rf =
        maybe_convert(cfg.number("delta_rf"), UnitKind::Rate, emitter);
    p.nu_rf =
        maybe_convert(cfg.number("nu_rf"), UnitKind::Frequency, emitter);
    p.phase = cfg.number_or("phase", 0.0);
    p.window = cfg.has("window")
                   ? maybe_convert(cfg.number("window"), UnitKind::Time,
                                   emitter)
                   : 0.0;
    ControlField field = make_raf_field(p);
    validate(field);
    return field;
  }
  if (variant == "piecewise") {
    PiecewiseField p;
    std::istringstream in(cfg.text("samples"));
    std::string chunk;
    while (std::getline(in, chunk, ';')) {
      const std::string entry = trim(chunk);
      if (entry.empty()) continue;
      PiecewiseSample s;
      std::istringstream fields(entry);
      std::string part;
      double* slots[3] = {&s.t, &s.omega, &s.delta};
      int i = 0;
      while (std::getline(fields, part, ':')) {
        if (i >= 3)
          throw ConfigError("config: piecewise sample '" + entry +
                            "' has more than three fields");
        *slots[i++] = parse_number("samples", trim(part));
      }
      if (i != 3)
        throw ConfigError("config: piecewise sample '" + entry +
                          "' needs t:omega:delta");
      s.t = maybe_convert(s.t, UnitKind::Time, emitter);
      s.omega = maybe_convert(s.omega, UnitKind::Rate, emitter);
      s.delta = maybe_convert(s.delta, UnitKind::Rate, emitter);
      p.samples.push_back(s);
    }
    ControlField field = p;
    validate(field);
    return field;
  }
  throw ConfigError("config: unknown field variant '" + variant +
                    "' (expected square, raf, or piecewise)");
}

}  // namespace photonctl
