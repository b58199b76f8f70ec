#pragma once

// Flat key=value run configuration: an alternative to CLI flags. Lines are
// `key = value`, `#` starts a comment, keys are lower_snake_case. The
// `field` key selects the drive variant; see the repo docs for the schema.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "photonctl/control_field.hpp"
#include "photonctl/units.hpp"

namespace photonctl {

class RunConfig {
 public:
  static RunConfig parse(std::istream& in);
  static RunConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  // Throw ConfigError when the key is missing or not a number.
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, std::string fallback) const;

  const std::map<std::string, std::string>& entries() const { return map_; }

 private:
  std::map<std::string, std::string> map_;
};

// Build the control field described by the config. Recognized variants:
//   field = square     omega, duration
//   field = raf        omega, delta_rf, nu_rf (angular), [phase], [window]
//   field = piecewise  samples = t:omega:delta; t:omega:delta; ...
// When emitter.gamma_mhz is set, rates/frequencies are read as MHz and times
// as microseconds; otherwise everything is in Gamma units.
ControlField field_from_config(const RunConfig& cfg,
                               const EmitterParams& emitter = {});

}  // namespace photonctl
