#include "photonctl/units.hpp"

#include <cmath>

#include "photonctl/errors.hpp"

namespace photonctl {

namespace {

double checked_gamma(const EmitterParams& p) {
  if (!p.gamma_mhz.has_value()) {
    throw ConfigError("unit conversion requested but gamma_mhz is not set");
  }
  const double g = *p.gamma_mhz;
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw ConfigError("gamma_mhz must be a positive finite value");
  }
  return g;
}

}  // namespace

double to_dimensionless(const EmitterParams& p, double value, UnitKind kind) {
  const double g = checked_gamma(p);
  switch (kind) {
    case UnitKind::Rate:
    case UnitKind::Frequency:
      return value / g;   // MHz / MHz
    case UnitKind::Time:
      return value * g;   // us * MHz
  }
  throw ConfigError("unknown unit kind");
}

double from_dimensionless(const EmitterParams& p, double value, UnitKind kind) {
  const double g = checked_gamma(p);
  switch (kind) {
    case UnitKind::Rate:
    case UnitKind::Frequency:
      return value * g;
    case UnitKind::Time:
      return value / g;
  }
  throw ConfigError("unknown unit kind");
}

}  // namespace photonctl
