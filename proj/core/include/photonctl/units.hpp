#pragma once

#include <optional>

namespace photonctl {

// Emitter scale. All engine-level quantities are dimensionless: rates and
// frequencies in units of the spontaneous decay rate Gamma, times in units
// of 1/Gamma. When gamma_mhz is set, laboratory inputs (rates/frequencies in
// MHz, times in microseconds) can be converted in both directions.
struct EmitterParams {
  std::optional<double> gamma_mhz;
};

enum class UnitKind { Rate, Frequency, Time };

// MHz (or us for UnitKind::Time) -> dimensionless.
double to_dimensionless(const EmitterParams& p, double value, UnitKind kind);

// dimensionless -> MHz (or us for UnitKind::Time).
double from_dimensionless(const EmitterParams& p, double value, UnitKind kind);

}  // namespace photonctl
