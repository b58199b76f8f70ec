#pragma once

#include <stdexcept>
#include <string>

namespace photonctl {

// Bad or missing user-supplied parameters (units, field definitions, config files).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical evaluation left its validated domain (non-real residue,
// non-finite intermediate, ...).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// The adaptive integrator could not proceed (step size underflow, bad RHS).
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, double h)
      : std::runtime_error(what + " at t=" + std::to_string(t) +
                           ", h=" + std::to_string(h)),
        t_(t), h_(h) {}
  double where() const { return t_; }
  double last_step() const { return h_; }

 private:
  double t_;
  double h_;
};

}  // namespace photonctl
