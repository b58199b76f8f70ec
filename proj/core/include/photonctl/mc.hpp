#pragma once

// Quantum-jump (stochastic wavefunction) Monte Carlo sampler. Independent of
// the generating-function machinery: evolves two-level amplitudes under the
// non-Hermitian effective Hamiltonian and counts norm-threshold jumps.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "photonctl/control_field.hpp"

namespace photonctl {

struct McOptions {
  // Integration tolerances for the amplitude equations; the statistical
  // error of any realistic trajectory count dominates these by orders of
  // magnitude.
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double step_cap_scale = 0.05;
  int threads = 0;  // 0 = hardware concurrency
};

struct TrajectoryRecord {
  std::vector<double> emission_times;  // strictly increasing, within horizon
  double final_time = 0.0;
};

struct McEstimate {
  // Empirical frequencies P_0..P_k with k >= n_max (grown to the largest
  // observed count, so the entries always sum to exactly 1).
  std::vector<double> probs;
  std::vector<double> ci_halfwidths;  // 95% Wilson intervals
  std::uint64_t n_traj = 0;
  std::uint64_t seed = 0;
  double mean_n = 0.0;   // empirical <N>
  double mean_se = 0.0;  // standard error of mean_n
};

// Simulate n_traj trajectories. horizon == nullopt selects the same "auto"
// convention as the gf engine: field support plus free decay (capped at
// support + 60), during which the single possible remaining jump time is
// computed analytically. Deterministic for fixed (field, seed, n_traj),
// independent of thread count. If records != nullptr it is filled with one
// entry per trajectory, ordered by trajectory index.
McEstimate simulate(const ControlField& field, std::optional<double> horizon,
                    std::uint64_t n_traj, std::uint64_t seed, int n_max = 8,
                    const McOptions& opt = {},
                    std::vector<TrajectoryRecord>* records = nullptr);

// One line per trajectory: emission times in 1/Gamma units, tab-separated.
void dump_trajectories(std::ostream& os,
                       const std::vector<TrajectoryRecord>& records);

}  // namespace photonctl
