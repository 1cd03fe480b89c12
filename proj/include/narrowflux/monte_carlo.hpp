#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "narrowflux/geometry.hpp"

namespace narrowflux {

struct McConfig {
  std::size_t n_particles = 100000;
  /// Time step next to an exit; 0 selects ε²/1280. Coarser steps weaken
  /// absorption and pull the split towards even.
  double dt = 0.0;
  std::uint64_t master_seed = 1;
  std::size_t max_steps = 20'000'000;

  /// Throws DomainError when dt > ε²/10 or n_particles == 0.
  void check(double eps) const;
  double step_for(double eps) const { return dt > 0.0 ? dt : eps * eps / 1280.0; }
};

struct McResult {
  std::vector<std::size_t> windows;  // exit indices
  std::vector<double> p;             // absorbed fraction per exit, sums to 1
  std::vector<double> stderr_p;      // binomial standard errors
  std::vector<std::size_t> counts;
  std::size_t absorbed = 0;
  std::size_t timeouts = 0;
  std::size_t n_particles = 0;
  double mean_exit_time = 0.0;
};

/// Brownian flux split on the unit ball (Sphere(R) configs are rescaled).
/// Particles start uniformly on the influx cap, reflect specularly off the
/// sphere and are absorbed when a boundary crossing lands inside an exit cap.
/// Away from the boundary the step grows with the distance to the sphere so
/// that a crossing within one step is a > 6σ event; within that band the step
/// is `dt`. Requires a mixed configuration (RoleError otherwise).
///
/// Each particle owns an RNG stream derived from (master_seed, index), so the
/// result does not depend on the worker count.
McResult mc_flux_split(const ValidatedConfig& cfg, const McConfig& mc);

/// SplitMix64 finalizer, exposed for tests.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace narrowflux
