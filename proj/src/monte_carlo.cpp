#include "narrowflux/monte_carlo.hpp"

#include <boost/random/normal_distribution.hpp>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "narrowflux/diagnostics.hpp"
#include "narrowflux/errors.hpp"
#include "narrowflux/parallel.hpp"

namespace narrowflux {

namespace {

struct Exit {
  Vec3 center;
  double radius2;
};

struct Walk {
  int exit = -1;  // index into the exit list, -1 on timeout
  double time = 0.0;
};

// Largest step used where no exit can be reached; keeps the reflection of
// the overshoot accurate on the curved boundary.
constexpr double kMaxReflectStep = 5e-3;

double exit_clearance(const Vec3& x, const std::vector<Exit>& exits) {
  double best = 2.0;
  for (const auto& e : exits) best = std::min(best, (x - e.center).norm() - std::sqrt(e.radius2));
  return std::max(0.0, best);
}

int exit_at(const Vec3& p, const std::vector<Exit>& exits) {
  for (std::size_t j = 0; j < exits.size(); ++j) {
    if ((p - exits[j].center).squaredNorm() < exits[j].radius2) return static_cast<int>(j);
  }
  return -1;
}

Walk walk(const Vec3& start, const std::vector<Exit>& exits, double dt, std::size_t max_steps, std::mt19937_64& rng) {
  boost::random::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec3 x = start;
  Walk out;
  for (std::size_t step = 0; step < max_steps; ++step) {
    // A 6-sigma step may reach neither the sphere nor, failing that, an exit.
    const double d = 1.0 - x.norm();
    const double clear = exit_clearance(x, exits);
    const double h = std::max({dt, d * d / 72.0, std::min(clear * clear / 72.0, kMaxReflectStep)});
    const double sigma = std::sqrt(2.0 * h);
    Vec3 y = x + sigma * Vec3(normal(rng), normal(rng), normal(rng));
    out.time += h;
    const double y2 = y.squaredNorm();
    if (y2 <= 1.0) {
      // Brownian-bridge test for an excursion to the boundary between the
      // two samples, treating the sphere locally as a plane.
      const double dy = 1.0 - std::sqrt(y2);
      if (unit(rng) < std::exp(-d * dy / h)) {
        const int j = exit_at((x + y).normalized(), exits);
        if (j >= 0) {
          out.exit = j;
          return out;
        }
      }
      x = y;
      continue;
    }
    // Where the step leaves the ball: |x + s (y - x)| = 1 with s in (0, 1].
    const Vec3 dx = y - x;
    const double a = dx.squaredNorm();
    const double b = x.dot(dx);
    const double c = x.squaredNorm() - 1.0;
    const double s = (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a;
    const Vec3 p = (x + s * dx).normalized();
    if (const int j = exit_at(p, exits); j >= 0) {
      out.exit = j;
      return out;
    }
    // Mirror the overshoot in the tangent plane at p.
    y -= 2.0 * (y - p).dot(p) * p;
    const double n = y.norm();
    if (n > 1.0) y *= (2.0 - n) / n;
    assert(y.norm() <= 1.0 + 1e-12);
    x = y;
  }
  return out;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void McConfig::check(double eps) const {
  if (n_particles == 0) throw DomainError("mc: n_particles must be positive");
  if (dt < 0.0 || dt > eps * eps / 10.0) throw DomainError("mc: dt must not exceed eps^2/10");
  if (max_steps == 0) throw DomainError("mc: max_steps must be positive");
}

McResult mc_flux_split(const ValidatedConfig& cfg, const McConfig& mc) {
  if (!cfg.config().domain.is_sphere()) throw DomainError("mc_flux_split: sphere domain required");
  if (cfg.problem() != BoundaryProblem::mixed) throw RoleError("mc_flux_split: mixed configuration required");
  const double R = cfg.config().domain.radius;
  const std::size_t influx = cfg.influx_index();
  const double eps_in = cfg.window(influx).radius / R;

  double eps_min = eps_in;
  std::vector<Exit> exits;
  for (auto j : cfg.exit_indices()) {
    const double e = cfg.window(j).radius / R;
    eps_min = std::min(eps_min, e);
    exits.push_back({cfg.window(j).center.normalized(), e * e});
  }
  mc.check(eps_min);
  const double dt = mc.step_for(eps_min);

  const Vec3 c = cfg.window(influx).center.normalized();
  const auto [e1, e2] = tangent_frame(c);

  std::vector<Walk> walks(mc.n_particles);
  parallel_for(mc.n_particles, [&](std::size_t i) {
    std::mt19937_64 rng(splitmix64(mc.master_seed ^ splitmix64(i)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = eps_in * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    walks[i] = walk(cap_point(c, e1, e2, r, phi), exits, dt, mc.max_steps, rng);
  });

  McResult out;
  out.windows = cfg.exit_indices();
  out.n_particles = mc.n_particles;
  out.counts.assign(exits.size(), 0);
  double time_sum = 0.0;
  for (const auto& w : walks) {
    if (w.exit < 0) {
      ++out.timeouts;
      continue;
    }
    ++out.counts[static_cast<std::size_t>(w.exit)];
    time_sum += w.time;
  }
  out.absorbed = mc.n_particles - out.timeouts;
  if (static_cast<double>(out.timeouts) > 0.01 * static_cast<double>(mc.n_particles)) {
    diagnostics::warn("mc_flux_split: " + std::to_string(out.timeouts) + " of " + std::to_string(mc.n_particles) +
                      " particles exceeded max_steps");
  }
  if (out.absorbed == 0) throw Timeout("mc_flux_split: no particle was absorbed");
  out.mean_exit_time = time_sum / static_cast<double>(out.absorbed);

  const double n = static_cast<double>(out.absorbed);
  out.p.resize(exits.size());
  out.stderr_p.resize(exits.size());
  double partial = 0.0;
  for (std::size_t j = 0; j < exits.size(); ++j) {
    // The last fraction closes the sum so that it is exactly one.
    out.p[j] = j + 1 < exits.size() ? static_cast<double>(out.counts[j]) / n : 1.0 - partial;
    partial += out.p[j];
    out.stderr_p[j] = std::sqrt(out.p[j] * (1.0 - out.p[j]) / n);
  }
  return out;
}

}  // namespace narrowflux
