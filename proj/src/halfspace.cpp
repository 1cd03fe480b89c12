#include "narrowflux/halfspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <utility>

#include <boost/numeric/odeint.hpp>

#include "narrowflux/errors.hpp"

namespace narrowflux {

namespace {

constexpr double kPi = std::numbers::pi;

// Window-2 kernel: J1(mε) for an outflux window, sin(mε)/2 for an absorbing one.
double exit_kernel(const HalfSpacePair& p, double m) {
  return p.bc == HalfSpaceBc::neumann_pair ? bessel_j01(m * p.eps).j1 : 0.5 * std::sin(m * p.eps);
}

// Kernel values on the fixed node grid of one trace. Every quadrature walks
// the grid from node 0, so the cache only ever grows at its end.
class KernelCache {
 public:
  explicit KernelCache(const HalfSpacePair& p) : p_(p) {}

  const std::array<double, 2>& at(std::size_t node, double m) {
    while (values_.size() <= node) values_.push_back({bessel_j01(m * p_.eps).j1, exit_kernel(p_, m)});
    return values_[node];
  }

 private:
  const HalfSpacePair& p_;
  std::vector<std::array<double, 2>> values_;
};

// (ẋ, ż) = −∇u; `kernel(m, node)` returns {J1(mε), exit kernel}.
template <class Kernel>
std::array<double, 2> flow(const HalfSpacePair& p, double x, double z, double h, const QuadratureSpec& spec,
                           Kernel&& kernel) {
  const double a = 0.5 * p.l + x;
  const double b = 0.5 * p.l - x;
  auto f = [&](double m, std::size_t node) {
    const auto& k = kernel(m, node);
    const BesselPair ja = bessel_j01(m * a);
    const BesselPair jb = bessel_j01(m * b);
    return std::array<double, 2>{k[0] * ja.j1 + k[1] * jb.j1, k[0] * ja.j0 - k[1] * jb.j0};
  };
  const auto r = integrate_laplace_segments<2>(f, std::max(z, 0.0), h, spec);
  const double s = p.eps * p.current;
  return {s * r.value[0], s * r.value[1]};
}

double frequency_bound(const HalfSpacePair& p, double x) { return p.eps + 0.5 * p.l + std::abs(x); }

}  // namespace

std::string to_string(HalfSpaceBc bc) { return bc == HalfSpaceBc::neumann_pair ? "neumann" : "mixed"; }

HalfSpaceBc parse_halfspace_bc(const std::string& name) {
  if (name == "neumann" || name == "neumann_pair") return HalfSpaceBc::neumann_pair;
  if (name == "mixed" || name == "absorbing" || name == "mixed_absorbing") return HalfSpaceBc::mixed_absorbing;
  throw ConfigError("unknown half-space boundary condition '" + name + "'");
}

std::string to_string(TraceEnd end) {
  switch (end) {
    case TraceEnd::exit_reached: return "exit_reached";
    case TraceEnd::max_time: return "max_time";
    case TraceEnd::stalled: return "stalled";
  }
  return "unknown";
}

void HalfSpacePair::check() const {
  if (!(eps > 0.0)) throw DomainError("half-space: eps must be positive");
  if (!(l >= 2.0 * eps)) throw DomainError("half-space: windows overlap (l < 2 eps)");
  if (!(current > 0.0)) throw DomainError("half-space: current must be positive");
}

double HalfSpacePair::additive_constant() const {
  return bc == HalfSpaceBc::mixed_absorbing ? 0.25 * kPi * eps * current : u0;
}

double field(const HalfSpacePair& p, double x, double y, double z, const QuadratureSpec& spec) {
  p.check();
  if (z < 0.0) throw DomainError("field: z must be non-negative");
  const double r1 = std::hypot(x + 0.5 * p.l, y);
  const double r2 = std::hypot(x - 0.5 * p.l, y);
  auto g = [&](double m) {
    return (bessel_j01(m * p.eps).j1 * bessel_j01(m * r1).j0 - exit_kernel(p, m) * bessel_j01(m * r2).j0) / m;
  };
  const double omega = p.eps + std::max(r1, r2);
  return p.additive_constant() + p.eps * p.current * integrate_bessel_laplace(g, z, spec, omega);
}

Gradient grad_field(const HalfSpacePair& p, double x, double z, const QuadratureSpec& spec) {
  p.check();
  if (z < 0.0) throw DomainError("grad_field: z must be non-negative");
  const double h = laplace_segment_length(frequency_bound(p, x), z);
  std::array<double, 2> k{};
  const auto v = flow(p, x, z, h, spec, [&](double m, std::size_t) -> const std::array<double, 2>& {
    k = {bessel_j01(m * p.eps).j1, exit_kernel(p, m)};
    return k;
  });
  return {-v[0], -v[1]};
}

FlowTrace trace_flow(const HalfSpacePair& p, const TraceOptions& opts) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  p.check();

  // One node grid for the whole trace so kernel values can be reused.
  const double h = kPi / (p.eps + 1.5 * p.l);
  KernelCache cache(p);
  FlowTrace out;
  const double z0 = opts.lift_off * p.l;
  // The absorbing rim carries an inverse square-root flux, so the mixed-case
  // field is only sampled down to half the lift-off height.
  const double z_floor = p.bc == HalfSpaceBc::mixed_absorbing ? 0.5 * z0 : 0.0;
  QuadratureSpec retry = opts.quadrature;
  retry.tail.max_segments *= 25;
  auto rhs = [&](const State& s, State& ds, double) {
    ++out.rhs_evaluations;
    auto kernel = [&](double m, std::size_t node) -> const std::array<double, 2>& { return cache.at(node, m); };
    const double z = std::max(s[1], z_floor);
    try {
      ds = flow(p, s[0], z, h, opts.quadrature, kernel);
    } catch (const NonConvergence&) {
      ds = flow(p, s[0], z, h, retry, kernel);
    }
  };

  State s{-0.5 * p.l, z0};
  State f0{};
  rhs(s, f0, 0.0);
  if (!(f0[1] > 0.0)) throw StallError("trace_flow: no upward flow above the influx window");
  // Time to rise from the plane to the lift-off height.
  const double t_lift = z0 / f0[1];
  const double speed0 = std::hypot(f0[0], f0[1]);

  auto stepper = ode::make_dense_output(opts.abs_tol, opts.rel_tol, ode::runge_kutta_dopri5<State>());
  stepper.initialize(s, 0.0, 0.1 * z0 / speed0);

  out.points.push_back({0.0, s[0], 0.0});
  out.points.push_back({t_lift, s[0], s[1]});
  out.L_pe = z0;
  out.x_at_max = s[0];
  out.t_at_max = t_lift;

  State tmp{};
  auto z_at = [&](double t) {
    stepper.calc_state(t, tmp);
    return tmp[1];
  };

  const double footprint = p.eps;
  int tiny_steps = 0;
  while (true) {
    const auto [t0, t1] = stepper.do_step(rhs);
    const State& cur = stepper.current_state();

    // Maximum of z within the step, from the dense output.
    {
      constexpr int kSamples = 8;
      double best_t = t1;
      double best_z = cur[1];
      for (int i = 0; i < kSamples; ++i) {
        const double t = t0 + (t1 - t0) * i / kSamples;
        const double z = z_at(t);
        if (z > best_z) best_z = z, best_t = t;
      }
      if (best_z > out.L_pe) {
        // Golden-section refinement around the best sample.
        double lo = std::max(t0, best_t - (t1 - t0) / kSamples);
        double hi = std::min(t1, best_t + (t1 - t0) / kSamples);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
          const double a = hi - g * (hi - lo);
          const double b = lo + g * (hi - lo);
          if (z_at(a) > z_at(b)) hi = b; else lo = a;
        }
        const double tm = 0.5 * (lo + hi);
        stepper.calc_state(tm, tmp);
        if (tmp[1] > best_z) best_z = tmp[1], best_t = tm;
        stepper.calc_state(best_t, tmp);
        out.L_pe = tmp[1];
        out.x_at_max = tmp[0];
        out.t_at_max = best_t + t_lift;
      }
    }

    if (cur[1] <= 0.0) {
      // Return to the plane: root of z on the dense output.
      double lo = t0, hi = t1;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (z_at(mid) > 0.0 ? lo : hi) = mid;
      }
      const double tc = 0.5 * (lo + hi);
      stepper.calc_state(tc, tmp);
      out.T_tr = tc + t_lift;
      out.terminal_x = tmp[0];
      out.points.push_back({out.T_tr, tmp[0], 0.0});
      out.terminated = TraceEnd::exit_reached;
      return out;
    }
    out.points.push_back({t1 + t_lift, cur[0], cur[1]});

    if (p.bc == HalfSpaceBc::mixed_absorbing && cur[1] < z0 && std::abs(cur[0] - 0.5 * p.l) < footprint) {
      // Inside the absorbing footprint: finish the last bit at the current speed.
      State d{};
      rhs(cur, d, t1);
      const double rest = d[1] < 0.0 ? cur[1] / -d[1] : 0.0;
      out.T_tr = t1 + t_lift + rest;
      out.terminal_x = cur[0] + rest * d[0];
      out.points.push_back({out.T_tr, out.terminal_x, 0.0});
      out.terminated = TraceEnd::exit_reached;
      return out;
    }

    const double dt = t1 - t0;
    tiny_steps = dt < 1e-13 * std::max(1.0, t1) ? tiny_steps + 1 : 0;
    TraceEnd stop = TraceEnd::exit_reached;
    if (tiny_steps > 50) stop = TraceEnd::stalled;
    if (t1 + t_lift > opts.max_time) stop = TraceEnd::max_time;
    if (stop != TraceEnd::exit_reached) {
      out.terminated = stop;
      out.T_tr = t1 + t_lift;
      out.terminal_x = cur[0];
      if (opts.allow_partial) return out;
      if (stop == TraceEnd::stalled) throw StallError("trace_flow: step size collapsed");
      throw MaxTimeExceeded("trace_flow: max_time reached before the trace returned to the plane");
    }
  }
}

void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
  out << "t,x,z\n" << std::setprecision(12);
  for (const auto& q : trace.points) out << q.t << ',' << q.x << ',' << q.z << '\n';
}

nlohmann::json trace_summary(const HalfSpacePair& p, const FlowTrace& trace) {
  return {{"eps", p.eps},
          {"l", p.l},
          {"I", p.current},
          {"bc", to_string(p.bc)},
          {"L_pe", trace.L_pe},
          {"T_tr", trace.T_tr},
          {"terminal_x", trace.terminal_x},
          {"terminated", to_string(trace.terminated)}};
}

ConstantsFit fit_constants(const std::vector<TraceSample>& samples) {
  std::set<std::pair<double, double>> pairs;
  for (const auto& s : samples) pairs.insert({s.eps, s.l});
  if (pairs.size() < 6) throw InsufficientData("fit_constants: need at least 6 distinct (eps, l) pairs");

  double num = 0.0, den = 0.0, bsum = 0.0;
  for (const auto& s : samples) {
    num += (s.L_pe + s.eps * s.eps / s.l) * s.l;
    den += s.l * s.l;
    bsum += s.T_tr * s.current * s.eps * s.eps / (s.l * s.l * s.l);
  }
  ConstantsFit fit;
  fit.a = num / den;
  fit.b = bsum / static_cast<double>(samples.size());
  for (const auto& s : samples) {
    fit.residual_L.push_back(s.L_pe - (fit.a * s.l - s.eps * s.eps / s.l));
    fit.residual_T.push_back(s.T_tr / (fit.b * s.l * s.l * s.l / (s.current * s.eps * s.eps)) - 1.0);
  }
  return fit;
}

}  // namespace narrowflux
