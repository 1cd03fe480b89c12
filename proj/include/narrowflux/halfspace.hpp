#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrowflux/specfun.hpp"

namespace narrowflux {

enum class HalfSpaceBc { neumann_pair, mixed_absorbing };

std::string to_string(HalfSpaceBc bc);
HalfSpaceBc parse_halfspace_bc(const std::string& name);

/// Two windows of radius eps on the plane z = 0, centered at (∓l/2, 0, 0).
/// Window 1 (left) carries influx I; window 2 is either an outflux window or
/// absorbing.
struct HalfSpacePair {
  double eps = 0.05;
  double l = 0.2;
  double current = 1.0;
  HalfSpaceBc bc = HalfSpaceBc::neumann_pair;
  double u0 = 0.0;  // ignored for the absorbing case, where it is πεI/4

  /// Throws DomainError unless eps > 0, l ≥ 2 eps and current > 0.
  void check() const;
  double additive_constant() const;
};

/// u(x, y, z) for z ≥ 0.
double field(const HalfSpacePair& p, double x, double y, double z, const QuadratureSpec& spec = {});

struct Gradient {
  double du_dx = 0.0;
  double du_dz = 0.0;
};

/// ∇u in the y = 0 plane from the differentiated kernels.
Gradient grad_field(const HalfSpacePair& p, double x, double z, const QuadratureSpec& spec = {});

enum class TraceEnd { exit_reached, max_time, stalled };

std::string to_string(TraceEnd end);

struct TracePoint {
  double t, x, z;
};

struct FlowTrace {
  std::vector<TracePoint> points;
  double L_pe = 0.0;
  double x_at_max = 0.0;
  double t_at_max = 0.0;
  double T_tr = 0.0;
  double terminal_x = 0.0;
  TraceEnd terminated = TraceEnd::exit_reached;
  std::size_t rhs_evaluations = 0;
};

struct TraceOptions {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  double max_time = 1e7;
  /// Lift-off height as a fraction of l.
  double lift_off = 1e-4;
  /// Return the partial trace instead of throwing when the run stops early.
  bool allow_partial = false;
  QuadratureSpec quadrature{1e-9, 1e-7, 2000, {}};
};

/// Steepest-descent flow line dC/dt = −∇u from just above the influx center
/// until z returns to 0. Times are shifted so that the trace starts at
/// (−l/2, 0) at t = 0. Throws StallError or MaxTimeExceeded unless
/// `allow_partial` is set.
FlowTrace trace_flow(const HalfSpacePair& p, const TraceOptions& opts = {});

void write_trace_csv(std::ostream& out, const FlowTrace& trace);
nlohmann::json trace_summary(const HalfSpacePair& p, const FlowTrace& trace);

struct TraceSample {
  double eps = 0.0;
  double l = 0.0;
  double current = 1.0;
  double L_pe = 0.0;
  double T_tr = 0.0;
};

struct ConstantsFit {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> residual_L;  // L_pe − (a l − ε²/l)
  std::vector<double> residual_T;  // T_tr / (b l³ / (I ε²)) − 1
};

/// a by least squares on L_pe + ε²/l = a l; b as the mean of T_tr I ε² / l³.
/// Throws InsufficientData for fewer than 6 distinct (eps, l) pairs.
ConstantsFit fit_constants(const std::vector<TraceSample>& samples);

}  // namespace narrowflux
