#include "narrowflux/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "narrowflux/diagnostics.hpp"
#include "narrowflux/errors.hpp"
#include "narrowflux/greens.hpp"
#include "narrowflux/specfun.hpp"

namespace narrowflux {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kValidityEps = 0.2;

void check_eps(double eps, const char* where) {
  if (!(eps > 0.0)) throw DomainError(std::string(where) + ": eps must be positive");
  if (eps > kValidityEps) {
    std::ostringstream os;
    os << where << ": eps = " << eps << " is outside the small-window regime (eps > 0.2)";
    diagnostics::warn(os.str());
  }
}

void check_square(const Eigen::MatrixXd& m, std::size_t influx, const char* where) {
  if (m.rows() != m.cols() || m.rows() < 2) throw DimensionMismatch(std::string(where) + ": need an N x N table, N >= 2");
  if (influx >= static_cast<std::size_t>(m.rows())) throw DimensionMismatch(std::string(where) + ": influx index out of range");
}

std::vector<std::size_t> exits_of(std::size_t n, std::size_t influx) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != influx) out.push_back(i);
  }
  return out;
}

void check_separation(double eps, const DistanceMatrix& dist) {
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < dist.cols(); ++j) {
      if (dist(i, j) < 2.0 * eps * (1.0 - 1e-12)) throw DomainError("windows closer than 2 eps");
    }
  }
}

}  // namespace

ExpansionResult ExpansionResult::two(double leading, double log_term) {
  ExpansionResult r;
  r.leading = leading;
  r.log_term = log_term;
  r.total = leading + log_term;
  r.order = ExpansionOrder::two_term;
  return r;
}

ExpansionResult ExpansionResult::three(double leading, double log_term, double quad_term) {
  ExpansionResult r;
  r.leading = leading;
  r.log_term = log_term;
  r.quad_term = quad_term;
  r.total = leading + log_term + quad_term;
  r.order = ExpansionOrder::three_term;
  return r;
}

FluxVector FluxVector::from_constants(std::vector<std::size_t> windows, std::vector<double> c, double eps) {
  FluxVector f;
  f.windows = std::move(windows);
  f.fluxes.reserve(c.size());
  for (double cj : c) f.fluxes.push_back(2.0 * kPi * eps * cj);
  f.weber_constants = std::move(c);
  return f;
}

double FluxVector::total_flux() const { return std::accumulate(fluxes.begin(), fluxes.end(), 0.0); }

double sphere_interaction(double l) {
  if (!(l > 0.0)) throw DomainError("sphere_interaction: distance must be positive");
  return 1.0 / l - 0.5 * std::log(0.5 * l * l + l);
}

ExpansionResult drop_two_window_neumann_general(double H1, double H2, double eps,
                                                const std::optional<NeumannQuadData>& quad) {
  check_eps(eps, "drop_two_window_neumann_general");
  const double lead = 2.0 * eps;
  const double lg = -(H1 + H2) / 4.0 * eps * eps * std::log(eps);
  if (!quad) return ExpansionResult::two(lead, lg);
  const double q = ((H1 + H2) / 8.0 + kPi * (quad->v1 + quad->v2 - 2.0 * quad->gs12)) * eps * eps;
  return ExpansionResult::three(lead, lg, q);
}

double drop_interior_point(double H1, double H2, double eps, const Vec3& y, const Vec3& x1, const Vec3& x2,
                           const InteriorGreensData& data) {
  if (!(eps > 0.0)) throw DomainError("drop_interior_point: eps must be positive");
  const double r1 = (y - x1).norm();
  const double r2 = (y - x2).norm();
  if (r1 < 2.0 * eps || r2 < 2.0 * eps) throw DomainError("drop_interior_point: y is too close to a window");
  // Window-area weighting pi eps^2 applies to the whole Green's function, log and regular parts included.
  const double bracket = H1 / 8.0 + kPi * data.v1 - kPi * data.g21 - 1.0 / (2.0 * r1) + 1.0 / (2.0 * r2) +
                         H1 / 4.0 * std::log(r1) - H2 / 4.0 * std::log(r2) - kPi * data.vs_y1 + kPi * data.vs_y2;
  return eps - H1 / 4.0 * eps * eps * std::log(eps) + bracket * eps * eps;
}

double drop_interior_point_sphere(double eps, const Vec3& y, const Vec3& x1, const Vec3& x2) {
  const GreensSplit split = greens_split_sphere();
  auto regular = [&](const Vec3& xj) {
    const double r = (y - xj).norm();
    return gs_sphere_interior(y, xj) - general_singular(split.H, r);
  };
  InteriorGreensData data;
  data.v1 = split.v;
  data.g21 = gs_sphere_surface(x2, x1);
  data.vs_y1 = regular(x1);
  data.vs_y2 = regular(x2);
  return drop_interior_point(split.H, split.H, eps, y, x1, x2, data);
}

double close_window_leading_coefficient(double eta) {
  if (!(eta >= 2.0)) throw DomainError("close windows: eta must be at least 2");
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-13;
  const double integral = integrate_adaptive(
      [eta](double u) { return u / (eta + u) * ellipk(2.0 * std::sqrt(eta * u) / (eta + u)); }, 0.0, 1.0, spec);
  return 2.0 - 4.0 / kPi * integral;
}

double close_window_log_integral(double eta) {
  if (!(eta >= 2.0)) throw DomainError("close windows: eta must be at least 2");
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-12;
  auto inner = [&](double u) {
    return u * integrate_adaptive(
                   [&](double t) { return std::log(eta * eta - 2.0 * eta * u * std::cos(t) + u * u); }, 0.0, kPi,
                   spec);
  };
  // The theta integrand is even about pi, so integrate over [0, pi] and double.
  return 2.0 * integrate_adaptive(inner, 0.0, 1.0, spec) / (8.0 * kPi);
}

ExpansionResult drop_close_windows(double eps, double eta, double H1, double H2) {
  if (!(eta >= 2.0)) throw DomainError("drop_close_windows: eta must be at least 2");
  check_eps(eps, "drop_close_windows");
  const double lead = close_window_leading_coefficient(eta) * eps;
  const double quad = (0.125 + close_window_log_integral(eta)) * (H1 + H2) * eps * eps;
  return ExpansionResult::three(lead, 0.0, quad);
}

ExpansionResult drop_mixed_general(const std::vector<double>& H, double eps) {
  if (H.size() < 2) throw DomainError("drop_mixed_general: need at least two windows");
  check_eps(eps, "drop_mixed_general");
  const double n1 = static_cast<double>(H.size() - 1);
  const double h_exits = std::accumulate(H.begin() + 1, H.end(), 0.0);
  const double lead = eps * (1.0 + kPi / (4.0 * n1));
  const double lg = -(H[0] + h_exits / (n1 * n1)) * eps * eps / 4.0 * std::log(eps);
  return ExpansionResult::two(lead, lg);
}

ExpansionResult sphere_drop_neumann(double eps, double l) {
  check_eps(eps, "sphere_drop_neumann");
  if (!(l >= 2.0 * eps * (1.0 - 1e-12)) || l > 2.0 + 1e-12) throw DomainError("sphere_drop_neumann: need 2 eps <= l <= 2");
  return ExpansionResult::three(2.0 * eps, -0.5 * eps * eps * std::log(eps),
                                (0.25 - 1.0 / l + 0.5 * std::log(0.5 * l * l + l)) * eps * eps);
}

ExpansionResult sphere_drop_absorbing(double eps, double l) {
  check_eps(eps, "sphere_drop_absorbing");
  if (!(l >= 2.0 * eps * (1.0 - 1e-12)) || l > 2.0 + 1e-12) throw DomainError("sphere_drop_absorbing: need 2 eps <= l <= 2");
  return ExpansionResult::three((1.0 + kPi / 4.0) * eps, -0.5 * eps * eps * std::log(eps),
                                (0.375 - std::log(2.0) / 4.0 - 1.0 / l + 0.5 * std::log(0.5 * l * l + l)) * eps * eps);
}

ExpansionResult sphere_drop_N(double eps, const DistanceMatrix& dist, std::size_t influx) {
  check_square(dist, influx, "sphere_drop_N");
  check_eps(eps, "sphere_drop_N");
  check_separation(eps, dist);
  const auto exits = exits_of(static_cast<std::size_t>(dist.rows()), influx);
  const double n1 = static_cast<double>(exits.size());
  double pair_sum = 0.0;
  for (std::size_t a = 0; a < exits.size(); ++a) {
    for (std::size_t b = a + 1; b < exits.size(); ++b) pair_sum += sphere_interaction(dist(exits[a], exits[b]));
  }
  double influx_sum = 0.0;
  for (auto i : exits) influx_sum += sphere_interaction(dist(influx, i));
  const double lead = (1.0 + kPi / (4.0 * n1)) * eps;
  const double lg = -(1.0 + 1.0 / n1) / 4.0 * eps * eps * std::log(eps);
  const double quad =
      (0.125 + (1.0 - std::log(2.0)) / (4.0 * n1) + pair_sum / (n1 * n1) - influx_sum / n1) * eps * eps;
  return ExpansionResult::three(lead, lg, quad);
}

FluxVector sphere_fluxes(double eps, const DistanceMatrix& dist, std::size_t influx) {
  check_square(dist, influx, "sphere_fluxes");
  check_eps(eps, "sphere_fluxes");
  check_separation(eps, dist);
  const auto exits = exits_of(static_cast<std::size_t>(dist.rows()), influx);
  const double n1 = static_cast<double>(exits.size());
  double pair_sum = 0.0;
  for (std::size_t a = 0; a < exits.size(); ++a) {
    for (std::size_t b = a + 1; b < exits.size(); ++b) pair_sum += sphere_interaction(dist(exits[a], exits[b]));
  }
  std::vector<double> c;
  for (auto j : exits) {
    double s = 0.0;
    for (auto i : exits) {
      if (i == j) continue;
      s += sphere_interaction(dist(influx, j)) - sphere_interaction(dist(influx, i)) - sphere_interaction(dist(i, j));
    }
    const double bracket = s + 2.0 / n1 * pair_sum;
    c.push_back(-eps / (2.0 * n1) - bracket * eps * eps / (kPi * n1));
  }
  return FluxVector::from_constants(exits, std::move(c), eps);
}

double d_coeff(double H, double eps, double v) {
  if (!(eps > 0.0)) throw DomainError("d_coeff: eps must be positive");
  return -0.5 * H * std::log(eps) + 0.5 * (1.0 - std::log(2.0)) * H + 2.0 * kPi * v;
}

UbarFlux ubar_cj_expansion(double eps, const Eigen::MatrixXd& greens, const std::vector<double>& d,
                           std::size_t influx) {
  check_square(greens, influx, "ubar_cj_expansion");
  const auto exits = exits_of(static_cast<std::size_t>(greens.rows()), influx);
  if (d.size() != exits.size()) throw DimensionMismatch("ubar_cj_expansion: need one d_i per exit window");
  if (!(eps > 0.0)) throw DomainError("ubar_cj_expansion: eps must be positive");
  const double n1 = static_cast<double>(exits.size());

  double d_sum = std::accumulate(d.begin(), d.end(), 0.0);
  double pair_sum = 0.0;
  for (std::size_t a = 0; a < exits.size(); ++a) {
    for (std::size_t b = a + 1; b < exits.size(); ++b) pair_sum += greens(exits[a], exits[b]);
  }
  double influx_sum = 0.0;
  for (auto i : exits) influx_sum += greens(influx, i);

  UbarFlux out;
  out.ubar = kPi * eps / (4.0 * n1) + eps * eps / (2.0 * n1 * n1) * d_sum + 2.0 * kPi * eps * eps / (n1 * n1) * pair_sum -
             kPi * eps * eps / n1 * influx_sum;

  std::vector<double> c;
  for (std::size_t a = 0; a < exits.size(); ++a) {
    const auto j = exits[a];
    double dd = 0.0;
    double gg = 0.0;
    for (std::size_t b = 0; b < exits.size(); ++b) {
      if (b == a) continue;
      const auto i = exits[b];
      dd += d[b] - d[a];
      gg += greens(influx, j) - greens(influx, i) - greens(i, j);
    }
    const double bracket = dd + 2.0 * kPi * n1 * gg + 4.0 * kPi * pair_sum;
    c.push_back(-eps / (2.0 * n1) - eps * eps / (kPi * n1 * n1) * bracket);
  }
  out.flux = FluxVector::from_constants(exits, std::move(c), eps);
  return out;
}

}  // namespace narrowflux
