#include "narrowflux/bem.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss.hpp>

#include "narrowflux/errors.hpp"
#include "narrowflux/greens.hpp"
#include "narrowflux/linsys.hpp"
#include "narrowflux/parallel.hpp"
#include "narrowflux/specfun.hpp"

namespace narrowflux {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNearRatio = 2.5;
constexpr int kMaxDepth = 12;

enum class Measure { uniform, weber };

struct Patch {
  double t0, t1, p0, p1;
};

template <int N>
const std::array<QuadratureNode, N>& gauss_rule() {
  static const std::array<QuadratureNode, N> rule = [] {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    std::array<QuadratureNode, N> r{};
    std::size_t k = 0;
    // Odd rules store the zero node first.
    for (std::size_t i = 0; i < x.size(); ++i) {
      r[k++] = {x[i], w[i]};
      if (x[i] != 0.0) r[k++] = {-x[i], w[i]};
    }
    return r;
  }();
  return rule;
}

double measure(Measure m, double eps, double t) {
  const double s = std::sin(t);
  return m == Measure::weber ? eps * s : eps * eps * s * std::cos(t);
}

// Kernel G(x; y) with y either on the sphere or strictly inside the ball.
struct Kernel {
  Vec3 y;
  bool on_surface;
  double operator()(const Vec3& x) const { return on_surface ? gs_sphere_surface(x, y) : gs_sphere_interior(y, x); }
};

Kernel make_kernel(const Vec3& y) { return {y, std::abs(y.norm() - 1.0) < 1e-12}; }

double patch_diameter(const BemMesh& mesh, std::size_t w, const Patch& p) {
  const double tm = 0.5 * (p.t0 + p.t1);
  const double pm = 0.5 * (p.p0 + p.p1);
  const std::array<Vec3, 8> q = {mesh.point(w, p.t0, p.p0), mesh.point(w, p.t1, p.p0), mesh.point(w, p.t1, p.p1),
                                 mesh.point(w, p.t0, p.p1), mesh.point(w, tm, p.p0),   mesh.point(w, tm, p.p1),
                                 mesh.point(w, p.t0, pm),   mesh.point(w, p.t1, pm)};
  double d = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) d = std::max(d, (q[i] - q[j]).norm());
  }
  return d;
}

template <int N>
double gauss_patch(const BemMesh& mesh, std::size_t w, const Patch& p, Measure m, const Kernel& k) {
  const auto& rule = gauss_rule<N>();
  const double ht = 0.5 * (p.t1 - p.t0);
  const double hp = 0.5 * (p.p1 - p.p0);
  const double tm = 0.5 * (p.t0 + p.t1);
  const double pm = 0.5 * (p.p0 + p.p1);
  double sum = 0.0;
  for (const auto& a : rule) {
    const double t = tm + ht * a.node;
    const double mt = measure(m, mesh.eps, t);
    for (const auto& b : rule) {
      const double phi = pm + hp * b.node;
      sum += a.weight * b.weight * mt * k(mesh.point(w, t, phi));
    }
  }
  return sum * ht * hp;
}

// r = eps sin t is even about t = pi/2, and (t, phi) ~ (-t, phi + pi) at the
// center, so a point y of the window at parameter t_y also makes the
// integrand singular at pi - t_y and at (-t_y, phi_y + pi). Near the rim and
// the center these mirror points can sit next to a patch that is physically
// well separated from y.
bool near_mirror(const BemMesh& mesh, std::size_t w, const Patch& p, const Kernel& k) {
  if (!k.on_surface) return false;
  const Vec3 d = k.y - mesh.centers[w];
  const double ry = d.norm();
  if (ry >= mesh.eps) return false;
  const double ty = std::asin(ry / mesh.eps);
  const auto& [e1, e2] = mesh.frames[w];
  const double py = std::atan2(d.dot(e2), d.dot(e1));
  const double tm = 0.5 * (p.t0 + p.t1);
  const double pm = 0.5 * (p.p0 + p.p1);
  const double ht = 0.5 * (p.t1 - p.t0);
  const double hp = 0.5 * (p.p1 - p.p0);
  auto close = [&](double t, double phi) {
    return std::max(std::abs(t - tm) / ht, std::abs(std::remainder(phi - pm, 2.0 * kPi)) / hp) < 3.0;
  };
  return close(kPi - ty, py) || close(-ty, py + kPi);
}

// Recursive subdivision until the target is well separated, with the Gauss
// order chosen from the distance to diameter ratio.
double patch_integral(const BemMesh& mesh, std::size_t w, const Patch& p, Measure m, const Kernel& k, const Vec3& c,
                      double diam, int depth = 0) {
  const double ratio = (k.y - c).norm() / diam;
  const bool split = depth < kMaxDepth && (ratio < kNearRatio || near_mirror(mesh, w, p, k));
  if (!split) {
    if (ratio >= 12.0) return gauss_patch<2>(mesh, w, p, m, k);
    if (ratio >= 5.0) return gauss_patch<4>(mesh, w, p, m, k);
    return gauss_patch<6>(mesh, w, p, m, k);
  }
  const double tm = 0.5 * (p.t0 + p.t1);
  const double pm = 0.5 * (p.p0 + p.p1);
  const std::array<Patch, 4> kids = {Patch{p.t0, tm, p.p0, pm}, Patch{tm, p.t1, p.p0, pm}, Patch{p.t0, tm, pm, p.p1},
                                     Patch{tm, p.t1, pm, p.p1}};
  double s = 0.0;
  for (const auto& q : kids) {
    const Vec3 qc = mesh.point(w, 0.5 * (q.t0 + q.t1), 0.5 * (q.p0 + q.p1));
    s += patch_integral(mesh, w, q, m, k, qc, patch_diameter(mesh, w, q), depth + 1);
  }
  return s;
}

// Integral over a patch containing the kernel singularity at parameter point
// (tc, pc): four triangles with the singular point as apex, each mapped from
// the unit square so that the Jacobian cancels the 1/r blow-up.
double duffy_patch(const BemMesh& mesh, std::size_t w, const Patch& p, Measure m, const Kernel& k, double tc,
                   double pc) {
  const auto& rule = gauss_rule<16>();
  const std::array<std::array<double, 2>, 4> corner = {
      {{p.t0, p.p0}, {p.t1, p.p0}, {p.t1, p.p1}, {p.t0, p.p1}}};
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const auto& A = corner[e];
    const auto& B = corner[(e + 1) % 4];
    const double at = A[0] - tc, ap = A[1] - pc;
    const double bt = B[0] - A[0], bp = B[1] - A[1];
    const double jac = std::abs(at * bp - ap * bt);
    if (jac == 0.0) continue;
    double sum = 0.0;
    for (const auto& a : rule) {
      const double s = 0.5 * (a.node + 1.0);
      for (const auto& b : rule) {
        const double u = 0.5 * (b.node + 1.0);
        const double t = tc + s * (at + u * bt);
        const double phi = pc + s * (ap + u * bp);
        sum += a.weight * b.weight * s * measure(m, mesh.eps, t) * k(mesh.point(w, t, phi));
      }
    }
    total += 0.25 * sum * jac;
  }
  return total;
}

// Self integral over a patch centered on the collocation point. Duffy needs
// a patch that is roughly square on the sphere and on which the (t, phi) map
// is close to linear; near the rim dr/dt = eps cos t vanishes and near the
// center sin t varies fast. The Duffy patch is cut down to satisfy both and
// the rest of the element goes to the distance-adaptive rule.
double self_patch(const BemMesh& mesh, std::size_t w, const Patch& p, Measure m, const Kernel& k) {
  constexpr double kMaxBend = 0.05;
  const double tc = 0.5 * (p.t0 + p.t1);
  const double pc = 0.5 * (p.p0 + p.p1);
  const double ht = 0.5 * (p.t1 - p.t0);
  const double hp = 0.5 * (p.p1 - p.p0);
  const double gt = std::cos(tc);
  const double gp = std::sin(tc);
  double at = std::min(ht, hp * gp / gt);
  double ap = std::min(hp, ht * gt / gp);
  const double bend = std::max({at * gp / gt, at * gt / gp, ap});
  if (bend > kMaxBend) {
    at *= kMaxBend / bend;
    ap *= kMaxBend / bend;
  }
  if (at >= ht && ap >= hp) return duffy_patch(mesh, w, p, m, k, tc, pc);
  const std::array<double, 4> ts = {p.t0, tc - at, tc + at, p.t1};
  const std::array<double, 4> ps = {p.p0, pc - ap, pc + ap, p.p1};
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Patch q{ts[i], ts[i + 1], ps[j], ps[j + 1]};
      if (!(q.t1 > q.t0) || !(q.p1 > q.p0)) continue;
      if (i == 1 && j == 1) {
        s += duffy_patch(mesh, w, q, m, k, tc, pc);
      } else {
        const Vec3 qc = mesh.point(w, 0.5 * (q.t0 + q.t1), 0.5 * (q.p0 + q.p1));
        s += patch_integral(mesh, w, q, m, k, qc, patch_diameter(mesh, w, q));
      }
    }
  }
  return s;
}

// Central disk element seen from the window center: the kernel depends on r only.
double central_self(double eps, double t1, Measure m) {
  QuadratureSpec spec;
  spec.abs_tol = 1e-15;
  spec.rel_tol = 1e-13;
  return 2.0 * kPi * integrate_adaptive(
                         [&](double t) { return gs_sphere_surface_r(eps * std::sin(t)) * measure(m, eps, t); }, 0.0,
                         t1, spec);
}

Patch patch_of(const BemElement& e) { return {e.t0, e.t1, e.phi0, e.phi1}; }

// ∫_e G(x; y) dμ for one element, with `self` marking y as its collocation point.
double element_integral(const BemMesh& mesh, const BemElement& e, Measure m, const Kernel& k, bool self) {
  if (!self) return patch_integral(mesh, e.window, patch_of(e), m, k, e.centroid, e.diameter);
  if (e.central) return central_self(mesh.eps, e.t1, m);
  return self_patch(mesh, e.window, patch_of(e), m, k);
}

// Sum over every element of window w with unit density; `self_element` is the
// element whose collocation point coincides with y, if any.
double window_integral(const BemMesh& mesh, std::size_t w, Measure m, const Kernel& k,
                       std::optional<std::size_t> self_element) {
  double s = 0.0;
  for (std::size_t e = mesh.offsets[w]; e < mesh.offsets[w + 1]; ++e) {
    s += element_integral(mesh, mesh.elements[e], m, k, self_element && *self_element == e);
  }
  return s;
}

std::vector<Vec3> unit_centers(const ValidatedConfig& cfg) {
  std::vector<Vec3> c;
  for (std::size_t i = 0; i < cfg.size(); ++i) c.push_back(cfg.window(i).center.normalized());
  return c;
}

double dimensionless_eps(const ValidatedConfig& cfg) {
  if (!cfg.config().domain.is_sphere()) throw DomainError("bem_solve: sphere domain required");
  return cfg.common_radius() / cfg.config().domain.radius;
}

void check_resolution(const BemResolution& res) {
  if (res.n_rings < 2) throw ResolutionError("bem: n_rings must be at least 2");
  if (res.n_sectors < 3) throw ResolutionError("bem: n_sectors must be at least 3");
}

Measure measure_for(WindowRole role) { return role == WindowRole::absorbing ? Measure::weber : Measure::uniform; }

struct LevelData {
  BemLevel level;
  BemMesh mesh;
  Eigen::VectorXd density;
};

LevelData solve_neumann(const ValidatedConfig& cfg, BemResolution res) {
  const double eps = dimensionless_eps(cfg);
  LevelData out;
  out.mesh = BemMesh::build(unit_centers(cfg), eps, res);
  const std::size_t n = cfg.size();
  const double self = sphere_cap_self_integral(eps);
  out.density = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.mesh.elements.size()));
  for (std::size_t w = 0; w < n; ++w) {
    const double sign = cfg.window(w).role == WindowRole::influx ? 1.0 : -1.0;
    for (std::size_t e = out.mesh.offsets[w]; e < out.mesh.offsets[w + 1]; ++e) out.density(e) = sign;
  }
  out.level.resolution = res;
  out.level.u_centers.assign(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const Kernel k = make_kernel(out.mesh.centers[i]);
    double u = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
      const double sign = cfg.window(w).role == WindowRole::influx ? 1.0 : -1.0;
      u += sign * (w == i ? self : window_integral(out.mesh, w, Measure::uniform, k, std::nullopt));
    }
    out.level.u_centers[i] = u;
  });
  out.level.fluxes.resize(n);
  for (std::size_t w = 0; w < n; ++w) {
    out.level.fluxes[w] = (cfg.window(w).role == WindowRole::influx ? 1.0 : -1.0) * kPi * eps * eps;
  }
  out.level.ubar = 0.0;
  const std::size_t exit = cfg.exit_indices().front();
  out.level.drop = out.level.u_centers[cfg.influx_index()] - out.level.u_centers[exit];
  return out;
}

LevelData solve_mixed(const ValidatedConfig& cfg, BemResolution res) {
  const double eps = dimensionless_eps(cfg);
  LevelData out;
  out.mesh = BemMesh::build(unit_centers(cfg), eps, res);
  const BemMesh& mesh = out.mesh;
  const std::size_t influx = cfg.influx_index();

  // Unknowns: one modulation per absorbing element, then ubar.
  std::vector<std::size_t> unknown_elements;
  for (auto w : cfg.exit_indices()) {
    for (std::size_t e = mesh.offsets[w]; e < mesh.offsets[w + 1]; ++e) unknown_elements.push_back(e);
  }
  const auto P = static_cast<Eigen::Index>(unknown_elements.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P + 1, P + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(P + 1);

  parallel_for(static_cast<std::size_t>(P), [&](std::size_t row) {
    const std::size_t er = unknown_elements[row];
    const Kernel k = make_kernel(mesh.elements[er].collocation);
    for (Eigen::Index col = 0; col < P; ++col) {
      const std::size_t ec = unknown_elements[col];
      A(row, col) = element_integral(mesh, mesh.elements[ec], Measure::weber, k, ec == er);
    }
    A(row, P) = 1.0;
    rhs(row) = -window_integral(mesh, influx, Measure::uniform, k, std::nullopt);
  });
  for (Eigen::Index col = 0; col < P; ++col) A(P, col) = mesh.elements[unknown_elements[col]].weight;
  rhs(P) = -kPi * eps * eps;

  // The 1-norm condition estimate of the LU factors is enough here; a full
  // SVD would dominate the run time at fine resolution.
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) throw SingularSystem("bem: collocation matrix is numerically singular");
  const Eigen::VectorXd x = lu.solve(rhs);

  out.density = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.elements.size()));
  for (std::size_t e = mesh.offsets[influx]; e < mesh.offsets[influx + 1]; ++e) out.density(e) = 1.0;
  for (Eigen::Index col = 0; col < P; ++col) out.density(unknown_elements[col]) = x(col);

  const std::size_t n = cfg.size();
  out.level.resolution = res;
  out.level.ubar = x(P);
  out.level.fluxes.assign(n, 0.0);
  out.level.fluxes[influx] = kPi * eps * eps;
  for (Eigen::Index col = 0; col < P; ++col) {
    const auto& e = mesh.elements[unknown_elements[col]];
    out.level.fluxes[e.window] += x(col) * e.weight;
  }
  out.level.u_centers.assign(n, 0.0);
  const double self = sphere_cap_self_integral(eps);
  parallel_for(n, [&](std::size_t i) {
    const Kernel k = make_kernel(mesh.centers[i]);
    double u = out.level.ubar;
    for (std::size_t w = 0; w < n; ++w) {
      if (w == influx) {
        u += w == i ? self : window_integral(mesh, w, Measure::uniform, k, std::nullopt);
        continue;
      }
      for (std::size_t e = mesh.offsets[w]; e < mesh.offsets[w + 1]; ++e) {
        const bool is_self = w == i && mesh.elements[e].central;
        u += out.density(e) * element_integral(mesh, mesh.elements[e], Measure::weber, k, is_self);
      }
    }
    out.level.u_centers[i] = u;
  });
  out.level.drop = out.level.u_centers[influx];
  return out;
}

LevelData solve_level(const ValidatedConfig& cfg, BemResolution res) {
  check_resolution(res);
  switch (cfg.problem()) {
    case BoundaryProblem::neumann_pair:
      return solve_neumann(cfg, res);
    case BoundaryProblem::mixed:
      return solve_mixed(cfg, res);
    case BoundaryProblem::unsupported:
      break;
  }
  throw RoleError("bem: need a Neumann pair or an influx window with absorbing exits");
}

double extrapolate(double coarse, double fine, double p) { return fine + (fine - coarse) / (std::pow(2.0, p) - 1.0); }

}  // namespace

BemResolution BemResolution::at_level(int level) {
  BemResolution r;
  for (int i = 0; i < level; ++i) r = r.refined();
  return r;
}

Vec3 BemMesh::point(std::size_t window, double t, double phi) const {
  const auto& [e1, e2] = frames[window];
  return cap_point(centers[window], e1, e2, eps * std::sin(t), phi);
}

BemMesh BemMesh::build(const std::vector<Vec3>& centers, double eps, BemResolution res) {
  check_resolution(res);
  BemMesh mesh;
  mesh.eps = eps;
  mesh.resolution = res;
  mesh.centers = centers;
  for (const auto& c : centers) mesh.frames.push_back(tangent_frame(c));
  const double dt = 0.5 * kPi / res.n_rings;
  for (std::size_t w = 0; w < centers.size(); ++w) {
    mesh.offsets.push_back(mesh.elements.size());
    BemElement disk;
    disk.window = w;
    disk.t0 = 0.0;
    disk.t1 = dt;
    disk.phi0 = 0.0;
    disk.phi1 = 2.0 * kPi;
    disk.central = true;
    disk.collocation = centers[w];
    mesh.elements.push_back(disk);
    for (int ring = 1; ring < res.n_rings; ++ring) {
      for (int s = 0; s < res.n_sectors; ++s) {
        BemElement e;
        e.window = w;
        e.t0 = ring * dt;
        e.t1 = (ring + 1) * dt;
        e.phi0 = 2.0 * kPi * s / res.n_sectors;
        e.phi1 = 2.0 * kPi * (s + 1) / res.n_sectors;
        e.collocation = mesh.point(w, 0.5 * (e.t0 + e.t1), 0.5 * (e.phi0 + e.phi1));
        mesh.elements.push_back(e);
      }
    }
  }
  mesh.offsets.push_back(mesh.elements.size());
  for (auto& e : mesh.elements) {
    e.centroid = mesh.point(e.window, 0.5 * (e.t0 + e.t1), 0.5 * (e.phi0 + e.phi1));
    e.diameter = patch_diameter(mesh, e.window, patch_of(e));
    // r = eps sin t: dA = eps^2 sin t cos t dt dphi, dA / sqrt(eps^2 - r^2) = eps sin t dt dphi.
    const double dphi = e.phi1 - e.phi0;
    e.area = 0.5 * eps * eps * dphi * (std::pow(std::sin(e.t1), 2) - std::pow(std::sin(e.t0), 2));
    e.weight = eps * dphi * (std::cos(e.t0) - std::cos(e.t1));
  }
  return mesh;
}

BemLevel bem_solve_level(const ValidatedConfig& cfg, BemResolution res) { return solve_level(cfg, res).level; }

BemSolution bem_solve(const ValidatedConfig& cfg, BemResolution res) {
  LevelData coarse = solve_level(cfg, res);
  LevelData fine = solve_level(cfg, res.refined());
  const double p = kBemRichardsonOrder;

  BemSolution sol;
  sol.problem = cfg.problem();
  sol.eps = dimensionless_eps(cfg);
  sol.influx = cfg.influx_index();
  sol.exits = cfg.exit_indices();
  sol.richardson_order = p;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    sol.u_centers.push_back(extrapolate(coarse.level.u_centers[i], fine.level.u_centers[i], p));
  }
  sol.ubar = extrapolate(coarse.level.ubar, fine.level.ubar, p);
  sol.drop = extrapolate(coarse.level.drop, fine.level.drop, p);
  std::vector<double> c;
  for (auto j : sol.exits) {
    const double phi = extrapolate(coarse.level.fluxes[j], fine.level.fluxes[j], p);
    c.push_back(phi / (2.0 * kPi * sol.eps));
  }
  sol.flux = FluxVector::from_constants(sol.exits, std::move(c), sol.eps);
  sol.coarse = std::move(coarse.level);
  sol.fine = std::move(fine.level);
  sol.mesh = std::move(fine.mesh);
  sol.density = std::move(fine.density);
  return sol;
}

double bem_evaluate(const BemSolution& sol, const ValidatedConfig& cfg, const Vec3& y) {
  const double r = y.norm();
  if (r > 1.0 + 1e-12) throw DomainError("bem_evaluate: point outside the unit ball");
  const BemMesh& mesh = sol.mesh;
  for (std::size_t w = 0; w < cfg.size(); ++w) {
    if ((y - mesh.centers[w]).norm() < 1e-12) return sol.fine.u_centers[w];
  }
  const Kernel k = make_kernel(y);
  if (k.on_surface) {
    for (std::size_t w = 0; w < cfg.size(); ++w) {
      if ((y - mesh.centers[w]).norm() < mesh.eps) {
        throw DomainError("bem_evaluate: surface points inside a window are only supported at its center");
      }
    }
  }
  double u = sol.fine.ubar;
  for (std::size_t w = 0; w < cfg.size(); ++w) {
    const Measure m = measure_for(cfg.window(w).role);
    for (std::size_t e = mesh.offsets[w]; e < mesh.offsets[w + 1]; ++e) {
      u += sol.density(e) * element_integral(mesh, mesh.elements[e], m, k, false);
    }
  }
  return u;
}

}  // namespace narrowflux
