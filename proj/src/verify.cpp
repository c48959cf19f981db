#include "eitshape/verify.hpp"

#include <cmath>
#include <numbers>

namespace eitshape {

namespace {

constexpr double kFdStep = 1e-3;  // for 4th-order stencils: truncation and
                                  // roundoff both land near 1e-12

// 4th-order central difference of a single-variable callable.
template <typename F>
double fd4(const F& f, double s, double h) {
  return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h);
}

std::array<double, 2> fd_gradient(const ScalarFn& f, double x, double y) {
  return {fd4([&](double s) { return f(s, y); }, x, kFdStep),
          fd4([&](double s) { return f(x, s); }, y, kFdStep)};
}

double fd_divergence(const VectorFn& v, double x, double y) {
  return fd4([&](double s) { return v(s, y)[0]; }, x, kFdStep) +
         fd4([&](double s) { return v(x, s)[1]; }, y, kFdStep);
}

BoundaryPoint circle_point(const ParametricCircle& c, double t) {
  double nx = std::cos(t), ny = std::sin(t);
  return {c.cx + c.r * nx, c.cy + c.r * ny, nx, ny, t};
}

// Tangential divergence of a field sampled along the circle:
// d(v.tau)/ds + H (v.n) with H = 1/r.
double circle_tangential_divergence(const ParametricCircle& c, const VectorFn& v, double t) {
  auto vtau = [&](double s) {
    BoundaryPoint q = circle_point(c, s);
    auto val = v(q.x, q.y);
    return val[0] * (-q.ny) + val[1] * q.nx;
  };
  BoundaryPoint q = circle_point(c, t);
  auto val = v(q.x, q.y);
  return fd4(vtau, t, kFdStep) / c.r + (val[0] * q.nx + val[1] * q.ny) / c.r;
}

}  // namespace

ParametricCircle make_circle(double cx, double cy, double r, int panels) {
  if (!(r > 0)) throw InvalidParameterError("make_circle: radius must be positive");
  if (panels < 16) throw InvalidParameterError("make_circle: at least 16 panels required");
  return {cx, cy, r, panels};
}

double boundary_integral(const ParametricCircle& c, const BoundaryFn& integrand) {
  const double dt = 2 * std::numbers::pi / c.panels;
  double acc = 0;
  for (int k = 0; k < c.panels; ++k) acc += integrand(circle_point(c, (k + 0.5) * dt));
  return acc * c.r * dt;
}

double disk_integral(const ParametricCircle& c, const ScalarFn& integrand, int radial,
                     int angular) {
  if (radial < 1 || angular < 1)
    throw InvalidParameterError("disk_integral: quadrature sizes must be positive");
  static const double gl_node[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
  static const double gl_weight[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double dr = c.r / radial;
  const double dt = 2 * std::numbers::pi / angular;
  double acc = 0;
  for (int i = 0; i < radial; ++i) {
    double mid = (i + 0.5) * dr;
    for (int q = 0; q < 3; ++q) {
      double rho = mid + 0.5 * dr * gl_node[q];
      double wr = 0.5 * dr * gl_weight[q] * rho;
      for (int k = 0; k < angular; ++k) {
        double t = (k + 0.5) * dt;
        acc += wr * dt * integrand(c.cx + rho * std::cos(t), c.cy + rho * std::sin(t));
      }
    }
  }
  return acc;
}

GapReport volume_functional_check(const ParametricCircle& shape, const ScalarFn& f,
                                  const ScalarFn& g, const VectorFn& theta, int radial,
                                  int angular) {
  double domain = disk_integral(
      shape,
      [&](double x, double y) {
        auto gf = fd_gradient(f, x, y);
        auto th = theta(x, y);
        return gf[0] * th[0] + gf[1] * th[1] + f(x, y) * fd_divergence(theta, x, y);
      },
      radial, angular);
  double surface = boundary_integral(shape, [&](const BoundaryPoint& q) {
    auto gg = fd_gradient(g, q.x, q.y);
    auto th = theta(q.x, q.y);
    return gg[0] * th[0] + gg[1] * th[1] +
           g(q.x, q.y) * circle_tangential_divergence(shape, theta, q.t);
  });
  double rhs = boundary_integral(shape, [&](const BoundaryPoint& q) {
    auto th = theta(q.x, q.y);
    double dn = fd4([&](double s) { return g(q.x + s * q.nx, q.y + s * q.ny); }, 0.0, kFdStep);
    double g1 = f(q.x, q.y) + dn + g(q.x, q.y) / shape.r;
    return g1 * (th[0] * q.nx + th[1] * q.ny);
  });
  GapReport report;
  report.lhs = domain + surface;
  report.rhs = rhs;
  report.gap = std::abs(report.lhs - report.rhs);
  return report;
}

namespace {

struct PointData {
  double u, p, f, ud;
  std::array<double, 2> gu, gp, gf, gud;
};

PointData model_data(const SmoothFunction& uf, const SmoothFunction& pf, DataMode mode, double x,
                     double y) {
  PointData d;
  d.u = uf.value(x, y);
  d.gu = uf.gradient(x, y);
  d.p = pf.value(x, y);
  d.gp = pf.gradient(x, y);
  d.f = -uf.laplacian(x, y) + d.u;
  auto glu = uf.grad_laplacian(x, y);
  d.gf = {d.gu[0] - glu[0], d.gu[1] - glu[1]};
  if (mode == DataMode::consistent) {
    d.ud = d.u + (-pf.laplacian(x, y) + d.p) / 2;
    auto glp = pf.grad_laplacian(x, y);
    d.gud = {d.gu[0] + (d.gp[0] - glp[0]) / 2, d.gu[1] + (d.gp[1] - glp[1]) / 2};
  } else {
    d.ud = d.u + 1;
    d.gud = d.gu;
  }
  return d;
}

std::array<double, 4> elliptic_S1(const SmoothFunction& uf, const SmoothFunction& pf,
                                  DataMode mode, double x, double y) {
  PointData d = model_data(uf, pf, mode, x, y);
  double dot = d.gu[0] * d.gp[0] + d.gu[1] * d.gp[1];
  double iso = dot + d.u * d.p - d.f * d.p + (d.u - d.ud) * (d.u - d.ud);
  return {-2 * d.gp[0] * d.gu[0] + iso, -(d.gp[0] * d.gu[1] + d.gu[0] * d.gp[1]),
          -(d.gp[1] * d.gu[0] + d.gu[1] * d.gp[0]), -2 * d.gp[1] * d.gu[1] + iso};
}

}  // namespace

double equilibrium_residual_check(const SmoothFunction& u, const SmoothFunction& p, DataMode mode,
                                  double delta, int grid) {
  if (!(delta > 0)) throw InvalidParameterError("equilibrium check: delta must be positive");
  if (grid < 2) throw InvalidParameterError("equilibrium check: grid must have >= 2 points");
  double worst = 0;
  for (int ix = 0; ix < grid; ++ix)
    for (int iy = 0; iy < grid; ++iy) {
      double x = 0.15 + ix * (0.7 / (grid - 1));
      double y = 0.15 + iy * (0.7 / (grid - 1));
      auto xp = elliptic_S1(u, p, mode, x + delta, y);
      auto xm = elliptic_S1(u, p, mode, x - delta, y);
      auto yp = elliptic_S1(u, p, mode, x, y + delta);
      auto ym = elliptic_S1(u, p, mode, x, y - delta);
      // div(S1)_i = d/dx S1[i][0] + d/dy S1[i][1], row-major entries 0..3
      double div0 = (xp[0] - xm[0]) / (2 * delta) + (yp[1] - ym[1]) / (2 * delta);
      double div1 = (xp[2] - xm[2]) / (2 * delta) + (yp[3] - ym[3]) / (2 * delta);
      PointData d = model_data(u, p, mode, x, y);
      double s0x = -2 * (d.u - d.ud) * d.gud[0] - d.p * d.gf[0];
      double s0y = -2 * (d.u - d.ud) * d.gud[1] - d.p * d.gf[1];
      worst = std::max({worst, std::abs(-div0 + s0x), std::abs(-div1 + s0y)});
    }
  return worst;
}

CorollaryReport corollary_simplification_check(const ParametricCircle& shape,
                                               const ScalarFn& alpha, const VectorFn& theta) {
  // Interface tensor value alpha (I - n x n) contracted with its transpose
  // against the normal, as a plane field for the tangential FD.
  auto projector_normal = [&](double x, double y) -> std::array<double, 2> {
    double dx = x - shape.cx, dy = y - shape.cy;
    double rr = std::hypot(dx, dy);
    double nx = dx / rr, ny = dy / rr;
    double a = alpha(x, y);
    double nn = nx * nx + ny * ny;
    return {a * (nx - nn * nx), a * (ny - nn * ny)};
  };
  CorollaryReport report;
  const double dt = 2 * std::numbers::pi / shape.panels;
  double full = 0, simple = 0;
  for (int k = 0; k < shape.panels; ++k) {
    BoundaryPoint q = circle_point(shape, (k + 0.5) * dt);
    double a = alpha(q.x, q.y);
    auto w = projector_normal(q.x, q.y);
    report.max_projector_normal =
        std::max(report.max_projector_normal, std::hypot(w[0], w[1]));
    // S1_if : D_Gamma n with closed-form D_Gamma n = (I - n x n)/r.
    double pxx = 1 - q.nx * q.nx, pxy = -q.nx * q.ny, pyy = 1 - q.ny * q.ny;
    double frob = a * (pxx * pxx + 2 * pxy * pxy + pyy * pyy) / shape.r;
    report.max_curvature_gap =
        std::max(report.max_curvature_gap, std::abs(frob - a / shape.r));
    double divw = circle_tangential_divergence(shape, projector_normal, q.t);
    double g1_full = frob - divw + (w[0] * q.nx + w[1] * q.ny) / shape.r;
    double g1_simple = a / shape.r;
    auto th = theta(q.x, q.y);
    double thn = th[0] * q.nx + th[1] * q.ny;
    full += g1_full * thn;
    simple += g1_simple * thn;
  }
  report.full_value = full * shape.r * dt;
  report.simplified_value = simple * shape.r * dt;
  report.gap = std::abs(report.full_value - report.simplified_value);
  return report;
}

}  // namespace eitshape
