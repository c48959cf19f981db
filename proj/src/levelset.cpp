#include "eitshape/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace eitshape {

SigmaRule sigma_rule_from_name(const std::string& name) {
  if (name == "vertex_average") return SigmaRule::vertex_average;
  if (name == "area_fraction") return SigmaRule::area_fraction;
  throw InvalidParameterError("unknown sigma rule: " + name);
}

const char* sigma_rule_name(SigmaRule rule) {
  return rule == SigmaRule::vertex_average ? "vertex_average" : "area_fraction";
}

double ball_sdf(const Ball& b, double x, double y) {
  if (!(b.r > 0)) throw InvalidShapeError("ball: radius must be positive");
  return std::hypot(x - b.cx, y - b.cy) - b.r;
}

double ellipse_sdf(const Ellipse& e, double x, double y) {
  if (!(e.a > 0) || !(e.b > 0)) throw InvalidShapeError("ellipse: semi-axes must be positive");
  double ca = std::cos(e.angle), sa = std::sin(e.angle);
  double qx = ca * (x - e.cx) + sa * (y - e.cy);
  double qy = -sa * (x - e.cx) + ca * (y - e.cy);
  double inside_ind = (qx / e.a) * (qx / e.a) + (qy / e.b) * (qy / e.b);
  double sign = inside_ind < 1.0 ? -1.0 : 1.0;

  auto dist2 = [&](double t) {
    double dx = e.a * std::cos(t) - qx;
    double dy = e.b * std::sin(t) - qy;
    return dx * dx + dy * dy;
  };
  // coarse scan picks the basin, damped Newton refines the closest point
  double t = 0, best = std::numeric_limits<double>::max();
  for (int k = 0; k < 16; ++k) {
    double tk = 2.0 * std::numbers::pi * k / 16.0;
    double d = dist2(tk);
    if (d < best) {
      best = d;
      t = tk;
    }
  }
  const double scale = std::max(e.a, e.b);
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    double ct = std::cos(t), st = std::sin(t);
    double rx = e.a * ct - qx, ry = e.b * st - qy;
    double d1 = -rx * e.a * st + ry * e.b * ct;                       // D'/2
    double d2 = -rx * e.a * ct + e.a * e.a * st * st - ry * e.b * st  // D''/2
                + e.b * e.b * ct * ct;
    if (std::abs(d1) <= 1e-10 * scale * scale && d2 > 0) {
      converged = true;
      break;
    }
    if (d2 <= 0) break;  // stationary point is not a minimum basin; bail out
    double step = -d1 / d2;
    double d_now = dist2(t);
    double damp = 1.0;
    int half;
    for (half = 0; half < 20; ++half) {
      if (dist2(t + damp * step) <= d_now) break;
      damp *= 0.5;
    }
    if (half == 20) break;
    t += damp * step;
    if (std::abs(damp * step) < 1e-14) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    // scaled algebraic fallback
    return std::min(e.a, e.b) * (std::sqrt(inside_ind) - 1.0);
  }
  return sign * std::sqrt(dist2(t));
}

double signed_distance(const ShapeSpec& shapes, double x, double y) {
  if (shapes.empty()) throw InvalidShapeError("signed_distance: empty shape list");
  double d = std::numeric_limits<double>::max();
  for (const auto& b : shapes.balls) d = std::min(d, ball_sdf(b, x, y));
  for (const auto& e : shapes.ellipses) d = std::min(d, ellipse_sdf(e, x, y));
  return d;
}

LevelSet init_signed_distance(const StructuredMesh& mesh, const ShapeSpec& shapes) {
  LevelSet ls(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i)
    ls.phi[i] = signed_distance(shapes, mesh.x[i], mesh.y[i]);
  return ls;
}

bool is_one_signed(const LevelSet& phi) {
  bool has_neg = false, has_nonneg = false;
  for (double v : phi.phi.v) (v < 0 ? has_neg : has_nonneg) = true;
  return !(has_neg && has_nonneg);
}

namespace {

// area of {v < 0} within the polygon (values linear along edges)
double clipped_area(const std::vector<std::array<double, 3>>& poly) {
  // entries: x, y, v
  std::vector<std::array<double, 2>> out;
  std::size_t m = poly.size();
  for (std::size_t k = 0; k < m; ++k) {
    const auto& p = poly[k];
    const auto& q = poly[(k + 1) % m];
    bool pin = p[2] < 0, qin = q[2] < 0;
    if (pin) out.push_back({p[0], p[1]});
    if (pin != qin) {
      double s = p[2] / (p[2] - q[2]);
      out.push_back({p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])});
    }
  }
  double a2 = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& p = out[k];
    const auto& q = out[(k + 1) % out.size()];
    a2 += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a2;
}

// clip polygon carrying a second value channel by {va < 0}
std::vector<std::array<double, 4>> clip_first(const std::vector<std::array<double, 4>>& poly) {
  std::vector<std::array<double, 4>> out;
  std::size_t m = poly.size();
  for (std::size_t k = 0; k < m; ++k) {
    const auto& p = poly[k];
    const auto& q = poly[(k + 1) % m];
    bool pin = p[2] < 0, qin = q[2] < 0;
    if (pin) out.push_back(p);
    if (pin != qin) {
      double s = p[2] / (p[2] - q[2]);
      out.push_back({p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1]), 0.0,
                     p[3] + s * (q[3] - p[3])});
    }
  }
  return out;
}

}  // namespace

ElementCoefficient sigma_from_levelset(const StructuredMesh& mesh, const LevelSet& phi,
                                       double sigma_plus, double sigma_minus, SigmaRule rule) {
  if (!(sigma_plus > 0) || !(sigma_minus > 0))
    throw InvalidCoefficientError("sigma_from_levelset: conductivities must be positive");
  if (static_cast<int>(phi.phi.size()) != mesh.node_count())
    throw DimensionError("sigma_from_levelset: phi size != node count");
  ElementCoefficient sigma(mesh.tri_count());
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& v = mesh.tri[t];
    if (rule == SigmaRule::vertex_average) {
      double avg = (phi.phi[v[0]] + phi.phi[v[1]] + phi.phi[v[2]]) / 3.0;
      sigma[t] = avg < 0 ? sigma_plus : sigma_minus;
    } else {
      double lo = std::min({phi.phi[v[0]], phi.phi[v[1]], phi.phi[v[2]]});
      double hi = std::max({phi.phi[v[0]], phi.phi[v[1]], phi.phi[v[2]]});
      if (hi < 0) {
        sigma[t] = sigma_plus;  // uncut: skip the clipping round-off
      } else if (lo >= 0) {
        sigma[t] = sigma_minus;
      } else {
        std::vector<std::array<double, 3>> poly;
        for (int k = 0; k < 3; ++k) poly.push_back({mesh.x[v[k]], mesh.y[v[k]], phi.phi[v[k]]});
        double area = tri_geometry(mesh, t).area;
        double frac = std::clamp(clipped_area(poly) / area, 0.0, 1.0);
        sigma[t] = frac * sigma_plus + (1.0 - frac) * sigma_minus;
      }
    }
  }
  return sigma;
}

LevelSet llf_step(const StructuredMesh& mesh, const LevelSet& phi, const VectorField2& theta,
                  double dt) {
  if (!(dt > 0)) throw InvalidParameterError("llf_step: dt must be positive");
  if (static_cast<int>(theta.size()) != mesh.node_count())
    throw DimensionError("llf_step: theta size != node count");
  const int n = mesh.n;
  const double h = mesh.h;
  LevelSet out(mesh.node_count());
  const auto& f = phi.phi.v;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      int id = mesh.node_index(i, j);
      double pm = i > 0 ? (f[id] - f[mesh.node_index(i - 1, j)]) / h : 0;
      double pp = i < n ? (f[mesh.node_index(i + 1, j)] - f[id]) / h : 0;
      if (i == 0) pm = pp;
      if (i == n) pp = pm;
      double qm = j > 0 ? (f[id] - f[mesh.node_index(i, j - 1)]) / h : 0;
      double qp = j < n ? (f[mesh.node_index(i, j + 1)] - f[id]) / h : 0;
      if (j == 0) qm = qp;
      if (j == n) qp = qm;
      double tx = theta.x[id], ty = theta.y[id];
      double flux = tx * 0.5 * (pm + pp) + ty * 0.5 * (qm + qp)
                    - 0.5 * (pp - pm) * std::abs(tx) - 0.5 * (qp - qm) * std::abs(ty);
      out.phi[id] = f[id] - dt * flux;
    }
  }
  return out;
}

LevelSet advect(const StructuredMesh& mesh, const LevelSet& phi, const VectorField2& theta,
                double total_time, double cfl) {
  if (total_time < 0) throw InvalidParameterError("advect: total_time must be >= 0");
  double vel = 1e-14;
  for (std::size_t i = 0; i < theta.size(); ++i)
    vel = std::max({vel, std::abs(theta.x[i]), std::abs(theta.y[i])});
  double dt = cfl * mesh.h / vel;
  long full = static_cast<long>(std::floor(total_time / dt + 1e-9));
  double rem = total_time - full * dt;
  LevelSet cur = phi;
  for (long k = 0; k < full; ++k) cur = llf_step(mesh, cur, theta, dt);
  if (rem > 1e-12 * dt) cur = llf_step(mesh, cur, theta, rem);
  return cur;
}

double gradient_norm_deviation(const StructuredMesh& mesh, const LevelSet& phi) {
  const int n = mesh.n;
  const double h = mesh.h;
  std::vector<double> dev;
  dev.reserve(static_cast<std::size_t>(n - 1) * (n - 1));
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) {
      double gx = (phi.phi[mesh.node_index(i + 1, j)] - phi.phi[mesh.node_index(i - 1, j)]) / (2 * h);
      double gy = (phi.phi[mesh.node_index(i, j + 1)] - phi.phi[mesh.node_index(i, j - 1)]) / (2 * h);
      dev.push_back(std::abs(std::hypot(gx, gy) - 1.0));
    }
  if (dev.empty()) return 0;
  auto mid = dev.begin() + dev.size() / 2;
  std::nth_element(dev.begin(), mid, dev.end());
  return *mid;
}

double sublevel_area(const StructuredMesh& mesh, const LevelSet& phi) {
  double area = 0;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& v = mesh.tri[t];
    std::vector<std::array<double, 3>> poly;
    for (int k = 0; k < 3; ++k) poly.push_back({mesh.x[v[k]], mesh.y[v[k]], phi.phi[v[k]]});
    area += clipped_area(poly);
  }
  return area;
}

std::array<double, 2> sublevel_centroid(const StructuredMesh& mesh, const LevelSet& phi) {
  double area = 0, cx = 0, cy = 0;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& v = mesh.tri[t];
    std::vector<std::array<double, 2>> out;
    {
      std::vector<std::array<double, 3>> poly;
      for (int k = 0; k < 3; ++k) poly.push_back({mesh.x[v[k]], mesh.y[v[k]], phi.phi[v[k]]});
      std::size_t m = poly.size();
      for (std::size_t k = 0; k < m; ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % m];
        bool pin = p[2] < 0, qin = q[2] < 0;
        if (pin) out.push_back({p[0], p[1]});
        if (pin != qin) {
          double s = p[2] / (p[2] - q[2]);
          out.push_back({p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])});
        }
      }
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      const auto& p = out[k];
      const auto& q = out[(k + 1) % out.size()];
      double w = p[0] * q[1] - q[0] * p[1];
      area += 0.5 * w;
      cx += w * (p[0] + q[0]) / 6.0;
      cy += w * (p[1] + q[1]) / 6.0;
    }
  }
  if (area <= 0) throw DegenerateDataError("sublevel_centroid: empty negative region");
  return {cx / area, cy / area};
}

double sublevel_symmetric_difference(const StructuredMesh& mesh, const LevelSet& a,
                                     const LevelSet& b) {
  double inter = 0;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& v = mesh.tri[t];
    std::vector<std::array<double, 4>> poly;
    for (int k = 0; k < 3; ++k)
      poly.push_back({mesh.x[v[k]], mesh.y[v[k]], a.phi[v[k]], b.phi[v[k]]});
    auto cut = clip_first(poly);
    if (cut.size() < 3) continue;
    std::vector<std::array<double, 3>> second;
    for (const auto& p : cut) second.push_back({p[0], p[1], p[3]});
    inter += clipped_area(second);
  }
  return sublevel_area(mesh, a) + sublevel_area(mesh, b) - 2.0 * inter;
}

std::vector<std::array<double, 2>> zero_crossing_points(const StructuredMesh& mesh,
                                                        const LevelSet& phi) {
  std::vector<std::array<double, 2>> pts;
  auto visit = [&](int a, int b) {
    double va = phi.phi[a], vb = phi.phi[b];
    if ((va < 0) == (vb < 0)) return;
    double s = va / (va - vb);
    pts.push_back({mesh.x[a] + s * (mesh.x[b] - mesh.x[a]),
                   mesh.y[a] + s * (mesh.y[b] - mesh.y[a])});
  };
  // every unique edge of the triangulation: horizontal, vertical, diagonal
  for (int j = 0; j <= mesh.n; ++j)
    for (int i = 0; i < mesh.n; ++i) visit(mesh.node_index(i, j), mesh.node_index(i + 1, j));
  for (int j = 0; j < mesh.n; ++j)
    for (int i = 0; i <= mesh.n; ++i) visit(mesh.node_index(i, j), mesh.node_index(i, j + 1));
  for (int j = 0; j < mesh.n; ++j)
    for (int i = 0; i < mesh.n; ++i) visit(mesh.node_index(i, j), mesh.node_index(i + 1, j + 1));
  return pts;
}

double hausdorff_distance(const std::vector<std::array<double, 2>>& a,
                          const std::vector<std::array<double, 2>>& b) {
  if (a.empty() || b.empty())
    throw DegenerateDataError("hausdorff_distance: empty point set");
  auto one_sided = [](const auto& s, const auto& t) {
    double worst = 0;
    for (const auto& p : s) {
      double best = std::numeric_limits<double>::max();
      for (const auto& q : t) best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace eitshape
