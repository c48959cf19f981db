#include "eitshape/shapederiv.hpp"

#include <cmath>
#include <numbers>

namespace eitshape {

namespace {

void check_field(const StructuredMesh& mesh, const ScalarField& f, const char* what) {
  if (static_cast<int>(f.size()) != mesh.node_count())
    throw DimensionError(std::string("assemble_tensors: ") + what + " size != node count");
}

}  // namespace

TensorRep assemble_tensors(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                           const ScalarField& f, const ScalarField& u_d, const ScalarField& u_n,
                           const ScalarField& p_d, const ScalarField& p_n, double alpha1) {
  if (static_cast<int>(sigma.size()) != mesh.tri_count())
    throw DimensionError("assemble_tensors: sigma size != triangle count");
  check_field(mesh, f, "f");
  check_field(mesh, u_d, "u_d");
  check_field(mesh, u_n, "u_n");
  check_field(mesh, p_d, "p_d");
  check_field(mesh, p_n, "p_n");
  TensorRep t;
  t.S1.resize(mesh.tri_count());
  t.S0.resize(mesh.tri_count());
  for (int e = 0; e < mesh.tri_count(); ++e) {
    auto gud = tri_gradient(mesh, e, u_d);
    auto gun = tri_gradient(mesh, e, u_n);
    auto gpd = tri_gradient(mesh, e, p_d);
    auto gpn = tri_gradient(mesh, e, p_n);
    double s = sigma[e];
    double dot = gud[0] * gpd[0] + gud[1] * gpd[1] + gun[0] * gpn[0] + gun[1] * gpn[1];
    double misfit = tri_average(mesh, e, u_d) - tri_average(mesh, e, u_n);
    double fbar = tri_average(mesh, e, f);
    double pbar = tri_average(mesh, e, p_d) + tri_average(mesh, e, p_n);
    double iso = s * dot + 0.5 * alpha1 * misfit * misfit - fbar * pbar;
    auto& S1 = t.S1[e];
    S1[0] = -s * (2 * gud[0] * gpd[0] + 2 * gun[0] * gpn[0]) + iso;
    S1[3] = -s * (2 * gud[1] * gpd[1] + 2 * gun[1] * gpn[1]) + iso;
    S1[1] = S1[2] =
        -s * (gud[0] * gpd[1] + gpd[0] * gud[1] + gun[0] * gpn[1] + gpn[0] * gun[1]);
    auto gf = tri_gradient(mesh, e, f);
    t.S0[e] = {-pbar * gf[0], -pbar * gf[1]};
  }
  return t;
}

void tensor_axpy(TensorRep& acc, double w, const TensorRep& t) {
  if (acc.size() == 0) {
    acc.S1.assign(t.S1.size(), {0, 0, 0, 0});
    acc.S0.assign(t.S0.size(), {0, 0});
  }
  if (acc.size() != t.size()) throw DimensionError("tensor_axpy: element count mismatch");
  for (std::size_t e = 0; e < t.size(); ++e) {
    for (int k = 0; k < 4; ++k) acc.S1[e][k] += w * t.S1[e][k];
    for (int k = 0; k < 2; ++k) acc.S0[e][k] += w * t.S0[e][k];
  }
}

double eval_dJ(const StructuredMesh& mesh, const TensorRep& tensors, const VectorField2& theta) {
  if (static_cast<int>(tensors.size()) != mesh.tri_count())
    throw DimensionError("eval_dJ: tensor element count mismatch");
  if (static_cast<int>(theta.size()) != mesh.node_count())
    throw DimensionError("eval_dJ: theta size != node count");
  ScalarField tx, ty;
  tx.v = theta.x;
  ty.v = theta.y;
  double acc = 0;
  for (int e = 0; e < mesh.tri_count(); ++e) {
    double area = tri_geometry(mesh, e).area;
    auto gx = tri_gradient(mesh, e, tx);  // row 0 of Dtheta
    auto gy = tri_gradient(mesh, e, ty);  // row 1
    const auto& S1 = tensors.S1[e];
    double frob = S1[0] * gx[0] + S1[1] * gx[1] + S1[2] * gy[0] + S1[3] * gy[1];
    double bx = tri_average(mesh, e, tx);
    double by = tri_average(mesh, e, ty);
    acc += area * (frob + tensors.S0[e][0] * bx + tensors.S0[e][1] * by);
  }
  return acc;
}

VectorField2 dJ_load_vector(const StructuredMesh& mesh, const TensorRep& tensors) {
  if (static_cast<int>(tensors.size()) != mesh.tri_count())
    throw DimensionError("dJ_load_vector: tensor element count mismatch");
  VectorField2 load(mesh.node_count());
  for (int e = 0; e < mesh.tri_count(); ++e) {
    TriGeometry g = tri_geometry(mesh, e);
    const auto& S1 = tensors.S1[e];
    const auto& S0 = tensors.S0[e];
    for (int k = 0; k < 3; ++k) {
      int v = mesh.tri[e][k];
      load.x[v] += g.area * (S1[0] * g.gx[k] + S1[1] * g.gy[k] + S0[0] / 3.0);
      load.y[v] += g.area * (S1[2] * g.gx[k] + S1[3] * g.gy[k] + S0[1] / 3.0);
    }
  }
  return load;
}

LevelSet perturb_levelset(const StructuredMesh& mesh, const LevelSet& phi,
                          const VectorField2& theta, double t, TransportKind kind) {
  if (kind == TransportKind::llf) return advect(mesh, phi, theta, t);
  LevelSet out(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i)
    out.phi[i] = eval_p1(mesh, phi.phi, mesh.x[i] - t * theta.x[i], mesh.y[i] - t * theta.y[i]);
  return out;
}

VectorField2 random_smooth_field(const StructuredMesh& mesh, std::uint64_t seed, int kmax) {
  GaussianSampler rng(seed);
  std::vector<std::array<double, 2>> coeff;
  for (int kx = 1; kx <= kmax; ++kx)
    for (int ky = 1; ky <= kmax; ++ky)
      coeff.push_back({rng.next() / (kx * kx + ky * ky), rng.next() / (kx * kx + ky * ky)});
  VectorField2 theta(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    double px = mesh.x[i], py = mesh.y[i];
    double vx = 0, vy = 0;
    int c = 0;
    for (int kx = 1; kx <= kmax; ++kx)
      for (int ky = 1; ky <= kmax; ++ky) {
        double basis = std::sin(kx * std::numbers::pi * px) * std::sin(ky * std::numbers::pi * py);
        vx += coeff[c][0] * basis;
        vy += coeff[c][1] * basis;
        ++c;
      }
    theta.x[i] = vx;
    theta.y[i] = vy;
  }
  for (int b : boundary_nodes(mesh, kAllSides)) theta.x[b] = theta.y[b] = 0;
  double peak = 0;
  for (int i = 0; i < mesh.node_count(); ++i)
    peak = std::max({peak, std::abs(theta.x[i]), std::abs(theta.y[i])});
  if (peak > 0)
    for (int i = 0; i < mesh.node_count(); ++i) {
      theta.x[i] /= peak;
      theta.y[i] /= peak;
    }
  theta.boundary_zero = true;
  return theta;
}

VectorField2 mollifier_field(const StructuredMesh& mesh, double cx, double cy, double radius,
                             double dirx, double diry) {
  if (!(radius > 0)) throw InvalidParameterError("mollifier_field: radius must be positive");
  double norm = std::hypot(dirx, diry);
  if (norm == 0) throw InvalidParameterError("mollifier_field: zero direction");
  VectorField2 theta(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    double s2 = (std::pow(mesh.x[i] - cx, 2) + std::pow(mesh.y[i] - cy, 2)) / (radius * radius);
    if (s2 >= 1.0) continue;
    double w = std::exp(1.0 - 1.0 / (1.0 - s2));
    theta.x[i] = w * dirx / norm;
    theta.y[i] = w * diry / norm;
  }
  theta.boundary_zero = true;
  for (int b : boundary_nodes(mesh, kAllSides))
    if (theta.x[b] != 0 || theta.y[b] != 0) theta.boundary_zero = false;
  return theta;
}

}  // namespace eitshape
