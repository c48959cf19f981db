#pragma once

#include <array>
#include <functional>

#include "eitshape/common.hpp"

namespace eitshape {

using ScalarFn = std::function<double(double, double)>;
using VectorFn = std::function<std::array<double, 2>(double, double)>;

// Circle with a midpoint panel quadrature rule; the rule integrates constants
// exactly (sum of weights equals the perimeter) and smooth periodic
// integrands with spectral accuracy.
struct ParametricCircle {
  double cx = 0, cy = 0, r = 0;
  int panels = 0;
};

ParametricCircle make_circle(double cx, double cy, double r, int panels);

struct BoundaryPoint {
  double x, y;    // position on the circle
  double nx, ny;  // outward unit normal
  double t;       // angle parameter
};

using BoundaryFn = std::function<double(const BoundaryPoint&)>;

// Arc-length panel quadrature over the circle.
double boundary_integral(const ParametricCircle& c, const BoundaryFn& integrand);

// Polar-rule quadrature over the disk: composite 3-point Gauss-Legendre in
// the radius times midpoints in the angle.
double disk_integral(const ParametricCircle& c, const ScalarFn& integrand, int radial,
                     int angular);

struct GapReport {
  double lhs = 0;  // distributed (volume-form) value
  double rhs = 0;  // boundary-expression value
  double gap = 0;
};

// Compares the distributed form of the derivative of
// J = integral_Omega f + integral_boundary g against the boundary expression
// with density g1 = f + dg/dn + g*H. Derivatives of the closed forms are
// taken by high-order central differences.
GapReport volume_functional_check(const ParametricCircle& shape, const ScalarFn& f,
                                  const ScalarFn& g, const VectorFn& theta, int radial,
                                  int angular);

// Closed-form scalar with the derivatives the interior equilibrium check
// needs; keeping them closed-form isolates the one finite difference under
// test (the divergence of the tensor field).
struct SmoothFunction {
  ScalarFn value;
  VectorFn gradient;
  ScalarFn laplacian;
  VectorFn grad_laplacian;
};

enum class DataMode {
  consistent,  // f := -lap(u) + u and u_d := u + (-lap(p) + p)/2
  offset,      // u_d := u + 1: equilibrium must fail (negative control)
};

// Max norm over an interior sample grid of -div(S1) + S0 for the elliptic
// model problem, the divergence taken by second-order central differences of
// step delta. Consistent data make the residual O(delta^2).
double equilibrium_residual_check(const SmoothFunction& u, const SmoothFunction& p, DataMode mode,
                                  double delta, int grid = 9);

struct CorollaryReport {
  double max_projector_normal = 0;   // max |S1_if^T n| over panels (exact 0)
  double max_curvature_gap = 0;      // max |S1_if : D_Gamma n - alpha*H|
  double full_value = 0;             // all five terms of the boundary density
  double simplified_value = 0;       // alpha * H only
  double gap = 0;
};

// Interface tensor S1_if = alpha (I - n x n) with vanishing volume tensors:
// the general boundary density must collapse to alpha * H. The tangential
// divergence term is evaluated numerically to confirm it contributes
// nothing.
CorollaryReport corollary_simplification_check(const ParametricCircle& shape,
                                               const ScalarFn& alpha, const VectorFn& theta);

}  // namespace eitshape
