#pragma once

#include <cstdint>

#include "eitshape/fem.hpp"
#include "eitshape/levelset.hpp"

namespace eitshape {

// Tensor form of the distributed shape derivative: one 2x2 matrix S1 and one
// 2-vector S0 per triangle, built from P1 gradients (constant per element)
// and vertex-averaged field values.
struct TensorRep {
  std::vector<std::array<double, 4>> S1;  // row-major
  std::vector<std::array<double, 2>> S0;
  std::size_t size() const { return S1.size(); }
};

// Single-measurement tensors; multiple measurements combine by weighted
// summation (axpy) since assembly is linear in the adjoint pair.
TensorRep assemble_tensors(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                           const ScalarField& f, const ScalarField& u_d, const ScalarField& u_n,
                           const ScalarField& p_d, const ScalarField& p_n, double alpha1);

// acc += w * t
void tensor_axpy(TensorRep& acc, double w, const TensorRep& t);

// dJ(theta) = sum over elements of area * (S1 : Dtheta + S0 . theta_bar)
double eval_dJ(const StructuredMesh& mesh, const TensorRep& tensors, const VectorField2& theta);

// Nodal load L with L . theta = eval_dJ(theta) for every P1 field theta.
VectorField2 dJ_load_vector(const StructuredMesh& mesh, const TensorRep& tensors);

// Transport used by the perturbed-cost finite-difference oracle.  The
// semi-Lagrangian variant samples phi at the backtracked points x - t*theta(x)
// (dissipation-free, realizes the flow to O(t^2)); llf reuses the production
// advection scheme.
enum class TransportKind { semi_lagrangian, llf };

LevelSet perturb_levelset(const StructuredMesh& mesh, const LevelSet& phi,
                          const VectorField2& theta, double t,
                          TransportKind kind = TransportKind::semi_lagrangian);

// Random boundary-zero smooth field: sine series with decaying random
// coefficients, normalized to unit max component.
VectorField2 random_smooth_field(const StructuredMesh& mesh, std::uint64_t seed, int kmax = 3);

// Compactly supported bump of unit peak magnitude in direction (dirx, diry).
VectorField2 mollifier_field(const StructuredMesh& mesh, double cx, double cy, double radius,
                             double dirx, double diry);

}  // namespace eitshape
