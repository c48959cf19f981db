#pragma once

#include "eitshape/fem.hpp"
#include "eitshape/shapederiv.hpp"

namespace eitshape {

struct DescentConfig {
  double tol = 1e-10;
  double mass_weight = 0.0;  // optional L2 term added to the gradient form
  int max_iter_per_node = 10;
};

// H1 smoothing of the shape gradient: theta solves B(theta, zeta) = -dJ(zeta)
// for all P1 zeta vanishing on the hold-all boundary, with
// B(v, w) = integral of Dv:Dw (+ mass_weight * v.w). The two components
// decouple, so one eliminated scalar system serves both solves.
class DescentSolver {
 public:
  DescentSolver(const StructuredMesh& mesh, const DescentConfig& config = {});
  VectorField2 solve(const TensorRep& tensors, SolveStats* stats = nullptr);

 private:
  const StructuredMesh& mesh_;
  DescentConfig config_;
  ConstrainedSystem system_;
  ScalarField warm_x_, warm_y_;  // previous components seed the next CG run
};

VectorField2 solve_descent(const StructuredMesh& mesh, const TensorRep& tensors,
                           const DescentConfig& config = {});

// The bilinear form B evaluated on two nodal fields.
double descent_form(const StructuredMesh& mesh, const VectorField2& a, const VectorField2& b,
                    double mass_weight = 0.0);

}  // namespace eitshape
