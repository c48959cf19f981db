#pragma once

#include <functional>
#include <vector>

#include "eitshape/mesh.hpp"

namespace eitshape {

// Symmetric sparse matrix in compressed row form.
struct SparseMatrix {
  int n = 0;
  std::vector<int> ptr, col;
  std::vector<double> val;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  // Index into val for entry (i, j); -1 if not in the pattern.
  int find(int i, int j) const;
};

// Assembled system with its constraint set, per the Dirichlet-elimination
// convention: constrained rows/cols are cleared, diagonal set to 1, rhs set
// to the prescribed value, and couplings moved to the right-hand side.
struct SparseSystem {
  SparseMatrix A;
  std::vector<double> rhs;
  std::vector<int> fixed_nodes;
  std::vector<double> fixed_values;
};

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iter_per_node = 10;
  const ScalarField* warm_start = nullptr;  // optional initial CG iterate
};

struct SolveStats {
  long iterations = 0;
  double relative_residual = 0;
};

// Builds the P1 sparsity pattern and sigma-independent element matrices once
// per mesh so repeated assemblies only refill values.
class StiffnessAssembler {
 public:
  explicit StiffnessAssembler(const StructuredMesh& mesh);
  SparseMatrix assemble(const ElementCoefficient& sigma) const;
  const StructuredMesh& mesh() const { return mesh_; }

 private:
  const StructuredMesh& mesh_;
  SparseMatrix pattern_;                 // values unused
  std::vector<std::array<double, 9>> local_;   // element stiffness, row-major
  std::vector<std::array<int, 9>> slot_;       // CSR positions per element
};

SparseMatrix assemble_stiffness(const StructuredMesh& mesh, const ElementCoefficient& sigma);

// Diagonal of the P1 mass matrix by vertex quadrature (area/3 per incidence).
std::vector<double> lumped_mass(const StructuredMesh& mesh);

// Edge-trapezoid load for piecewise-constant flux g over the given sides.
std::vector<double> assemble_boundary_load(const StructuredMesh& mesh, SideValues g, SideSet sides);

// Edge-trapezoid arc weights per node over the given sides (zero elsewhere).
std::vector<double> boundary_mass(const StructuredMesh& mesh, SideSet sides);

// Symmetric row/column elimination with exact value substitution.
void apply_dirichlet(SparseMatrix& A, std::vector<double>& rhs,
                     const std::vector<int>& nodes, const std::vector<double>& values);

// Eliminated matrix prepared once for a fixed constraint set; solves against
// many load vectors and prescribed-value sets without re-assembly.
class ConstrainedSystem {
 public:
  ConstrainedSystem(const SparseMatrix& A, std::vector<int> fixed_nodes);
  ScalarField solve(const std::vector<double>& load, const std::vector<double>& values,
                    const SolveOptions& opts = {}, SolveStats* stats = nullptr) const;

 private:
  SparseMatrix A_;  // rows/cols of fixed nodes cleared, unit diagonal
  std::vector<int> fixed_;
  std::vector<std::vector<std::pair<int, double>>> couplings_;  // original off-row entries
};

// Jacobi-preconditioned conjugate gradients; throws SolverError on
// non-convergence within max_iter_per_node * n iterations.
ScalarField pcg_solve(const SparseMatrix& A, const std::vector<double>& rhs,
                      const SolveOptions& opts = {}, SolveStats* stats = nullptr);

// General mixed solve: -div(sigma grad u) = f, flux g on flux_sides,
// Dirichlet trace h on dirichlet_sides.
ScalarField solve_mixed(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                        const ScalarField& f, SideValues g, SideSet flux_sides,
                        SideSet dirichlet_sides, const ScalarField& h,
                        const SolveOptions& opts = {});

// State with Dirichlet data on top/bottom and flux on left/right (u_n).
ScalarField solve_state_neumann(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                                const ScalarField& f, SideValues g, const ScalarField& h,
                                const SolveOptions& opts = {});

// State with Dirichlet data on left/right and flux on top/bottom (u_d).
ScalarField solve_state_dirichlet(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                                  const ScalarField& f, SideValues g, const ScalarField& h,
                                  const SolveOptions& opts = {});

// Adjoint for the Dirichlet-data state: sigma-weighted form against
// -alpha1 (u_d - u_n), homogeneous Dirichlet on `dirichlet`.
ScalarField solve_adjoint_d(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                            const ScalarField& u_d, const ScalarField& u_n, double alpha1,
                            SideSet dirichlet = kLeftRight, const SolveOptions& opts = {});

// Adjoint for the flux state: +alpha1 (u_d - u_n) volume term and
// -alpha2 (u_n - h) boundary term on `measurement`, homogeneous Dirichlet
// on `dirichlet`.
ScalarField solve_adjoint_n(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                            const ScalarField& u_d, const ScalarField& u_n, const ScalarField& h,
                            double alpha1, double alpha2, SideSet dirichlet = kTopBottom,
                            SideSet measurement = kLeftRight, const SolveOptions& opts = {});

// Pure-flux problem on all four sides with one grounded node fixing the
// additive constant.
ScalarField solve_grounded_neumann(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                                   SideValues g, int ground_node = 0,
                                   const SolveOptions& opts = {});

// Field utilities.
std::array<double, 2> tri_gradient(const StructuredMesh& mesh, int t, const ScalarField& u);
double tri_average(const StructuredMesh& mesh, int t, const ScalarField& u);
double energy(const StructuredMesh& mesh, const ElementCoefficient& sigma, const ScalarField& u);
double eval_p1(const StructuredMesh& mesh, const ScalarField& u, double px, double py);
double h1_norm(const StructuredMesh& mesh, const VectorField2& theta);
double max_point_norm(const VectorField2& theta);
ScalarField sample_nodal(const StructuredMesh& mesh,
                         const std::function<double(double, double)>& fn);

}  // namespace eitshape
