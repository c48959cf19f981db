#include "eitshape/descent.hpp"

namespace eitshape {

namespace {

SparseMatrix build_form_matrix(const StructuredMesh& mesh, const DescentConfig& config) {
  if (!(config.tol > 0)) throw InvalidParameterError("descent: tolerance must be positive");
  if (config.mass_weight < 0) throw InvalidParameterError("descent: mass weight must be >= 0");
  ElementCoefficient one(mesh.tri_count(), 1.0);
  SparseMatrix A = assemble_stiffness(mesh, one);
  if (config.mass_weight > 0) {
    std::vector<double> m = lumped_mass(mesh);
    for (int i = 0; i < A.n; ++i) A.val[A.find(i, i)] += config.mass_weight * m[i];
  }
  return A;
}

}  // namespace

DescentSolver::DescentSolver(const StructuredMesh& mesh, const DescentConfig& config)
    : mesh_(mesh),
      config_(config),
      system_(build_form_matrix(mesh, config), boundary_nodes(mesh, kAllSides)) {}

VectorField2 DescentSolver::solve(const TensorRep& tensors, SolveStats* stats) {
  VectorField2 load = dJ_load_vector(mesh_, tensors);
  std::vector<double> rhs_x(mesh_.node_count()), rhs_y(mesh_.node_count());
  for (int i = 0; i < mesh_.node_count(); ++i) {
    rhs_x[i] = -load.x[i];
    rhs_y[i] = -load.y[i];
  }
  std::vector<double> zeros(boundary_nodes(mesh_, kAllSides).size(), 0.0);
  SolveOptions opts;
  opts.rel_tol = config_.tol;
  opts.max_iter_per_node = config_.max_iter_per_node;
  SolveStats sx, sy;
  opts.warm_start = warm_x_.size() ? &warm_x_ : nullptr;
  warm_x_ = system_.solve(rhs_x, zeros, opts, &sx);
  opts.warm_start = warm_y_.size() ? &warm_y_ : nullptr;
  warm_y_ = system_.solve(rhs_y, zeros, opts, &sy);
  if (stats) {
    stats->iterations = sx.iterations + sy.iterations;
    stats->relative_residual = std::max(sx.relative_residual, sy.relative_residual);
  }
  VectorField2 theta(mesh_.node_count());
  theta.x = warm_x_.v;
  theta.y = warm_y_.v;
  theta.boundary_zero = true;
  return theta;
}

VectorField2 solve_descent(const StructuredMesh& mesh, const TensorRep& tensors,
                           const DescentConfig& config) {
  DescentSolver solver(mesh, config);
  return solver.solve(tensors);
}

double descent_form(const StructuredMesh& mesh, const VectorField2& a, const VectorField2& b,
                    double mass_weight) {
  if (static_cast<int>(a.size()) != mesh.node_count() ||
      static_cast<int>(b.size()) != mesh.node_count())
    throw DimensionError("descent_form: field size != node count");
  ScalarField ax, ay, bx, by;
  ax.v = a.x;
  ay.v = a.y;
  bx.v = b.x;
  by.v = b.y;
  double acc = 0;
  for (int e = 0; e < mesh.tri_count(); ++e) {
    double area = tri_geometry(mesh, e).area;
    auto gax = tri_gradient(mesh, e, ax), gay = tri_gradient(mesh, e, ay);
    auto gbx = tri_gradient(mesh, e, bx), gby = tri_gradient(mesh, e, by);
    acc += area * (gax[0] * gbx[0] + gax[1] * gbx[1] + gay[0] * gby[0] + gay[1] * gby[1]);
  }
  if (mass_weight > 0) {
    std::vector<double> m = lumped_mass(mesh);
    for (int i = 0; i < mesh.node_count(); ++i)
      acc += mass_weight * m[i] * (a.x[i] * b.x[i] + a.y[i] * b.y[i]);
  }
  return acc;
}

}  // namespace eitshape
