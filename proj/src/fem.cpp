#include "eitshape/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eitshape {

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

int SparseMatrix::find(int i, int j) const {
  auto first = col.begin() + ptr[i];
  auto last = col.begin() + ptr[i + 1];
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<int>(it - col.begin());
}

StiffnessAssembler::StiffnessAssembler(const StructuredMesh& mesh) : mesh_(mesh) {
  const int n = mesh.node_count();
  std::vector<std::vector<int>> adj(n);
  for (auto& row : adj) row.reserve(8);
  for (const auto& t : mesh.tri)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) adj[t[a]].push_back(t[b]);
  pattern_.n = n;
  pattern_.ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    pattern_.ptr[i + 1] = pattern_.ptr[i] + static_cast<int>(row.size());
  }
  pattern_.col.reserve(pattern_.ptr[n]);
  for (int i = 0; i < n; ++i)
    pattern_.col.insert(pattern_.col.end(), adj[i].begin(), adj[i].end());
  pattern_.val.assign(pattern_.col.size(), 0.0);

  local_.resize(mesh.tri_count());
  slot_.resize(mesh.tri_count());
  for (int t = 0; t < mesh.tri_count(); ++t) {
    TriGeometry g = tri_geometry(mesh, t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        local_[t][a * 3 + b] = g.area * (g.gx[a] * g.gx[b] + g.gy[a] * g.gy[b]);
        slot_[t][a * 3 + b] = pattern_.find(mesh.tri[t][a], mesh.tri[t][b]);
      }
  }
}

SparseMatrix StiffnessAssembler::assemble(const ElementCoefficient& sigma) const {
  if (static_cast<int>(sigma.size()) != mesh_.tri_count())
    throw DimensionError("assemble_stiffness: sigma size != triangle count");
  for (double s : sigma.v)
    if (!(s > 0)) throw InvalidCoefficientError("assemble_stiffness: sigma must be positive");
  SparseMatrix A = pattern_;
  std::fill(A.val.begin(), A.val.end(), 0.0);
  for (int t = 0; t < mesh_.tri_count(); ++t) {
    double s = sigma[t];
    for (int k = 0; k < 9; ++k) A.val[slot_[t][k]] += s * local_[t][k];
  }
  return A;
}

SparseMatrix assemble_stiffness(const StructuredMesh& mesh, const ElementCoefficient& sigma) {
  return StiffnessAssembler(mesh).assemble(sigma);
}

std::vector<double> lumped_mass(const StructuredMesh& mesh) {
  std::vector<double> m(mesh.node_count(), 0.0);
  for (int t = 0; t < mesh.tri_count(); ++t) {
    double third = tri_geometry(mesh, t).area / 3.0;
    for (int v : mesh.tri[t]) m[v] += third;
  }
  return m;
}

std::vector<double> assemble_boundary_load(const StructuredMesh& mesh, SideValues g, SideSet sides) {
  if (sides.empty()) throw InvalidParameterError("assemble_boundary_load: empty side set");
  std::vector<double> load(mesh.node_count(), 0.0);
  for (int s = 0; s < 4; ++s) {
    Side side = static_cast<Side>(s);
    if (!sides.contains(side)) continue;
    for (const auto& e : mesh.edges(side)) {
      double half = 0.5 * mesh.h * g[side];
      load[e[0]] += half;
      load[e[1]] += half;
    }
  }
  return load;
}

std::vector<double> boundary_mass(const StructuredMesh& mesh, SideSet sides) {
  std::vector<double> w(mesh.node_count(), 0.0);
  for (int s = 0; s < 4; ++s) {
    Side side = static_cast<Side>(s);
    if (!sides.contains(side)) continue;
    for (const auto& e : mesh.edges(side)) {
      w[e[0]] += 0.5 * mesh.h;
      w[e[1]] += 0.5 * mesh.h;
    }
  }
  return w;
}

void apply_dirichlet(SparseMatrix& A, std::vector<double>& rhs,
                     const std::vector<int>& nodes, const std::vector<double>& values) {
  if (nodes.size() != values.size())
    throw DimensionError("apply_dirichlet: node/value count mismatch");
  std::vector<char> fixed(A.n, 0);
  for (std::size_t k = 0; k < nodes.size(); ++k) fixed[nodes[k]] = 1;
  // move couplings to the rhs, then clear rows and columns symmetrically
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    int c = nodes[k];
    for (int e = A.ptr[c]; e < A.ptr[c + 1]; ++e) {
      int j = A.col[e];
      if (!fixed[j]) rhs[j] -= A.val[e] * values[k];  // A symmetric: val(c,j) = val(j,c)
    }
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    int c = nodes[k];
    for (int e = A.ptr[c]; e < A.ptr[c + 1]; ++e) {
      int j = A.col[e];
      A.val[e] = (j == c) ? 1.0 : 0.0;
      if (j != c) {
        int back = A.find(j, c);
        if (back >= 0) A.val[back] = 0.0;
      }
    }
    rhs[c] = values[k];
  }
}

ConstrainedSystem::ConstrainedSystem(const SparseMatrix& A, std::vector<int> fixed_nodes)
    : A_(A), fixed_(std::move(fixed_nodes)) {
  std::vector<char> fixed(A.n, 0);
  for (int c : fixed_) fixed[c] = 1;
  couplings_.resize(fixed_.size());
  for (std::size_t k = 0; k < fixed_.size(); ++k) {
    int c = fixed_[k];
    for (int e = A.ptr[c]; e < A.ptr[c + 1]; ++e)
      if (!fixed[A.col[e]]) couplings_[k].emplace_back(A.col[e], A.val[e]);
  }
  std::vector<double> dummy_rhs(A.n, 0.0);
  apply_dirichlet(A_, dummy_rhs, fixed_, std::vector<double>(fixed_.size(), 0.0));
}

ScalarField ConstrainedSystem::solve(const std::vector<double>& load,
                                     const std::vector<double>& values, const SolveOptions& opts,
                                     SolveStats* stats) const {
  if (values.size() != fixed_.size())
    throw DimensionError("ConstrainedSystem::solve: prescribed value count mismatch");
  std::vector<double> rhs = load;
  for (std::size_t k = 0; k < fixed_.size(); ++k) {
    for (const auto& [j, a] : couplings_[k]) rhs[j] -= a * values[k];
    rhs[fixed_[k]] = values[k];
  }
  return pcg_solve(A_, rhs, opts, stats);
}

ScalarField pcg_solve(const SparseMatrix& A, const std::vector<double>& rhs,
                      const SolveOptions& opts, SolveStats* stats) {
  const int n = A.n;
  ScalarField x(n);
  if (opts.warm_start) {
    if (static_cast<int>(opts.warm_start->size()) != n)
      throw DimensionError("pcg_solve: warm start size mismatch");
    x.v = opts.warm_start->v;
  }
  double bnorm = std::sqrt(std::inner_product(rhs.begin(), rhs.end(), rhs.begin(), 0.0));
  if (bnorm == 0.0) {
    x.v.assign(n, 0.0);
    if (stats) *stats = {0, 0.0};
    return x;
  }
  std::vector<double> diag(n, 1.0);
  for (int i = 0; i < n; ++i) {
    int d = A.find(i, i);
    if (d >= 0 && A.val[d] != 0.0) diag[i] = A.val[d];
  }
  std::vector<double> r(n), z(n), p(n), Ap(n);
  A.multiply(x.v, Ap);
  for (int i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
  for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  long max_iter = static_cast<long>(opts.max_iter_per_node) * n;
  double rel = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0)) / bnorm;
  long it = 0;
  while (rel > opts.rel_tol) {
    if (it >= max_iter)
      throw SolverError("pcg_solve: no convergence, relative residual " + std::to_string(rel),
                        rel, it);
    A.multiply(p, Ap);
    double pAp = std::inner_product(p.begin(), p.end(), Ap.begin(), 0.0);
    if (pAp <= 0)
      throw SolverError("pcg_solve: matrix not positive definite along search direction", rel, it);
    double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) x.v[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
    for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    double rz_next = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    double beta = rz_next / rz;
    rz = rz_next;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rel = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0)) / bnorm;
    ++it;
  }
  if (stats) *stats = {it, rel};
  return x;
}

namespace {

void check_nodal(const StructuredMesh& mesh, const ScalarField& f, const char* what) {
  if (static_cast<int>(f.size()) != mesh.node_count())
    throw DimensionError(std::string(what) + ": field size != node count");
}

ScalarField solve_constrained(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                              std::vector<double> load, const std::vector<int>& fixed,
                              const std::vector<double>& fixed_vals, const SolveOptions& opts) {
  ConstrainedSystem sys(assemble_stiffness(mesh, sigma), fixed);
  return sys.solve(load, fixed_vals, opts);
}

}  // namespace

ScalarField solve_mixed(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                        const ScalarField& f, SideValues g, SideSet flux_sides,
                        SideSet dirichlet_sides, const ScalarField& h, const SolveOptions& opts) {
  check_nodal(mesh, f, "solve_mixed f");
  check_nodal(mesh, h, "solve_mixed h");
  if (dirichlet_sides.empty())
    throw InvalidParameterError("solve_mixed: Dirichlet side set must be nonempty");
  std::vector<double> load(mesh.node_count(), 0.0);
  std::vector<double> mass = lumped_mass(mesh);
  for (int i = 0; i < mesh.node_count(); ++i) load[i] = mass[i] * f[i];
  if (!flux_sides.empty()) {
    std::vector<double> bl = assemble_boundary_load(mesh, g, flux_sides);
    for (int i = 0; i < mesh.node_count(); ++i) load[i] += bl[i];
  }
  std::vector<int> fixed = boundary_nodes(mesh, dirichlet_sides);
  std::vector<double> vals(fixed.size());
  for (std::size_t k = 0; k < fixed.size(); ++k) vals[k] = h[fixed[k]];
  return solve_constrained(mesh, sigma, std::move(load), fixed, vals, opts);
}

ScalarField solve_state_neumann(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                                const ScalarField& f, SideValues g, const ScalarField& h,
                                const SolveOptions& opts) {
  return solve_mixed(mesh, sigma, f, g, kLeftRight, kTopBottom, h, opts);
}

ScalarField solve_state_dirichlet(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                                  const ScalarField& f, SideValues g, const ScalarField& h,
                                  const SolveOptions& opts) {
  return solve_mixed(mesh, sigma, f, g, kTopBottom, kLeftRight, h, opts);
}

ScalarField solve_adjoint_d(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                            const ScalarField& u_d, const ScalarField& u_n, double alpha1,
                            SideSet dirichlet, const SolveOptions& opts) {
  check_nodal(mesh, u_d, "solve_adjoint_d u_d");
  check_nodal(mesh, u_n, "solve_adjoint_d u_n");
  std::vector<double> mass = lumped_mass(mesh);
  std::vector<double> load(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i)
    load[i] = -alpha1 * mass[i] * (u_d[i] - u_n[i]);
  std::vector<int> fixed = boundary_nodes(mesh, dirichlet);
  return solve_constrained(mesh, sigma, std::move(load), fixed,
                           std::vector<double>(fixed.size(), 0.0), opts);
}

ScalarField solve_adjoint_n(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                            const ScalarField& u_d, const ScalarField& u_n, const ScalarField& h,
                            double alpha1, double alpha2, SideSet dirichlet, SideSet measurement,
                            const SolveOptions& opts) {
  check_nodal(mesh, u_d, "solve_adjoint_n u_d");
  check_nodal(mesh, u_n, "solve_adjoint_n u_n");
  check_nodal(mesh, h, "solve_adjoint_n h");
  std::vector<double> mass = lumped_mass(mesh);
  std::vector<double> load(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i)
    load[i] = alpha1 * mass[i] * (u_d[i] - u_n[i]);
  if (alpha2 != 0.0) {
    std::vector<double> w = boundary_mass(mesh, measurement);
    for (int i = 0; i < mesh.node_count(); ++i)
      if (w[i] != 0.0) load[i] -= alpha2 * w[i] * (u_n[i] - h[i]);
  }
  std::vector<int> fixed = boundary_nodes(mesh, dirichlet);
  return solve_constrained(mesh, sigma, std::move(load), fixed,
                           std::vector<double>(fixed.size(), 0.0), opts);
}

ScalarField solve_grounded_neumann(const StructuredMesh& mesh, const ElementCoefficient& sigma,
                                   SideValues g, int ground_node, const SolveOptions& opts) {
  if (ground_node < 0 || ground_node >= mesh.node_count())
    throw InvalidParameterError("solve_grounded_neumann: ground node out of range");
  std::vector<double> load = assemble_boundary_load(mesh, g, kAllSides);
  return solve_constrained(mesh, sigma, std::move(load), {ground_node}, {0.0}, opts);
}

std::array<double, 2> tri_gradient(const StructuredMesh& mesh, int t, const ScalarField& u) {
  TriGeometry g = tri_geometry(mesh, t);
  const auto& v = mesh.tri[t];
  double gx = 0, gy = 0;
  for (int k = 0; k < 3; ++k) {
    gx += u[v[k]] * g.gx[k];
    gy += u[v[k]] * g.gy[k];
  }
  return {gx, gy};
}

double tri_average(const StructuredMesh& mesh, int t, const ScalarField& u) {
  const auto& v = mesh.tri[t];
  return (u[v[0]] + u[v[1]] + u[v[2]]) / 3.0;
}

double energy(const StructuredMesh& mesh, const ElementCoefficient& sigma, const ScalarField& u) {
  double e = 0;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    auto g = tri_gradient(mesh, t, u);
    e += sigma[t] * tri_geometry(mesh, t).area * (g[0] * g[0] + g[1] * g[1]);
  }
  return e;
}

double eval_p1(const StructuredMesh& mesh, const ScalarField& u, double px, double py) {
  check_nodal(mesh, u, "eval_p1");
  double cx = std::clamp(px, 0.0, 1.0);
  double cy = std::clamp(py, 0.0, 1.0);
  int i = std::min(static_cast<int>(cx / mesh.h), mesh.n - 1);
  int j = std::min(static_cast<int>(cy / mesh.h), mesh.n - 1);
  double lx = cx / mesh.h - i;  // local cell coordinates in [0,1]
  double ly = cy / mesh.h - j;
  double a = u[mesh.node_index(i, j)];
  double b = u[mesh.node_index(i + 1, j)];
  double c = u[mesh.node_index(i + 1, j + 1)];
  double d = u[mesh.node_index(i, j + 1)];
  // the cell diagonal runs from (0,0) to (1,1)
  if (ly <= lx) return a + (b - a) * lx + (c - b) * ly;
  return a + (c - d) * lx + (d - a) * ly;
}

double h1_norm(const StructuredMesh& mesh, const VectorField2& theta) {
  if (static_cast<int>(theta.size()) != mesh.node_count())
    throw DimensionError("h1_norm: field size != node count");
  double s = 0;
  ScalarField tx, ty;
  tx.v = theta.x;
  ty.v = theta.y;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    double area = tri_geometry(mesh, t).area;
    auto gx = tri_gradient(mesh, t, tx);
    auto gy = tri_gradient(mesh, t, ty);
    s += area * (gx[0] * gx[0] + gx[1] * gx[1] + gy[0] * gy[0] + gy[1] * gy[1]);
  }
  std::vector<double> mass = lumped_mass(mesh);
  for (int i = 0; i < mesh.node_count(); ++i)
    s += mass[i] * (theta.x[i] * theta.x[i] + theta.y[i] * theta.y[i]);
  return std::sqrt(s);
}

double max_point_norm(const VectorField2& theta) {
  double m = 0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    m = std::max(m, std::hypot(theta.x[i], theta.y[i]));
  return m;
}

ScalarField sample_nodal(const StructuredMesh& mesh,
                         const std::function<double(double, double)>& fn) {
  ScalarField f(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) f[i] = fn(mesh.x[i], mesh.y[i]);
  return f;
}

}  // namespace eitshape
