#include "eitshape/eit.hpp"

#include <algorithm>
#include <cmath>

namespace eitshape {

std::vector<SideValues> standard_fluxes() {
  SideValues g1{+1, +1, -1, -1};
  SideValues g2{+1, -1, +1, -1};
  SideValues g3{+1, -1, -1, +1};
  return {g1, g2, g3};
}

void EitProblem::validate() const {
  if (n < 2) throw InvalidParameterError("eit: mesh size n must be at least 2");
  if (sigma_plus == sigma_minus)
    throw InvalidParameterError("eit: sigma_plus must differ from sigma_minus");
  if (!(sigma_plus > 0) || !(sigma_minus > 0))
    throw InvalidCoefficientError("eit: conductivities must be positive");
  if (fluxes.empty()) throw InvalidParameterError("eit: at least one flux is required");
  if (!(alpha1 + alpha2 > 0)) throw InvalidParameterError("eit: alpha1 + alpha2 must be positive");
  if (alpha1 < 0 || alpha2 < 0) throw InvalidParameterError("eit: alpha weights must be >= 0");
  if (delta < 0) throw InvalidParameterError("eit: noise delta must be >= 0");
  if (!(gamma > 0)) throw InvalidParameterError("eit: gamma must be positive");
  if (max_iterations < 1) throw InvalidParameterError("eit: max_iterations must be >= 1");
  if (!(c_armijo > 0) || c_armijo >= 1)
    throw InvalidParameterError("eit: Armijo constant must lie in (0,1)");
  if (max_backtracks < 0) throw InvalidParameterError("eit: max_backtracks must be >= 0");
  if (stop_patience < 1) throw InvalidParameterError("eit: stop_patience must be >= 1");
  if (!(cfl > 0) || cfl > 1) throw InvalidParameterError("eit: cfl must lie in (0,1]");
  if (!(cg_tol > 0)) throw InvalidParameterError("eit: cg_tol must be positive");
  if ((dirichlet_d.mask | dirichlet_n.mask) != kAllSides.mask ||
      (dirichlet_d.mask & dirichlet_n.mask) != 0)
    throw InvalidParameterError("eit: role side pairs must partition the boundary");
  for (const SideValues& g : fluxes)
    if (std::abs(g.left + g.right + g.top + g.bottom) > 1e-12)
      throw InvalidParameterError("eit: flux pattern must have zero total flux");
}

MeasurementSet synthesize_measurements(const EitProblem& problem, const ShapeSpec& true_shapes) {
  problem.validate();
  if (true_shapes.empty())
    throw InvalidShapeError("synthesize_measurements: true shape list is empty");
  StructuredMesh mesh = build_unit_square_mesh(problem.n);
  LevelSet phi = init_signed_distance(mesh, true_shapes);
  ElementCoefficient sigma = sigma_from_levelset(mesh, phi, problem.sigma_plus,
                                                 problem.sigma_minus, problem.sigma_rule);
  std::vector<int> bnodes = boundary_nodes(mesh, kAllSides);
  SolveOptions opts;
  opts.rel_tol = problem.cg_tol;
  GaussianSampler rng(problem.seed);
  MeasurementSet out;
  out.source_n = problem.n;
  out.delta = problem.delta;
  for (const SideValues& g : problem.fluxes) {
    ScalarField u = solve_grounded_neumann(mesh, sigma, g, 0, opts);
    Measurement meas;
    meas.clean = ScalarField(u.size());
    meas.noisy = ScalarField(u.size());
    double hinf = 0;
    for (int b : bnodes) hinf = std::max(hinf, std::abs(u[b]));
    for (int b : bnodes) {
      meas.clean[b] = u[b];
      meas.noisy[b] = u[b] + problem.delta * hinf * rng.next();
    }
    out.traces.push_back(std::move(meas));
  }
  return out;
}

double noise_level(const StructuredMesh& mesh, const MeasurementSet& measurements) {
  std::vector<double> w = boundary_mass(mesh, kAllSides);
  double num = 0, den = 0;
  for (const Measurement& m : measurements.traces) {
    if (static_cast<int>(m.clean.size()) != mesh.node_count() ||
        static_cast<int>(m.noisy.size()) != mesh.node_count())
      throw DimensionError("noise_level: trace size != node count");
    double d2 = 0, c2 = 0;
    for (int i = 0; i < mesh.node_count(); ++i) {
      double diff = m.noisy[i] - m.clean[i];
      d2 += w[i] * diff * diff;
      c2 += w[i] * m.clean[i] * m.clean[i];
    }
    num += std::sqrt(d2);
    den += std::sqrt(c2);
  }
  if (den <= 0) throw DegenerateDataError("noise_level: clean traces are identically zero");
  return num / den;
}

EitSolver::EitSolver(const EitProblem& problem)
    : problem_(problem),
      mesh_(build_unit_square_mesh(problem.n)),
      assembler_(mesh_),
      lumped_(lumped_mass(mesh_)),
      nodes_d_(boundary_nodes(mesh_, problem.dirichlet_d)),
      nodes_n_(boundary_nodes(mesh_, problem.dirichlet_n)),
      meas_weight_(boundary_mass(mesh_, problem.dirichlet_d)) {
  problem_.validate();
  for (const SideValues& g : problem_.fluxes)
    flux_load_.push_back(assemble_boundary_load(mesh_, g, kAllSides));
  warm_ud_.resize(problem_.fluxes.size());
  warm_un_.resize(problem_.fluxes.size());
  warm_pd_.resize(problem_.fluxes.size());
  warm_pn_.resize(problem_.fluxes.size());
}

void EitSolver::prepare_systems(const ElementCoefficient& sigma) {
  SparseMatrix A = assembler_.assemble(sigma);
  sys_d_ = std::make_unique<ConstrainedSystem>(A, nodes_d_);
  sys_n_ = std::make_unique<ConstrainedSystem>(A, nodes_n_);
  last_sigma_ = sigma;
}

double EitSolver::cost(MeasurementSet& measurements, const LevelSet& phi,
                       std::vector<FluxStates>* states_out) {
  const std::size_t nf = problem_.fluxes.size();
  if (measurements.traces.size() != nf)
    throw DimensionError("cost: measurement count != flux count");
  if (static_cast<int>(phi.phi.size()) != mesh_.node_count())
    throw DimensionError("cost: level set size != node count");
  ElementCoefficient sigma = sigma_from_levelset(mesh_, phi, problem_.sigma_plus,
                                                 problem_.sigma_minus, problem_.sigma_rule);
  prepare_systems(sigma);
  SolveOptions opts;
  opts.rel_tol = problem_.cg_tol;
  const bool freeze = !measurements.mu_frozen();
  std::vector<double> new_mu(nf, 0.0);
  std::vector<FluxStates> states(nf);
  double J = 0;
  for (std::size_t i = 0; i < nf; ++i) {
    const ScalarField& data = measurements.traces[i].noisy;
    std::vector<double> vals_d(nodes_d_.size()), vals_n(nodes_n_.size());
    for (std::size_t k = 0; k < nodes_d_.size(); ++k) vals_d[k] = data[nodes_d_[k]];
    for (std::size_t k = 0; k < nodes_n_.size(); ++k) vals_n[k] = data[nodes_n_[k]];
    opts.warm_start = warm_ud_[i].size() ? &warm_ud_[i] : nullptr;
    warm_ud_[i] = sys_d_->solve(flux_load_[i], vals_d, opts);
    opts.warm_start = warm_un_[i].size() ? &warm_un_[i] : nullptr;
    warm_un_[i] = sys_n_->solve(flux_load_[i], vals_n, opts);
    const ScalarField& u_d = warm_ud_[i];
    const ScalarField& u_n = warm_un_[i];
    double term = 0;
    for (int j = 0; j < mesh_.node_count(); ++j) {
      double misfit = u_d[j] - u_n[j];
      term += 0.5 * problem_.alpha1 * lumped_[j] * misfit * misfit;
    }
    if (problem_.alpha2 > 0)
      for (int j = 0; j < mesh_.node_count(); ++j) {
        double bm = u_n[j] - data[j];
        term += 0.5 * problem_.alpha2 * meas_weight_[j] * bm * bm;
      }
    if (freeze) {
      if (term < 1e-14)
        throw DegenerateInitializationError(
            "cost: first evaluation found a vanishing misfit term (flux " + std::to_string(i) +
            "); the initial guess already matches the data");
      new_mu[i] = 1.0 / term;
      J += 1.0;
    } else {
      J += measurements.mu[i] * term;
    }
    states[i] = FluxStates{u_d, u_n};
  }
  if (freeze) measurements.mu = std::move(new_mu);
  if (states_out) *states_out = std::move(states);
  return J;
}

std::vector<FluxAdjoints> EitSolver::adjoints(const MeasurementSet& measurements,
                                              const std::vector<FluxStates>& states) {
  if (!sys_d_ || !sys_n_) throw Error("adjoints: no preceding cost evaluation");
  const std::size_t nf = problem_.fluxes.size();
  if (states.size() != nf) throw DimensionError("adjoints: state count != flux count");
  SolveOptions opts;
  opts.rel_tol = problem_.cg_tol;
  std::vector<double> zeros_d(nodes_d_.size(), 0.0), zeros_n(nodes_n_.size(), 0.0);
  std::vector<FluxAdjoints> out(nf);
  std::vector<double> load(mesh_.node_count());
  for (std::size_t i = 0; i < nf; ++i) {
    const ScalarField& u_d = states[i].u_d;
    const ScalarField& u_n = states[i].u_n;
    for (int j = 0; j < mesh_.node_count(); ++j)
      load[j] = -problem_.alpha1 * lumped_[j] * (u_d[j] - u_n[j]);
    opts.warm_start = warm_pd_[i].size() ? &warm_pd_[i] : nullptr;
    warm_pd_[i] = sys_d_->solve(load, zeros_d, opts);
    const ScalarField& data = measurements.traces[i].noisy;
    for (int j = 0; j < mesh_.node_count(); ++j)
      load[j] = problem_.alpha1 * lumped_[j] * (u_d[j] - u_n[j]) -
                problem_.alpha2 * meas_weight_[j] * (u_n[j] - data[j]);
    opts.warm_start = warm_pn_[i].size() ? &warm_pn_[i] : nullptr;
    warm_pn_[i] = sys_n_->solve(load, zeros_n, opts);
    out[i] = FluxAdjoints{warm_pd_[i], warm_pn_[i]};
  }
  return out;
}

TensorRep EitSolver::weighted_tensors(const MeasurementSet& measurements,
                                      const std::vector<FluxStates>& states,
                                      const std::vector<FluxAdjoints>& adjoints) {
  if (!measurements.mu_frozen()) throw Error("weighted_tensors: weights not frozen yet");
  const std::size_t nf = problem_.fluxes.size();
  if (states.size() != nf || adjoints.size() != nf)
    throw DimensionError("weighted_tensors: field count != flux count");
  ScalarField fzero(mesh_.node_count());
  TensorRep acc;
  for (std::size_t i = 0; i < nf; ++i) {
    TensorRep t = assemble_tensors(mesh_, last_sigma_, fzero, states[i].u_d, states[i].u_n,
                                   adjoints[i].p_d, adjoints[i].p_n, problem_.alpha1);
    tensor_axpy(acc, measurements.mu[i], t);
  }
  return acc;
}

double displaced_cost(const EitProblem& problem, const MeasurementSet& measurements,
                      const LevelSet& phi, const VectorField2& theta, double t) {
  problem.validate();
  if (!measurements.mu_frozen()) throw Error("displaced_cost: weights not frozen yet");
  if (measurements.traces.size() != problem.fluxes.size())
    throw DimensionError("displaced_cost: measurement count != flux count");
  if (!theta.boundary_zero)
    throw InvalidParameterError("displaced_cost: theta must vanish on the boundary");
  StructuredMesh mesh = build_unit_square_mesh(problem.n);
  if (static_cast<int>(phi.phi.size()) != mesh.node_count() ||
      static_cast<int>(theta.size()) != mesh.node_count())
    throw DimensionError("displaced_cost: field size != node count");
  ElementCoefficient sigma = sigma_from_levelset(mesh, phi, problem.sigma_plus,
                                                 problem.sigma_minus, problem.sigma_rule);
  for (int v = 0; v < mesh.node_count(); ++v) {
    mesh.x[v] += t * theta.x[v];
    mesh.y[v] += t * theta.y[v];
  }
  std::vector<double> lumped = lumped_mass(mesh);
  std::vector<double> meas_weight = boundary_mass(mesh, problem.dirichlet_d);
  ScalarField fzero(mesh.node_count());
  SolveOptions opts;
  opts.rel_tol = problem.cg_tol;
  double J = 0;
  for (std::size_t i = 0; i < problem.fluxes.size(); ++i) {
    const ScalarField& data = measurements.traces[i].noisy;
    ScalarField u_d = solve_mixed(mesh, sigma, fzero, problem.fluxes[i], problem.dirichlet_n,
                                  problem.dirichlet_d, data, opts);
    ScalarField u_n = solve_mixed(mesh, sigma, fzero, problem.fluxes[i], problem.dirichlet_d,
                                  problem.dirichlet_n, data, opts);
    double term = 0;
    for (int j = 0; j < mesh.node_count(); ++j) {
      double misfit = u_d[j] - u_n[j];
      term += 0.5 * problem.alpha1 * lumped[j] * misfit * misfit;
    }
    if (problem.alpha2 > 0)
      for (int j = 0; j < mesh.node_count(); ++j) {
        double bm = u_n[j] - data[j];
        term += 0.5 * problem.alpha2 * meas_weight[j] * bm * bm;
      }
    J += measurements.mu[i] * term;
  }
  return J;
}

bool FdCheckReport::ratios_within(double lo, double hi) const {
  if (fields.empty()) return false;
  for (const FdThetaReport& f : fields)
    for (std::size_t k = 1; k < f.levels.size(); ++k)
      if (f.levels[k].ratio < lo || f.levels[k].ratio > hi) return false;
  return true;
}

namespace {

// Bump direction for the interface diagnostic: outward slope of the signed
// distance at the bump center.
std::array<double, 2> sdf_direction(const ShapeSpec& shapes, double x, double y) {
  const double d = 1e-4;
  double gx = (signed_distance(shapes, x + d, y) - signed_distance(shapes, x - d, y)) / (2 * d);
  double gy = (signed_distance(shapes, x, y + d) - signed_distance(shapes, x, y - d)) / (2 * d);
  double norm = std::hypot(gx, gy);
  if (norm < 1e-12) return {1, 0};
  return {gx / norm, gy / norm};
}

}  // namespace

FdCheckReport fd_consistency_check(const EitProblem& problem, const ShapeSpec& true_shapes,
                                   const ShapeSpec& eval_shapes, std::vector<double> t_levels,
                                   int field_count, std::uint64_t field_seed) {
  if (t_levels.empty())
    throw InvalidParameterError("fd_consistency_check: at least one t level required");
  if (field_count < 1)
    throw InvalidParameterError("fd_consistency_check: at least one test field required");
  if (eval_shapes.empty())
    throw InvalidShapeError("fd_consistency_check: empty evaluation shape list");
  MeasurementSet m = synthesize_measurements(problem, true_shapes);
  EitSolver solver(problem);
  const StructuredMesh& mesh = solver.mesh();
  LevelSet phi = init_signed_distance(mesh, eval_shapes);
  std::vector<FluxStates> states;
  double J0 = solver.cost(m, phi, &states);
  std::vector<FluxAdjoints> adj = solver.adjoints(m, states);
  TensorRep tensors = solver.weighted_tensors(m, states, adj);

  FdCheckReport report;
  for (int k = 0; k < field_count; ++k) {
    VectorField2 theta = random_smooth_field(mesh, field_seed + k);
    double dj = eval_dJ(mesh, tensors, theta);
    FdThetaReport rep;
    rep.seed = field_seed + k;
    double prev_err = 0;
    for (double t : t_levels) {
      double J_t = displaced_cost(problem, m, phi, theta, t);
      FdLevel lvl;
      lvl.t = t;
      lvl.fd = (J_t - J0) / t;
      lvl.dj = dj;
      lvl.err = std::abs(lvl.fd - dj);
      lvl.ratio = (prev_err > 0 && lvl.err > 0) ? prev_err / lvl.err : 0;
      prev_err = lvl.err;
      rep.levels.push_back(lvl);
    }
    report.fields.push_back(std::move(rep));
  }

  // Structure-theorem diagnostic: a bump riding the interface versus a bump
  // in the deepest pocket of background, at least 4h clear of the interface.
  std::vector<std::array<double, 2>> crossing = zero_crossing_points(mesh, phi);
  if (!crossing.empty()) {
    auto c = crossing.front();
    auto dir = sdf_direction(eval_shapes, c[0], c[1]);
    VectorField2 near = mollifier_field(mesh, c[0], c[1], 0.1, dir[0], dir[1]);
    double nn = h1_norm(mesh, near);
    if (nn > 0) report.near_ratio = std::abs(eval_dJ(mesh, tensors, near)) / nn;
  }
  double best = -1, bx = 0, by = 0;
  const int scan = 33;
  for (int j = 1; j < scan - 1; ++j)
    for (int i = 1; i < scan - 1; ++i) {
      double x = i / double(scan - 1), y = j / double(scan - 1);
      double clearance = std::min(std::abs(signed_distance(eval_shapes, x, y)),
                                  std::min(std::min(x, 1 - x), std::min(y, 1 - y)));
      if (clearance > best) {
        best = clearance;
        bx = x;
        by = y;
      }
    }
  double radius = std::min(best - 4 * mesh.h, 0.2);
  if (radius > mesh.h) {
    VectorField2 far = mollifier_field(mesh, bx, by, radius, 1, 0);
    double fn = h1_norm(mesh, far);
    if (fn > 0) report.far_ratio = std::abs(eval_dJ(mesh, tensors, far)) / fn;
  }
  return report;
}

ReconstructionResult reconstruct(const EitProblem& problem, MeasurementSet& measurements,
                                 const ShapeSpec& initial_shapes,
                                 const IterationCallback& on_iteration) {
  problem.validate();
  if (initial_shapes.empty()) throw InvalidShapeError("reconstruct: initial shape list is empty");
  EitSolver solver(problem);
  const StructuredMesh& mesh = solver.mesh();
  LevelSet phi = init_signed_distance(mesh, initial_shapes);
  // advection preserves the nodal range, so a level set without a zero
  // crossing can never grow an interface; refuse it up front
  if (is_one_signed(phi))
    throw InvalidShapeError("reconstruct: initial level set has no interface on this mesh");
  OptTrace trace;
  trace.inverse_crime = (measurements.source_n == problem.n && measurements.delta == 0);
  std::vector<FluxStates> states;
  bool degenerate = false;
  double J;
  try {
    J = solver.cost(measurements, phi, &states);
  } catch (const DegenerateInitializationError&) {
    // The initial guess already reproduces the data to solver precision; unit
    // weights keep the cost finite and the run reports immediate convergence.
    measurements.mu.assign(problem.fluxes.size(), 1.0);
    J = solver.cost(measurements, phi, &states);
    degenerate = true;
  }
  TraceRow row0;
  row0.iter = 0;
  row0.J = J;
  row0.grad_dev = gradient_norm_deviation(mesh, phi);
  trace.rows.push_back(row0);
  if (on_iteration) on_iteration(row0, phi);
  if (degenerate) {
    trace.status = "converged";
    return {std::move(phi), std::move(trace)};
  }

  DescentConfig dconf;
  dconf.tol = problem.cg_tol;
  DescentSolver descent(mesh, dconf);
  double t_prev = 0;
  double drop_ref = -1;
  int stop_hits = 0;
  trace.status = "max-iter";
  for (int k = 1; k <= problem.max_iterations; ++k) {
    std::vector<FluxAdjoints> adj = solver.adjoints(measurements, states);
    TensorRep tensors = solver.weighted_tensors(measurements, states, adj);
    VectorField2 theta = descent.solve(tensors);
    double dj = eval_dJ(mesh, tensors, theta);
    double vmax = max_point_norm(theta);
    if (!(vmax > 0) || dj >= 0) {
      trace.status = "converged";
      break;
    }
    // Initial trial keeps the interface displacement near 2h; accepted steps
    // carry over doubled but never beyond that cap.
    double t_cap = 2.0 * mesh.h / vmax;
    double t = (t_prev > 0) ? std::min(2.0 * t_prev, t_cap) : t_cap;
    bool accepted = false;
    LevelSet phi_t;
    std::vector<FluxStates> states_t;
    double J_t = 0;
    for (int bt = 0; bt <= problem.max_backtracks; ++bt) {
      phi_t = advect(mesh, phi, theta, t, problem.cfl);
      J_t = solver.cost(measurements, phi_t, &states_t);
      // strict decrease guards against t so small that the Armijo envelope
      // rounds to J itself while the cost sits on a flat patch
      if (J_t < J && J_t <= J + problem.c_armijo * t * dj) {
        accepted = true;
        break;
      }
      t *= 0.5;
      ++trace.backtracks_total;
    }
    if (!accepted) {
      trace.status = "stalled";
      break;
    }
    double drop = J - J_t;
    phi = std::move(phi_t);
    states = std::move(states_t);
    J = J_t;
    t_prev = t;
    if (drop_ref < 0)
      drop_ref = drop;
    else if (drop < problem.gamma * drop_ref)
      ++stop_hits;
    else
      stop_hits = 0;
    TraceRow row;
    row.iter = k;
    row.J = J;
    row.step = t;
    row.dJ_theta = dj;
    row.grad_dev = gradient_norm_deviation(mesh, phi);
    row.stop_hits = stop_hits;
    trace.rows.push_back(row);
    if (on_iteration) on_iteration(row, phi);
    if (stop_hits >= problem.stop_patience) {
      trace.status = "converged";
      break;
    }
  }
  return {std::move(phi), std::move(trace)};
}

}  // namespace eitshape
