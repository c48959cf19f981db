#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "eitshape/descent.hpp"
#include "eitshape/levelset.hpp"

namespace eitshape {

// Three boundary flux patterns, each with zero total flux: (+L +R -T -B),
// (+L +T -R -B), (+L +B -R -T).
std::vector<SideValues> standard_fluxes();

struct EitProblem {
  int n = 128;
  double sigma_plus = 10.0;   // inclusion (phi < 0)
  double sigma_minus = 1.0;   // background
  std::vector<SideValues> fluxes = standard_fluxes();
  SideSet dirichlet_d = kLeftRight;  // Dirichlet sides of the u_d role
  SideSet dirichlet_n = kTopBottom;  // Dirichlet sides of the u_n role
  double alpha1 = 1.0;
  double alpha2 = 0.0;
  double delta = 0.0;        // noise standard deviation factor
  std::uint64_t seed = 1;
  double gamma = 5e-5;       // stop threshold relative to the first cost drop
  int max_iterations = 500;
  double c_armijo = 1e-4;
  int max_backtracks = 20;
  int stop_patience = 5;
  double cfl = 0.5;
  double cg_tol = 1e-10;
  // area_fraction keeps the cost continuous along the line search; the
  // vertex_average rule yields a staircase-in-t cost on which backtracking
  // can wedge against flat steps at fine meshes.
  SigmaRule sigma_rule = SigmaRule::area_fraction;

  void validate() const;
};

struct Measurement {
  ScalarField clean;  // nodal boundary trace, zero off the boundary
  ScalarField noisy;
};

struct MeasurementSet {
  std::vector<Measurement> traces;
  std::vector<double> mu;  // empty until frozen by the first cost evaluation
  int source_n = 0;        // mesh size the traces were generated on
  double delta = 0.0;

  bool mu_frozen() const { return !mu.empty(); }
};

struct TraceRow {
  int iter = 0;
  double J = 0;
  double step = 0;      // accepted line-search step (0 on the baseline row)
  double dJ_theta = 0;  // shape derivative along the accepted direction
  double grad_dev = 0;  // level-set gradient-norm deviation
  int stop_hits = 0;    // consecutive satisfactions of the stop criterion
};

struct OptTrace {
  std::vector<TraceRow> rows;
  std::string status;  // "converged" | "stalled" | "max-iter"
  bool inverse_crime = false;
  int backtracks_total = 0;
};

struct FluxStates {
  ScalarField u_d, u_n;
};

struct FluxAdjoints {
  ScalarField p_d, p_n;
};

// Solves the true-shape forward problem per flux (pure flux data on all four
// sides, one grounded node) and perturbs the boundary trace with Gaussian
// noise of standard deviation delta * max|h_i|.
MeasurementSet synthesize_measurements(const EitProblem& problem, const ShapeSpec& true_shapes);

// Sum over fluxes of edge-trapezoid boundary L2 distances between clean and
// noisy traces, relative to the clean norms.
double noise_level(const StructuredMesh& mesh, const MeasurementSet& measurements);

// Caches the mesh, stiffness pattern, boundary loads, and per-role
// constraint eliminations shared by every solve of one reconstruction.
class EitSolver {
 public:
  explicit EitSolver(const EitProblem& problem);

  const StructuredMesh& mesh() const { return mesh_; }
  const EitProblem& problem() const { return problem_; }

  // States per flux at the conductivity of phi. Freezes measurement weights
  // on the first call (each term scaled to 1); throws
  // DegenerateInitializationError when a first-evaluation term is below
  // 1e-14.
  double cost(MeasurementSet& measurements, const LevelSet& phi,
              std::vector<FluxStates>* states_out = nullptr);

  // Adjoints for the most recent cost() conductivity.
  std::vector<FluxAdjoints> adjoints(const MeasurementSet& measurements,
                                     const std::vector<FluxStates>& states);

  // mu-weighted shape-derivative tensors at the most recent cost() state.
  TensorRep weighted_tensors(const MeasurementSet& measurements,
                             const std::vector<FluxStates>& states,
                             const std::vector<FluxAdjoints>& adjoints);

 private:
  EitProblem problem_;
  StructuredMesh mesh_;
  StiffnessAssembler assembler_;
  std::vector<double> lumped_;
  std::vector<int> nodes_d_, nodes_n_;          // Dirichlet node sets per role
  std::vector<std::vector<double>> flux_load_;  // per flux, on the full boundary
  std::vector<double> meas_weight_;             // boundary arc weights, u_n sides
  std::unique_ptr<ConstrainedSystem> sys_d_, sys_n_;
  std::vector<ScalarField> warm_ud_, warm_un_, warm_pd_, warm_pn_;
  ElementCoefficient last_sigma_;

  void prepare_systems(const ElementCoefficient& sigma);
};

struct ReconstructionResult {
  LevelSet phi;
  OptTrace trace;
};

using IterationCallback = std::function<void(const TraceRow&, const LevelSet&)>;

struct FdLevel {
  double t = 0;
  double fd = 0;     // (J(Omega_t) - J(Omega)) / t
  double dj = 0;     // eval_dJ along theta
  double err = 0;    // |fd - dj|
  double ratio = 0;  // error ratio against the previous (doubled) t
};

struct FdThetaReport {
  std::uint64_t seed = 0;
  std::vector<FdLevel> levels;
};

struct FdCheckReport {
  std::vector<FdThetaReport> fields;
  double near_ratio = 0;  // |dJ(theta)| / ||theta||_H1, interface-supported theta
  double far_ratio = 0;   // same for a bump supported away from the interface
  bool ratios_within(double lo, double hi) const;
};

// Cost of the transported domain: every node moves by t*theta (theta must
// vanish on the boundary), each element carries its conductivity along, and
// the states are re-solved on the displaced mesh. This materializes the flow
// the distributed derivative differentiates, so finite differences of it
// converge to eval_dJ at first order in t. Requires frozen weights.
double displaced_cost(const EitProblem& problem, const MeasurementSet& measurements,
                      const LevelSet& phi, const VectorField2& theta, double t);

// Compares eval_dJ against finite differences of the full discrete cost:
// measurements are synthesized from true_shapes, the derivative is taken at
// eval_shapes, and each perturbed cost is displaced_cost at step t. Errors
// contract linearly in t, so halved t gives error ratios near 2.
FdCheckReport fd_consistency_check(const EitProblem& problem, const ShapeSpec& true_shapes,
                                   const ShapeSpec& eval_shapes, std::vector<double> t_levels,
                                   int field_count, std::uint64_t field_seed);

// Level-set descent on the measurement misfit: per iteration solve states and
// adjoints, assemble weighted tensors, smooth the gradient through the H1
// problem, then Armijo-backtrack on the advection time. Stops when the cost
// drop stays below gamma times the first drop for stop_patience consecutive
// iterations.
ReconstructionResult reconstruct(const EitProblem& problem, MeasurementSet& measurements,
                                 const ShapeSpec& initial_shapes,
                                 const IterationCallback& on_iteration = {});

}  // namespace eitshape
