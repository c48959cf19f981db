#pragma once

#include <array>
#include <vector>

#include "eitshape/mesh.hpp"

namespace eitshape {

struct Ball {
  double cx = 0, cy = 0, r = 0;
};

// Semi-axes a (before rotation, along x) and b; rotation angle in radians.
struct Ellipse {
  double cx = 0, cy = 0, a = 0, b = 0, angle = 0;
};

struct ShapeSpec {
  std::vector<Ball> balls;
  std::vector<Ellipse> ellipses;
  bool empty() const { return balls.empty() && ellipses.empty(); }
};

// How a triangle cut by the interface picks its conductivity.
enum class SigmaRule { vertex_average, area_fraction };

SigmaRule sigma_rule_from_name(const std::string& name);
const char* sigma_rule_name(SigmaRule rule);

// Signed distance to the union of primitives (negative inside).  Ellipse
// distance by damped Newton closest-point projection with an algebraic
// fallback.
double signed_distance(const ShapeSpec& shapes, double x, double y);
double ball_sdf(const Ball& b, double x, double y);
double ellipse_sdf(const Ellipse& e, double x, double y);

LevelSet init_signed_distance(const StructuredMesh& mesh, const ShapeSpec& shapes);

// True when phi never changes sign over the nodes (no interface).
bool is_one_signed(const LevelSet& phi);

ElementCoefficient sigma_from_levelset(const StructuredMesh& mesh, const LevelSet& phi,
                                       double sigma_plus, double sigma_minus,
                                       SigmaRule rule = SigmaRule::vertex_average);

// One forward-Euler step of the Local Lax-Friedrichs update for
// phi_t + theta . grad(phi) = 0; boundary nodes reuse the interior one-sided
// difference for the missing direction.
LevelSet llf_step(const StructuredMesh& mesh, const LevelSet& phi, const VectorField2& theta,
                  double dt);

// Repeated llf_step with dt = cfl * h / max(||theta||_inf, 1e-14); the last
// step is truncated to land exactly on total_time.
LevelSet advect(const StructuredMesh& mesh, const LevelSet& phi, const VectorField2& theta,
                double total_time, double cfl = 0.5);

// Median over interior nodes of | |grad phi| - 1 | by central differences;
// diagnostic for drift away from a distance function.
double gradient_norm_deviation(const StructuredMesh& mesh, const LevelSet& phi);

// Geometry of the piecewise-linear sublevel set {phi < 0}.
double sublevel_area(const StructuredMesh& mesh, const LevelSet& phi);
std::array<double, 2> sublevel_centroid(const StructuredMesh& mesh, const LevelSet& phi);
double sublevel_symmetric_difference(const StructuredMesh& mesh, const LevelSet& a,
                                     const LevelSet& b);
std::vector<std::array<double, 2>> zero_crossing_points(const StructuredMesh& mesh,
                                                        const LevelSet& phi);
double hausdorff_distance(const std::vector<std::array<double, 2>>& a,
                          const std::vector<std::array<double, 2>>& b);

}  // namespace eitshape
