#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "eitshape/levelset.hpp"

using namespace eitshape;

namespace {

ShapeSpec one_ball(double cx, double cy, double r) {
  ShapeSpec s;
  s.balls.push_back({cx, cy, r});
  return s;
}

}  // namespace

TEST_CASE("ball signed distance is radius arithmetic") {
  Ball b{0.3, 0.4, 0.2};
  CHECK(ball_sdf(b, 0.3, 0.4) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(ball_sdf(b, 0.7, 0.4) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(ball_sdf(b, 0.3, 0.6) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(ball_sdf(b, 0.3 + 0.2 / std::sqrt(2.0), 0.4 + 0.2 / std::sqrt(2.0))) < 1e-14);
}

TEST_CASE("ellipse signed distance matches independent closest-point values") {
  // reference distances from a dense parametric sweep refined by golden
  // section at 30-digit precision
  Ellipse e{0.5, 0.5, 0.3, 0.2, 0.0};
  CHECK(ellipse_sdf(e, 0.9, 0.5) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(ellipse_sdf(e, 0.5, 0.15) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(ellipse_sdf(e, 0.5, 0.5) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(ellipse_sdf(e, 0.72, 0.61) ==
        doctest::Approx(-0.020601544065183299).epsilon(1e-10));

  Ellipse tilted{0.3, 0.65, 0.18, 0.09, 0.5};
  CHECK(ellipse_sdf(tilted, 0.5, 0.5) ==
        doctest::Approx(0.14843923655277835).epsilon(1e-10));
  CHECK(ellipse_sdf(tilted, 0.31, 0.66) ==
        doctest::Approx(-0.085681763856576994).epsilon(1e-10));

  Ellipse tilted2{0.68, 0.32, 0.16, 0.10, -0.4};
  CHECK(ellipse_sdf(tilted2, 0.6, 0.4) ==
        doctest::Approx(-0.028024027370304761).epsilon(1e-10));

  // a circle in ellipse clothing agrees with the ball distance
  Ellipse circ{0.4, 0.6, 0.25, 0.25, 1.3};
  Ball ball{0.4, 0.6, 0.25};
  for (double px : {0.1, 0.45, 0.9})
    for (double py : {0.2, 0.55, 0.8})
      CHECK(ellipse_sdf(circ, px, py) == doctest::Approx(ball_sdf(ball, px, py)).epsilon(1e-10));
}

TEST_CASE("union distance is the pointwise minimum over primitives") {
  ShapeSpec shapes;
  shapes.balls.push_back({0.25, 0.25, 0.1});
  shapes.ellipses.push_back({0.7, 0.7, 0.2, 0.1, 0.3});
  for (double px : {0.1, 0.3, 0.5, 0.8})
    for (double py : {0.2, 0.6, 0.9}) {
      double expect = std::min(ball_sdf(shapes.balls[0], px, py),
                               ellipse_sdf(shapes.ellipses[0], px, py));
      CHECK(signed_distance(shapes, px, py) == doctest::Approx(expect).epsilon(1e-14));
    }
  CHECK_THROWS_AS(signed_distance(ShapeSpec{}, 0.5, 0.5), InvalidShapeError);
}

TEST_CASE("nodal initialization samples the signed distance") {
  StructuredMesh mesh = build_unit_square_mesh(12);
  ShapeSpec shapes = one_ball(0.5, 0.5, 0.3);
  LevelSet phi = init_signed_distance(mesh, shapes);
  REQUIRE(phi.phi.size() == static_cast<std::size_t>(mesh.node_count()));
  for (int v = 0; v < mesh.node_count(); v += 7)
    CHECK(phi.phi[v] ==
          doctest::Approx(signed_distance(shapes, mesh.x[v], mesh.y[v])).epsilon(1e-14));
  CHECK_FALSE(is_one_signed(phi));

  LevelSet outside = init_signed_distance(mesh, one_ball(2.0, 2.0, 0.1));
  CHECK(is_one_signed(outside));
}

TEST_CASE("uncut triangles take their side's conductivity under both rules") {
  StructuredMesh mesh = build_unit_square_mesh(24);
  LevelSet phi = init_signed_distance(mesh, one_ball(0.5, 0.5, 0.25));
  for (SigmaRule rule : {SigmaRule::vertex_average, SigmaRule::area_fraction}) {
    ElementCoefficient sigma = sigma_from_levelset(mesh, phi, 10.0, 1.0, rule);
    REQUIRE(sigma.size() == static_cast<std::size_t>(mesh.tri_count()));
    for (int t = 0; t < mesh.tri_count(); ++t) {
      double lo = 1e300, hi = -1e300;
      for (int v : mesh.tri[t]) {
        lo = std::min(lo, phi.phi[v]);
        hi = std::max(hi, phi.phi[v]);
      }
      if (hi < 0) CHECK(sigma[t] == 10.0);
      if (lo > 0) CHECK(sigma[t] == 1.0);
      CHECK(sigma[t] >= 1.0);
      CHECK(sigma[t] <= 10.0);
    }
  }
}

TEST_CASE("cut-triangle rules: sign of the vertex mean vs clipped area fraction") {
  StructuredMesh mesh = build_unit_square_mesh(1);
  // triangle 0 is (0,0) (1,0) (1,1); triangle 1 is (0,0) (1,1) (0,1)
  LevelSet phi(mesh.node_count());
  phi.phi[0] = -1.0;  // (0,0)
  phi.phi[1] = 1.0;   // (1,0)
  phi.phi[2] = 1.0;   // (0,1)
  phi.phi[3] = 1.0;   // (1,1)

  // vertex mean is +1/3 on both triangles: background wins
  ElementCoefficient va = sigma_from_levelset(mesh, phi, 10.0, 1.0, SigmaRule::vertex_average);
  CHECK(va[0] == 1.0);
  CHECK(va[1] == 1.0);

  // the negative corner clips a quarter of each triangle:
  // crossings sit at edge midpoints, so the inside piece has area
  // (1/2)*(1/2)*(1/2) of the cell half = 1/8, i.e. fraction 1/4
  ElementCoefficient af = sigma_from_levelset(mesh, phi, 10.0, 1.0, SigmaRule::area_fraction);
  CHECK(af[0] == doctest::Approx(0.25 * 10.0 + 0.75 * 1.0).epsilon(1e-13));
  CHECK(af[1] == doctest::Approx(0.25 * 10.0 + 0.75 * 1.0).epsilon(1e-13));

  // flipping the sign complements the fraction
  for (auto& v : phi.phi.v) v = -v;
  ElementCoefficient comp = sigma_from_levelset(mesh, phi, 10.0, 1.0, SigmaRule::area_fraction);
  CHECK(comp[0] == doctest::Approx(0.75 * 10.0 + 0.25 * 1.0).epsilon(1e-13));

  CHECK(sigma_rule_from_name("vertex_average") == SigmaRule::vertex_average);
  CHECK(sigma_rule_from_name("area_fraction") == SigmaRule::area_fraction);
  CHECK(sigma_rule_name(SigmaRule::area_fraction) == std::string("area_fraction"));
  CHECK_THROWS_AS(sigma_rule_from_name("midpoint"), InvalidParameterError);
}

TEST_CASE("transport update is stationary for constant fields and zero velocity") {
  StructuredMesh mesh = build_unit_square_mesh(16);
  LevelSet constant(mesh.node_count(), 0.7);
  VectorField2 theta(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    theta.x[i] = std::sin(3 * mesh.x[i]);
    theta.y[i] = std::cos(2 * mesh.y[i]);
  }
  LevelSet moved = llf_step(mesh, constant, theta, 0.01);
  for (double v : moved.phi.v) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));

  LevelSet phi = init_signed_distance(mesh, one_ball(0.4, 0.5, 0.2));
  VectorField2 zero(mesh.node_count());
  LevelSet still = llf_step(mesh, phi, zero, 0.01);
  for (int i = 0; i < mesh.node_count(); ++i)
    CHECK(still.phi[i] == doctest::Approx(phi.phi[i]).epsilon(1e-15));
}

TEST_CASE("transport respects the discrete maximum principle under CFL") {
  // admissible velocities vanish on the hold-all boundary; the one-sided
  // boundary rows are only monotone under that contract
  StructuredMesh mesh = build_unit_square_mesh(32);
  LevelSet phi = init_signed_distance(mesh, one_ball(0.5, 0.5, 0.2));
  double lo = *std::min_element(phi.phi.v.begin(), phi.phi.v.end());
  double hi = *std::max_element(phi.phi.v.begin(), phi.phi.v.end());
  VectorField2 theta(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    double x = mesh.x[i], y = mesh.y[i];
    double bump = 16.0 * x * (1 - x) * y * (1 - y);
    theta.x[i] = 0.8 * std::sin(5 * y) * bump;
    theta.y[i] = -0.6 * std::cos(4 * x) * bump;
  }
  double dt = 0.5 * mesh.h / 1.0;  // max speed is at most 1 per component
  LevelSet cur = phi;
  for (int k = 0; k < 10; ++k) {
    cur = llf_step(mesh, cur, theta, dt);
    for (double v : cur.phi.v) {
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  }
}

TEST_CASE("advection translates a circle at the right speed") {
  StructuredMesh mesh = build_unit_square_mesh(64);
  LevelSet phi = init_signed_distance(mesh, one_ball(0.35, 0.5, 0.15));
  VectorField2 theta(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) theta.x[i] = 0.5;
  theta.boundary_zero = false;

  double area0 = sublevel_area(mesh, phi);
  LevelSet moved = advect(mesh, phi, theta, 0.4, 0.5);
  auto c = sublevel_centroid(mesh, moved);
  CHECK(std::abs(c[0] - (0.35 + 0.5 * 0.4)) <= 2 * mesh.h);
  CHECK(std::abs(c[1] - 0.5) <= 2 * mesh.h);
  CHECK(std::abs(sublevel_area(mesh, moved) - area0) <= 0.05 * area0);

  // zero travel time is the identity
  LevelSet same = advect(mesh, phi, theta, 0.0, 0.5);
  for (int i = 0; i < mesh.node_count(); ++i) CHECK(same.phi[i] == phi.phi[i]);
}

TEST_CASE("gradient deviation separates distance functions from scaled ones") {
  StructuredMesh mesh = build_unit_square_mesh(48);
  LevelSet phi = init_signed_distance(mesh, one_ball(0.5, 0.5, 0.25));
  CHECK(gradient_norm_deviation(mesh, phi) < 1e-3);

  LevelSet doubled = phi;
  for (auto& v : doubled.phi.v) v *= 2.0;
  CHECK(gradient_norm_deviation(mesh, doubled) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("sublevel geometry recovers circle area, centroid, and symmetry") {
  StructuredMesh mesh = build_unit_square_mesh(96);
  ShapeSpec ball = one_ball(0.45, 0.55, 0.25);
  LevelSet phi = init_signed_distance(mesh, ball);

  double area = sublevel_area(mesh, phi);
  CHECK(area == doctest::Approx(M_PI * 0.25 * 0.25).epsilon(2e-3));
  auto c = sublevel_centroid(mesh, phi);
  CHECK(c[0] == doctest::Approx(0.45).epsilon(1e-3));
  CHECK(c[1] == doctest::Approx(0.55).epsilon(1e-3));

  CHECK(sublevel_symmetric_difference(mesh, phi, phi) == 0.0);

  LevelSet small = init_signed_distance(mesh, one_ball(0.45, 0.55, 0.15));
  double ring = sublevel_symmetric_difference(mesh, phi, small);
  CHECK(ring == doctest::Approx(M_PI * (0.25 * 0.25 - 0.15 * 0.15)).epsilon(5e-3));

  LevelSet far = init_signed_distance(mesh, one_ball(0.2, 0.2, 0.1));
  double disjoint = sublevel_symmetric_difference(mesh, phi, far);
  CHECK(disjoint == doctest::Approx(area + sublevel_area(mesh, far)).epsilon(1e-12));
}

TEST_CASE("zero crossings trace the interface and feed the set distance") {
  StructuredMesh mesh = build_unit_square_mesh(64);
  ShapeSpec ball = one_ball(0.5, 0.5, 0.2);
  LevelSet phi = init_signed_distance(mesh, ball);
  auto pts = zero_crossing_points(mesh, phi);
  CHECK(pts.size() > 20);
  for (const auto& p : pts)
    CHECK(std::abs(signed_distance(ball, p[0], p[1])) <= mesh.h);

  CHECK(hausdorff_distance(pts, pts) == 0.0);
  auto shifted = pts;
  for (auto& p : shifted) p[0] += 0.3;
  CHECK(hausdorff_distance(pts, shifted) <= 0.3 + 1e-12);
  CHECK(hausdorff_distance(pts, shifted) >= 0.3 - 2 * 0.2 - 1e-12);
}
