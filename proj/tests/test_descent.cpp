#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eitshape/descent.hpp"

using namespace eitshape;

namespace {

TensorRep random_tensors(const StructuredMesh& mesh, std::uint64_t seed) {
  GaussianSampler rng(seed);
  TensorRep t;
  t.S1.resize(mesh.tri_count());
  t.S0.resize(mesh.tri_count());
  for (int e = 0; e < mesh.tri_count(); ++e) {
    for (int k = 0; k < 4; ++k) t.S1[e][k] = rng.next();
    t.S1[e][2] = t.S1[e][1];
    for (int k = 0; k < 2; ++k) t.S0[e][k] = rng.next();
  }
  return t;
}

double lumped_l2(const StructuredMesh& mesh, const VectorField2& a, const VectorField2& b) {
  std::vector<double> mass = lumped_mass(mesh);
  double s = 0;
  for (int i = 0; i < mesh.node_count(); ++i)
    s += mass[i] * (a.x[i] * b.x[i] + a.y[i] * b.y[i]);
  return s;
}

}  // namespace

TEST_CASE("zero tensors produce the zero direction") {
  StructuredMesh mesh = build_unit_square_mesh(8);
  TensorRep t;
  t.S1.assign(mesh.tri_count(), {0, 0, 0, 0});
  t.S0.assign(mesh.tri_count(), {0, 0});
  VectorField2 theta = solve_descent(mesh, t);
  CHECK(theta.boundary_zero);
  for (int i = 0; i < mesh.node_count(); ++i) {
    CHECK(theta.x[i] == 0.0);
    CHECK(theta.y[i] == 0.0);
  }
}

TEST_CASE("solution satisfies the variational identity against test fields") {
  StructuredMesh mesh = build_unit_square_mesh(24);
  TensorRep t = random_tensors(mesh, 101);
  VectorField2 theta = solve_descent(mesh, t);

  // B(theta, theta) = -dJ(theta)
  double b_tt = descent_form(mesh, theta, theta);
  double dj = eval_dJ(mesh, t, theta);
  CHECK(b_tt > 0);
  CHECK(std::abs(dj + b_tt) <= 1e-8 * std::max(1.0, b_tt));

  // B(theta, zeta) = -dJ(zeta) for boundary-zero test fields
  for (std::uint64_t seed = 7; seed < 10; ++seed) {
    VectorField2 zeta = random_smooth_field(mesh, seed);
    double lhs = descent_form(mesh, theta, zeta);
    double rhs = -eval_dJ(mesh, t, zeta);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }

  // the produced direction is always a descent direction
  CHECK(dj <= 0);
}

TEST_CASE("direction scales linearly with the tensor data") {
  StructuredMesh mesh = build_unit_square_mesh(16);
  TensorRep t = random_tensors(mesh, 5);
  TensorRep scaled;
  tensor_axpy(scaled, -2.5, t);
  VectorField2 a = solve_descent(mesh, t);
  VectorField2 b = solve_descent(mesh, scaled);
  for (int i = 0; i < mesh.node_count(); ++i) {
    CHECK(b.x[i] == doctest::Approx(-2.5 * a.x[i]).epsilon(1e-7).scale(1.0));
    CHECK(b.y[i] == doctest::Approx(-2.5 * a.y[i]).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("manufactured field is recovered from its own gradient tensors") {
  StructuredMesh mesh = build_unit_square_mesh(20);
  VectorField2 psi = random_smooth_field(mesh, 77);
  ScalarField px, py;
  px.v = psi.x;
  py.v = psi.y;
  TensorRep t;
  t.S1.resize(mesh.tri_count());
  t.S0.assign(mesh.tri_count(), {0, 0});
  for (int e = 0; e < mesh.tri_count(); ++e) {
    auto gx = tri_gradient(mesh, e, px);
    auto gy = tri_gradient(mesh, e, py);
    t.S1[e] = {-gx[0], -gx[1], -gy[0], -gy[1]};
  }
  VectorField2 theta = solve_descent(mesh, t);
  double err = 0;
  for (int i = 0; i < mesh.node_count(); ++i)
    err = std::max({err, std::abs(theta.x[i] - psi.x[i]), std::abs(theta.y[i] - psi.y[i])});
  CHECK(err < 1e-7);
}

TEST_CASE("gradient form is symmetric, definite, and extends by the mass term") {
  StructuredMesh mesh = build_unit_square_mesh(14);
  VectorField2 a = random_smooth_field(mesh, 1);
  VectorField2 b = random_smooth_field(mesh, 2);
  double ab = descent_form(mesh, a, b);
  double ba = descent_form(mesh, b, a);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-13));
  CHECK(descent_form(mesh, a, a) > 0);

  double weighted = descent_form(mesh, a, b, 0.8);
  CHECK(weighted == doctest::Approx(ab + 0.8 * lumped_l2(mesh, a, b)).epsilon(1e-12));
}

TEST_CASE("cached solver warm-starts repeats and matches the one-shot path") {
  StructuredMesh mesh = build_unit_square_mesh(18);
  TensorRep t = random_tensors(mesh, 13);
  DescentSolver solver(mesh);
  SolveStats first, second;
  VectorField2 a = solver.solve(t, &first);
  VectorField2 b = solver.solve(t, &second);
  CHECK(first.iterations > 0);
  CHECK(second.iterations == 0);
  for (int i = 0; i < mesh.node_count(); ++i) {
    CHECK(a.x[i] == b.x[i]);
    CHECK(a.y[i] == b.y[i]);
  }

  VectorField2 oneshot = solve_descent(mesh, t);
  for (int i = 0; i < mesh.node_count(); ++i) {
    CHECK(a.x[i] == oneshot.x[i]);
    CHECK(a.y[i] == oneshot.y[i]);
  }
}

TEST_CASE("element count mismatches are refused") {
  StructuredMesh mesh = build_unit_square_mesh(6);
  TensorRep t;
  t.S1.assign(4, {0, 0, 0, 0});
  t.S0.assign(4, {0, 0});
  CHECK_THROWS_AS(solve_descent(mesh, t), DimensionError);
}
