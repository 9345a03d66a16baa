#include <doctest.h>

#include "consistency.hpp"
#include "support.hpp"
#include "vpsim/grid_ops.hpp"

using namespace vpsim;
using namespace vpsim::testing;

TEST_CASE("grid spec rejects fewer than four cells or bad lengths") {
  CHECK_THROWS_AS(GridSpec(3, 8, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(8, 8, 0.0, 1.0), std::invalid_argument);
  CHECK_NOTHROW(GridSpec(4, 4, 1.0, 1.0));
}

TEST_CASE("gradient of a constant vanishes") {
  const GridSpec g(8, 6, 1.0, 2.0);
  const StaggeredVectorField d = grad_cc(CellField(g, 3.7));
  CHECK(d.max_abs() == 0.0);
}

TEST_CASE("gradient of a linear profile is exact away from the wrap face") {
  const GridSpec g(8, 8, 1.0, 1.0);
  const CellField w = sample(g, [](double x, double) { return x; });
  const StaggeredVectorField d = grad_cc(w);
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 7; ++i) CHECK(d.ux(i, j) == doctest::Approx(1.0).epsilon(1e-13));
    // the last x-face wraps to cell 0 and carries the periodic jump -(1 - h)/h
    CHECK(d.ux(7, j) == doctest::Approx(-7.0).epsilon(1e-13));
    for (int i = 0; i < 8; ++i) CHECK(d.uy(i, j) == 0.0);
  }
}

TEST_CASE("central operators converge at second order") {
  for (int n : {16, 32}) {
    CAPTURE(n);
    CHECK(refinement_ratio(grad_error, n) == doctest::Approx(4.0).epsilon(0.125));
    CHECK(refinement_ratio(laplacian_error, n) == doctest::Approx(4.0).epsilon(0.125));
    CHECK(refinement_ratio(velocity_gradient_error, n) == doctest::Approx(4.0).epsilon(0.125));
    CHECK(refinement_ratio(tensor_divergence_error, n) == doctest::Approx(4.0).epsilon(0.125));
  }
}

TEST_CASE("discrete curl of a gradient is zero to round-off") {
  // the corner differences commute exactly, so no h^2 term survives
  for (int n : {16, 32}) CHECK(curl_of_gradient(n) < 1e-10);
}

TEST_CASE("linear shear has unit cross derivative in the interior") {
  const GridSpec g(8, 8, 1.0, 1.0);
  StaggeredVectorField u(g);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) u.ux(i, j) = g.yc(j);
  const VelocityGradient d = grad_velocity_cc(u);
  for (int j = 1; j < 7; ++j) {
    for (int i = 0; i < 8; ++i) {
      CHECK(d.dux_dy(i, j) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(d.dux_dx(i, j)) < 1e-14);
      CHECK(d.duy_dx(i, j) == 0.0);
      CHECK(d.duy_dy(i, j) == 0.0);
    }
  }
}

TEST_CASE("rigid translation has zero velocity gradient") {
  const GridSpec g(6, 8, 1.0, 1.0);
  const VelocityGradient d = grad_velocity_cc(StaggeredVectorField(g, 0.3, -1.2));
  for (const CellField* c : {&d.dux_dx, &d.dux_dy, &d.duy_dx, &d.duy_dy}) CHECK(c->max_abs() < 1e-15);
}

TEST_CASE("divergence examples") {
  const GridSpec g(16, 16, 1.0, 1.0);
  CHECK(div_face(StaggeredVectorField(g, 2.0, -1.0)).max_abs() == 0.0);
  StaggeredVectorField v(g);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) v.ux(i, j) = std::sin(kTwoPi * g.yc(j));
  CHECK(div_face(v).max_abs() < 1e-13);
}

TEST_CASE("laplacian is div of grad bit for bit, with the 5-point weights") {
  const GridSpec g(8, 8, 1.0, 2.0);
  const CellField w = random_field(g, 11);
  CHECK(bitwise_equal(laplacian_cc(w), div_face(grad_cc(w))));
  CHECK(laplacian_cc(CellField(g, 5.0)).max_abs() == 0.0);

  CellField imp(g);
  imp(3, 4) = 1.0;
  const CellField l = laplacian_cc(imp);
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  CHECK(l(3, 4) == doctest::Approx(-2.0 * ihx2 - 2.0 * ihy2));
  CHECK(l(2, 4) == doctest::Approx(ihx2));
  CHECK(l(4, 4) == doctest::Approx(ihx2));
  CHECK(l(3, 3) == doctest::Approx(ihy2));
  CHECK(l(3, 5) == doctest::Approx(ihy2));
  CHECK(std::abs(sum(l)) < 1e-9);
}

TEST_CASE("adjointness of gradient and divergence on random fields") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GridSpec g(12, 10, 1.3, 0.7);
    const CellField w = random_field(g, seed);
    const StaggeredVectorField v = random_vector(g, seed + 100);
    const double lhs = cell_dot(w, div_face(v));
    const double rhs = -face_dot(grad_cc(w), v);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(std::abs(lhs), 1.0));
  }
}

TEST_CASE("tensor divergence is the negative adjoint of the velocity gradient") {
  const GridSpec g(10, 8, 1.0, 1.0);
  const SymTensorField s(random_field(g, 4), random_field(g, 5), random_field(g, 6));
  const StaggeredVectorField u = random_vector(g, 7);
  const double a = stress_power(s, u);
  const double b = -face_dot(div_tensor_to_faces(s), u);
  CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(a)));
}

TEST_CASE("tensor divergence examples") {
  const GridSpec g(8, 8, 1.0, 1.0);
  SymTensorField c(g);
  c.xx = CellField(g, 2.0);
  c.xy = CellField(g, -1.0);
  c.yy = CellField(g, 0.5);
  CHECK(div_tensor_to_faces(c).max_abs() == 0.0);
  const CellField b = random_field(g, 9);
  CHECK(max_abs_diff(div_tensor_to_faces(SymTensorField::isotropic(b)), grad_cc(b)) < 1e-12);
}

TEST_CASE("donor-cell advection") {
  const GridSpec g(8, 8, 1.0, 1.0);
  SUBCASE("zero velocity gives zero") {
    CHECK(advect_conservative_upwind(StaggeredVectorField(g), random_field(g, 3)).max_abs() == 0.0);
  }
  SUBCASE("constant scalar in a divergence-free flow") {
    StaggeredVectorField u(g);
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i) {
        u.ux(i, j) = std::sin(kTwoPi * g.yc(j));
        u.uy(i, j) = std::cos(kTwoPi * g.xc(i));
      }
    CHECK(advect_conservative_upwind(u, CellField(g, 2.5)).max_abs() < 1e-13);
  }
  SUBCASE("impulse in a uniform x flow leaves its cell and enters the downstream one") {
    CellField w(g);
    w(2, 5) = 1.0;
    const CellField a = advect_conservative_upwind(StaggeredVectorField(g, 1.0, 0.0), w);
    // div(u w): outflow +w/hx at the donor cell, inflow -w/hx downstream
    CHECK(a(2, 5) == doctest::Approx(1.0 / g.hx()));
    CHECK(a(3, 5) == doctest::Approx(-1.0 / g.hx()));
    CHECK(std::abs(sum(a)) < 1e-12);
    CHECK(a.max_abs() == doctest::Approx(1.0 / g.hx()));
  }
  SUBCASE("conserves mass for arbitrary fields") {
    const CellField a = advect_conservative_upwind(random_vector(g, 21), random_field(g, 22));
    CHECK(std::abs(integrate(a)) < 1e-13);
  }
}

TEST_CASE("integration") {
  CHECK(integrate(CellField(GridSpec(8, 8, 1.0, 1.0), 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(integrate(CellField(GridSpec(16, 16, 128.0, 128.0), 0.4)) == doctest::Approx(16384.0 * 0.4).epsilon(1e-14));
  for (int n : {5, 8, 13}) {
    const GridSpec g(n, n, 1.0, 1.0);
    CHECK(std::abs(integrate(sample(g, [](double x, double) { return std::sin(kTwoPi * x); }))) < 1e-15);
  }
}

TEST_CASE("face interpolation") {
  const GridSpec g(8, 8, 1.0, 1.0);
  const FaceScalars c = interp_cc_to_face(CellField(g, -0.25));
  CHECK(c.ux.min() == -0.25);
  CHECK(c.uy.max() == -0.25);

  const FaceScalars lin = interp_cc_to_face(sample(g, [](double x, double) { return 3.0 * x; }));
  for (int i = 0; i < 7; ++i) CHECK(lin.ux(i, 2) == doctest::Approx(3.0 * g.xf(i)));

  CellField imp(g);
  imp(4, 4) = 1.0;
  const FaceScalars f = interp_cc_to_face(imp);
  CHECK(f.ux(4, 4) == 0.5);
  CHECK(f.ux(3, 4) == 0.5);
  CHECK(f.uy(4, 4) == 0.5);
  CHECK(f.uy(4, 3) == 0.5);
  double total = 0.0;
  for (double v : f.ux.data()) total += v;
  for (double v : f.uy.data()) total += v;
  CHECK(total == 2.0);
}

TEST_CASE("operators are linear") {
  const GridSpec g(8, 6, 1.0, 1.0);
  const CellField a = random_field(g, 30), b = random_field(g, 31);
  const double al = 0.7, be = -1.9;
  const CellField ab = al * a + be * b;
  CHECK(max_abs_diff(grad_cc(ab), al * grad_cc(a) + be * grad_cc(b)) < 1e-12);
  CHECK(max_abs_diff(laplacian_cc(ab), al * laplacian_cc(a) + be * laplacian_cc(b)) < 1e-10);
  CHECK(max_abs_diff(interp_cc_to_face(ab), al * interp_cc_to_face(a) + be * interp_cc_to_face(b)) < 1e-14);
  const StaggeredVectorField u = random_vector(g, 32);
  CHECK(max_abs_diff(advect_conservative_upwind(u, ab),
                     al * advect_conservative_upwind(u, a) + be * advect_conservative_upwind(u, b)) < 1e-12);
  const StaggeredVectorField v = random_vector(g, 33), w = random_vector(g, 34);
  CHECK(max_abs_diff(div_face(al * v + be * w), al * div_face(v) + be * div_face(w)) < 1e-12);
}

TEST_CASE("capillary force identity residual converges at second order") {
  // asymptotic from 32 cells on; 16 -> 32 gives about 3.1
  for (int n : {32, 64}) {
    CAPTURE(n);
    const double r = refinement_ratio(capillary_identity_residual, n);
    CHECK(r > 3.5);
    CHECK(r < 4.5);
  }
}
