#include <doctest.h>

#include <cmath>

#include "../src/assembly.hpp"
#include "support.hpp"
#include "vpsim/energy.hpp"
#include "vpsim/grid_ops.hpp"
#include "vpsim/schemes.hpp"

using namespace vpsim;
using namespace vpsim::testing;

namespace {

const SchemeKind kFull[] = {SchemeKind::Coupled,
                            SchemeKind::CoupledCN,
                            SchemeKind::Coupled2nd,
                            SchemeKind::CoupledImplicitStress,
                            SchemeKind::SplittingMonolithic,
                            SchemeKind::SplittingChorin,
                            SchemeKind::SplittingImplicitFixpoint};

StepOptions tight(double tol = 1e-12) {
  StepOptions o;
  o.solver.rel_tol = tol;
  return o;
}

/// Flory-Huggins with chi = 2 has its critical point at phi = 1/2, where f = 0.
ModelParams critical_params() {
  ModelParams p = experiment1_params();
  p.potential.chi = 2.0;
  return p;
}

double rel(const StaggeredVectorField& a, const StaggeredVectorField& b) { return max_abs_diff(a, b) / b.max_abs(); }

/// Velocity (half-step) of the Crank-Nicolson momentum balance at u^n = 0,
/// uniform viscosity and no phase coupling:
///   (2/dt) v - div(2 eta D(v)) + grad p = f,  div v = 0,  sum p = 0,
/// assembled densely from the staggered stencils with the shear strain at
/// cell corners, then solved with a bordered mean-pressure row.
StaggeredVectorField dense_stokes_oracle(const GridSpec& g, double eta, double dt, const StaggeredVectorField& f) {
  const int nx = g.nx, ny = g.ny, n = g.cells(), m = 3 * n + 1;
  const double hx = g.hx(), hy = g.hy();
  auto id = [&](int i, int j) { return g.index(i, j); };
  auto momentum = [&](const std::vector<double>& x) {
    auto ux = [&](int i, int j) { return x[id(i, j)]; };
    auto uy = [&](int i, int j) { return x[n + id(i, j)]; };
    auto p = [&](int i, int j) { return x[2 * n + id(i, j)]; };
    auto txx = [&](int i, int j) { return 2.0 * eta * (ux(i, j) - ux(i - 1, j)) / hx; };
    auto tyy = [&](int i, int j) { return 2.0 * eta * (uy(i, j) - uy(i, j - 1)) / hy; };
    auto txy = [&](int i, int j) {
      return eta * ((ux(i, j + 1) - ux(i, j)) / hy + (uy(i + 1, j) - uy(i, j)) / hx);
    };
    std::vector<double> r(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        r[id(i, j)] = 2.0 / dt * ux(i, j) - (txx(i + 1, j) - txx(i, j)) / hx - (txy(i, j) - txy(i, j - 1)) / hy +
                      (p(i + 1, j) - p(i, j)) / hx;
        r[n + id(i, j)] = 2.0 / dt * uy(i, j) - (txy(i, j) - txy(i - 1, j)) / hx -
                          (tyy(i, j + 1) - tyy(i, j)) / hy + (p(i, j + 1) - p(i, j)) / hy;
        r[2 * n + id(i, j)] = (ux(i, j) - ux(i - 1, j)) / hx + (uy(i, j) - uy(i, j - 1)) / hy + x[3 * n];
        r[3 * n] += p(i, j);
      }
    }
    return r;
  };
  std::vector<double> a(static_cast<std::size_t>(m * m));
  for (int c = 0; c < m; ++c) {
    std::vector<double> e(static_cast<std::size_t>(m), 0.0);
    e[c] = 1.0;
    const std::vector<double> col = momentum(e);
    for (int r = 0; r < m; ++r) a[static_cast<std::size_t>(r * m + c)] = col[r];
  }
  std::vector<double> b(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < n; ++k) {
    b[k] = f.ux[k];
    b[n + k] = f.uy[k];
  }
  const std::vector<double> x = dense_solve(a, b);
  StaggeredVectorField v(g);
  for (int k = 0; k < n; ++k) {
    v.ux[k] = x[k];
    v.uy[k] = x[n + k];
  }
  return v;
}

}  // namespace

TEST_CASE("quiescent state is a fixed point of every full scheme") {
  const GridSpec g(8, 8, 1.0, 1.0);
  const ModelParams p = critical_params();
  State s(g);
  s.phi = CellField(g, 0.5);
  for (SchemeKind k : kFull) {
    CAPTURE(to_string(k));
    const StepResult r = advance(k, s, p, 1e-3, tight());
    CHECK(max_abs_diff(r.state.phi, s.phi) < 1e-15);
    CHECK(r.state.q.max_abs() < 1e-15);
    CHECK(r.state.u.max_abs() < 1e-15);
    CHECK(r.state.p.max_abs() < 1e-15);
    CHECK(r.state.sigma.max_abs() < 1e-15);
    if (k == SchemeKind::CoupledImplicitStress || k == SchemeKind::SplittingImplicitFixpoint)
      CHECK(r.aux.fixpoint_iterations == 1);
  }
}

TEST_CASE("a constant stress exerts no force") {
  const GridSpec g(16, 16, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  State a = smooth_random_state(g, p, 3);
  a.sigma = SymTensorField(g);
  State b = a;
  b.sigma = SymTensorField::isotropic(CellField(g, 0.7));
  b.sigma.xy = CellField(g, -0.2);
  for (SchemeKind k : {SchemeKind::Coupled, SchemeKind::CoupledCN, SchemeKind::SplittingMonolithic,
                       SchemeKind::SplittingChorin}) {
    CAPTURE(to_string(k));
    const StepResult ra = advance(k, a, p, 1e-3), rb = advance(k, b, p, 1e-3);
    CHECK(bitwise_equal(ra.state.u.ux, rb.state.u.ux));
    CHECK(bitwise_equal(ra.state.u.uy, rb.state.u.uy));
    CHECK(bitwise_equal(ra.state.phi, rb.state.phi));
    CHECK(bitwise_equal(ra.state.p, rb.state.p));
  }
}

TEST_CASE("half-step velocity matches a dense direct solve on a 4x4 grid") {
  const GridSpec g(4, 4, 1.0, 1.0);
  const ModelParams p = critical_params();
  const double dt = 0.01;
  State s(g);
  s.phi = CellField(g, 0.5);
  s.sigma.xy = sample(g, [](double x, double) { return 0.1 * std::cos(kTwoPi * x); });
  s.sigma.xx = sample(g, [](double x, double y) { return 0.05 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y); });
  const StepResult r = step_coupled_cn(s, p, dt, tight(1e-13));
  const StaggeredVectorField v = dense_stokes_oracle(g, coefficients(p, 0.5).eta, dt, div_tensor_to_faces(s.sigma));
  REQUIRE(v.max_abs() > 1e-4);
  CHECK(max_abs_diff(r.aux.v_mom, v) <= 1e-10 * v.max_abs());
  CHECK(max_abs_diff(r.state.u, 2.0 * v) <= 2e-10 * v.max_abs());
}

TEST_CASE("second-order coupled scheme starts as the Crank-Nicolson step") {
  const GridSpec g(16, 16, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  const State s = smooth_random_state(g, p, 4);
  const StepResult a = step_coupled_cn(s, p, 1e-3), b = step_coupled_o2(s, p, 1e-3);
  CHECK(bitwise_equal(a.state.phi, b.state.phi));
  CHECK(bitwise_equal(a.state.u.ux, b.state.u.ux));
  CHECK(bitwise_equal(a.state.u.uy, b.state.u.uy));
  CHECK(bitwise_equal(a.state.sigma.xy, b.state.sigma.xy));
  const StepResult a2 = step_coupled_cn(a.state, p, 1e-3), b2 = step_coupled_o2(b.state, p, 1e-3);
  CHECK(max_abs_diff(a2.state.u, b2.state.u) > 0.0);
}

TEST_CASE("implicit stress in the weak-coupling limit reproduces the explicit scheme") {
  const GridSpec g(16, 16, 1.0, 1.0);
  ModelParams p = experiment1_params();
  p.tau_s0 = 1e6;
  p.ms0 = 1e-7;
  State s = smooth_random_state(g, p, 3);
  s.sigma = SymTensorField(g);
  s.u *= 1e-5;
  const StepOptions opt = tight(1e-13);
  const StepResult a = step_coupled_implicit_stress(s, p, 1e-4, opt), b = step_coupled_cn(s, p, 1e-4, opt);
  CHECK(a.aux.fixpoint_iterations <= 2);
  CHECK(rel(a.state.u, b.state.u) <= opt.fixpoint.delta);
  CHECK(max_abs_diff(a.state.sigma, b.state.sigma) <= opt.fixpoint.delta * b.state.sigma.max_abs());
}

TEST_CASE("fixpoint cap raises FixpointError") {
  const GridSpec g(8, 8, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  StepOptions opt;
  opt.fixpoint.max_l = 1;
  const State s = smooth_random_state(g, p, 5);
  try {
    step_splitting_implicit(s, p, 1e-4, opt);
    FAIL("expected FixpointError");
  } catch (const FixpointError& e) {
    CHECK(e.last_change() > opt.fixpoint.delta);
  }
  CHECK_THROWS_AS(step_coupled_implicit_stress(s, p, 1e-4, opt), FixpointError);
}

TEST_CASE("per-cell stress system against a dense solve") {
  SplitMix64 r(3);
  for (int t = 0; t < 200; ++t) {
    const double c = 10.0 + 100.0 * r.uniform();
    const double lxx = 4 * r.uniform() - 2, lxy = 4 * r.uniform() - 2, lyx = 4 * r.uniform() - 2,
                 lyy = 4 * r.uniform() - 2;
    const std::array<double, 3> rhs{2 * r.uniform() - 1, 2 * r.uniform() - 1, 2 * r.uniform() - 1};
    // c s - (L s + s L^T), s = [[a, b], [b, d]] in (a, b, d)
    const std::vector<double> m{c - 2 * lxx, -2 * lxy, 0.0,          //
                                -lyx,        c - lxx - lyy, -lxy,    //
                                0.0,         -2 * lyx, c - 2 * lyy};
    const std::vector<double> x = dense_solve(m, {rhs[0], rhs[1], rhs[2]});
    const auto y = detail::solve_stress_cell(c, lxx, lxy, lyx, lyy, rhs);
    for (int k = 0; k < 3; ++k) CHECK(y[k] == doctest::Approx(x[k]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("implicit stress update satisfies its cell equations") {
  const GridSpec g(8, 8, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  const State s = smooth_random_state(g, p, 6);
  const StaggeredVectorField v = 10.0 * s.u;
  const CellField its(g, 0.3), b2(g, 0.05);
  const double dt = 0.01;
  const SymTensorField lag = s.sigma;
  const SymTensorField out = detail::implicit_stress(s.sigma, lag, v, its, b2, dt);
  const VelocityGradient L = grad_velocity_cc(v);
  const CellField axx = advect_conservative_upwind(v, lag.xx), axy = advect_conservative_upwind(v, lag.xy),
                  ayy = advect_conservative_upwind(v, lag.yy);
  for (std::size_t k = 0; k < out.xx.size(); ++k) {
    const double a = out.xx[k], b = out.xy[k], d = out.yy[k];
    const double lxx = L.dux_dx[k], lxy = L.dux_dy[k], lyx = L.duy_dx[k], lyy = L.duy_dy[k];
    const double rxx = (a - s.sigma.xx[k]) / dt + axx[k] - 2 * (lxx * a + lxy * b) + its[k] * a - b2[k] * 2 * lxx;
    const double rxy = (b - s.sigma.xy[k]) / dt + axy[k] - (lxx * b + lxy * d + lyx * a + lyy * b) + its[k] * b -
                       b2[k] * (lxy + lyx);
    const double ryy = (d - s.sigma.yy[k]) / dt + ayy[k] - 2 * (lyx * b + lyy * d) + its[k] * d - b2[k] * 2 * lyy;
    CHECK(std::abs(rxx) < 1e-11);
    CHECK(std::abs(rxy) < 1e-11);
    CHECK(std::abs(ryy) < 1e-11);
  }
}

TEST_CASE("splitting with implicit stress and no elastic coupling is one iteration of the plain splitting") {
  const GridSpec g(16, 16, 1.0, 1.0);
  ModelParams p = experiment1_params();
  p.ms0 = 0.0;
  State s = smooth_random_state(g, p, 8);
  s.sigma = SymTensorField(g);
  const StepResult a = step_splitting_implicit(s, p, 1e-4, tight()),
                   b = step_splitting(s, p, 1e-4, SplittingMode::MonolithicStokes, tight());
  CHECK(a.aux.fixpoint_iterations == 1);
  CHECK(bitwise_equal(a.state.u.ux, b.state.u.ux));
  CHECK(bitwise_equal(a.state.phi, b.state.phi));
  CHECK(a.state.sigma.max_abs() == 0.0);
}

TEST_CASE("velocity is discretely divergence free after every step") {
  const GridSpec g(16, 16, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  const double tol = 1e-10;
  for (SchemeKind k : kFull) {
    CAPTURE(to_string(k));
    State s = smooth_random_state(g, p, 9);
    for (int n = 0; n < 3; ++n) {
      s = advance(k, s, p, 1e-3, tight(tol)).state;
      CHECK(div_face(s.u).max_abs() <= 10.0 * tol * s.u.max_abs() / g.hx());
      CHECK(std::abs(sum(s.p)) < 1e-10 * std::max(1.0, s.p.max_abs()) * s.p.size());
    }
  }
}

TEST_CASE("full schemes conserve mass") {
  const GridSpec g(16, 16, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  for (SchemeKind k : kFull) {
    CAPTURE(to_string(k));
    State s = smooth_random_state(g, p, 10);
    const double m0 = integrate(s.phi);
    for (int n = 0; n < 3; ++n) s = advance(k, s, p, 1e-3, tight(1e-10)).state;
    CHECK(std::abs(integrate(s.phi) - m0) <= 1e-12 * std::abs(m0));
  }
}

TEST_CASE("discrete energy laws of the full schemes") {
  const GridSpec g(16, 16, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  const double tol = 1e-10;
  for (SchemeKind k : kFull) {
    CAPTURE(to_string(k));
    State s = smooth_random_state(g, p, 11);
    for (int n = 0; n < 3; ++n) {
      const StepResult r = advance(k, s, p, 1e-3, tight(tol));
      const double e = energy(r.state, p).e_tot;
      CHECK(discrete_law_residual(k, s, r.state, r.aux, p, 1e-3) <= 10.0 * tol * std::max(1.0, std::abs(e)));
      s = r.state;
    }
  }
}

TEST_CASE("uniform velocity stays uniform without forces") {
  const GridSpec g(8, 8, 1.0, 1.0);
  const ModelParams p = critical_params();
  State s(g);
  s.phi = CellField(g, 0.5);
  s.u = StaggeredVectorField(g, 0.3, -0.2);
  for (SchemeKind k : kFull) {
    CAPTURE(to_string(k));
    State c = s;
    for (int n = 0; n < 3; ++n) c = advance(k, c, p, 1e-2, tight()).state;
    CHECK(max_abs_diff(c.u, s.u) < 1e-12);
    CHECK(c.sigma.max_abs() < 1e-14);
    CHECK(max_abs_diff(c.phi, s.phi) < 1e-14);
  }
}

TEST_CASE("coupled and split stress updates agree to second order in dt") {
  const GridSpec g(16, 16, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  const State s = smooth_random_state(g, p, 7);
  auto gap = [&](double dt) {
    const StepResult a = step_coupled_cn(s, p, dt, tight()),
                     b = step_splitting(s, p, dt, SplittingMode::MonolithicStokes, tight());
    return max_abs_diff(a.state.sigma, b.state.sigma);
  };
  const double e1 = gap(4e-4), e2 = gap(2e-4), e3 = gap(1e-4);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("Chorin and monolithic fluid solves agree to first order") {
  const GridSpec g(16, 16, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  const State s = smooth_random_state(g, p, 12);
  const StepResult a = step_splitting(s, p, 1e-4, SplittingMode::Chorin, tight()),
                   b = step_splitting(s, p, 1e-4, SplittingMode::MonolithicStokes, tight());
  CHECK(bitwise_equal(a.state.phi, b.state.phi));
  CHECK(rel(a.state.u, b.state.u) < 1e-2);
  REQUIRE(a.aux.u_dagger.has_value());
  REQUIRE(a.aux.u_star.has_value());
}

TEST_CASE("invalid step size is rejected") {
  const GridSpec g(8, 8, 1.0, 1.0);
  const ModelParams p = experiment1_params();
  const State s = smooth_random_state(g, p, 1);
  for (SchemeKind k : kFull) CHECK_THROWS_AS(advance(k, s, p, -1e-3), std::invalid_argument);
}
