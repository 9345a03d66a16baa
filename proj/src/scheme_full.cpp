#include <algorithm>
#include <stdexcept>
#include <string>

#include "assembly.hpp"
#include "vpsim/grid_ops.hpp"
#include "vpsim/operators.hpp"
#include "vpsim/schemes.hpp"

namespace vpsim {

namespace {

using detail::extrapolate;
using detail::half_level;
using detail::relative_change;

void check_inputs(const State& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const GridSpec& g = s.grid();
  if (s.q.grid() != g || s.u.grid() != g || s.sigma.grid() != g || s.p.grid() != g) {
    throw std::invalid_argument("state fields live on different grids");
  }
}

CellField eta_field(const ModelParams& p, const CellField& phi) {
  CellField r(phi.grid());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = coefficients(p, clamp_phi(p, phi[k])).eta;
  return r;
}

CellField b2_field(const ModelParams& p, const CellField& phi) {
  CellField r(phi.grid());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = coefficients(p, clamp_phi(p, phi[k])).B2;
  return r;
}

CellField inv_tau_s_field(const ModelParams& p, const CellField& phi) {
  return detail::inverse_relaxation(clamp_phi(p, phi), p.tau_s0, p.phi_clamp_eps);
}

std::vector<double> flat(const SymTensorField& s) {
  std::vector<double> r(s.xx.data());
  r.insert(r.end(), s.xy.data().begin(), s.xy.data().end());
  r.insert(r.end(), s.yy.data().begin(), s.yy.data().end());
  return r;
}

void append(std::vector<double>& out, std::span<const double> x) { out.insert(out.end(), x.begin(), x.end()); }

CellField slice(const GridSpec& g, const std::vector<double>& x, std::size_t offset) {
  const auto n = static_cast<std::size_t>(g.cells());
  return CellField(g, std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(offset),
                                          x.begin() + static_cast<std::ptrdiff_t>(offset + n)));
}

void remove_mean(CellField& p) {
  double s = 0.0;
  for (double v : p.data()) s += v;
  const double m = s / static_cast<double>(p.size());
  if (m == 0.0) return;
  for (double& v : p.data()) v -= m;
}

SparseMatrix momentum_operator(double alpha, double dt, const StaggeredVectorField& conv, const CellField& eta) {
  const int n2 = 2 * conv.grid().cells();
  return add(add(SparseMatrix::identity(n2, alpha / dt), ops::convection(conv)), ops::viscous(eta));
}

void fill_full_aux(StepAux& aux, const StaggeredVectorField& v_mom, const StaggeredVectorField& conv,
                   const CellField& eta, const SymTensorField& sigma_mom, const SymTensorField& sigma_stress,
                   const StaggeredVectorField& v_stress, const CellField& inv_tau_s, const CellField& b2,
                   const CellField& p, const StaggeredVectorField& pressure_velocity) {
  aux.v_mom = v_mom;
  aux.conv_velocity = conv;
  aux.eta = eta;
  aux.sigma_mom = sigma_mom;
  aux.sigma_L = sigma_stress;
  aux.sigma_relax = sigma_stress;
  aux.v_stress = v_stress;
  aux.inv_tau_s = inv_tau_s;
  aux.b2 = b2;
  aux.pressure_grad = grad_cc(p);
  aux.pressure_velocity = pressure_velocity;
}

State advanced(const State& s, double dt) {
  State r = s;
  r.prev = PrevLevel{s.phi, s.u, s.sigma};
  r.t = s.t + dt;
  r.step = s.step + 1;
  return r;
}

// ---------------------------------------------------------------------------
// fully coupled (phi, q, v, p) systems

struct Coupled {
  detail::PhaseInputs in;
  detail::PhaseSystem ph;
  SparseMatrix T, TAmu, Q, Qt, mom, A, neg_lap;
  std::vector<double> f_base;  ///< face force without the stress: alpha/dt u^n + T bmu
  std::vector<double> un;      ///< u^n; velocity unknown is u^n + Q z
  std::vector<double> rf_shift;
  std::vector<double> mom_un;
};

struct CoupledSolution {
  CellField phi, q, p;
  StaggeredVectorField v;
  std::vector<double> x;  ///< (phi, q, z) as solved, before mass restoration
};

// The velocity is sought as u^n + Q z with Q the solenoidal basis, so the
// constraint row and the pressure drop out; p is recovered afterwards from
// the momentum residual by a Poisson solve.
Coupled build_coupled(const State& s, const ModelParams& prm, double dt, double alpha, const CellField& phi_hat,
                      const StaggeredVectorField& u_hat, const CellField& eta) {
  const GridSpec& g = s.grid();
  const int n = g.cells();
  Coupled c;
  c.in.phi_n = &s.phi;
  c.in.q_n = &s.q;
  c.in.phi_coef = phi_hat;
  c.in.params = &prm;
  c.in.dt = dt;
  c.in.q_velocity = u_hat;
  c.ph = detail::build_phase(c.in);
  c.T = ops::korteweg(phi_hat);
  c.TAmu = multiply(c.T, c.ph.Amu);
  c.Q = ops::grid_operators(g).Q;
  c.Qt = ops::grid_operators(g).Qt;
  c.mom = momentum_operator(alpha, dt, u_hat, eta);
  c.neg_lap = scaled(c.ph.L, -1.0);
  const SparseMatrix Tt = c.T.transpose();

  BlockAssembler b({n, n, n + 1}, {n, n, n + 1});
  b.place(0, 0, c.ph.Pff);
  b.place(0, 1, c.ph.Pfq);
  b.place(0, 2, multiply(Tt, c.Q));
  b.place(1, 0, c.ph.Pqf);
  b.place(1, 1, c.ph.Pqq);
  b.place(2, 0, multiply(c.Qt, c.TAmu), -1.0);
  b.place(2, 2, multiply(c.Qt, multiply(c.mom, c.Q)));
  c.A = b.build();

  c.un = s.u.flat();
  c.f_base = c.T * c.ph.bmu;
  for (std::size_t k = 0; k < c.f_base.size(); ++k) c.f_base[k] += alpha / dt * c.un[k];
  c.rf_shift = Tt * c.un;
  c.mom_un = c.mom * c.un;
  return c;
}

std::vector<double> initial_guess(const State& s) {
  std::vector<double> x(s.phi.data());
  append(x, s.q.data());
  x.resize(x.size() + static_cast<std::size_t>(s.grid().cells()) + 1, 0.0);
  return x;
}

/// Pressure with grad p = g in the least-squares sense: -Lap p = -div g.
CellField recover_pressure(const SparseMatrix& neg_lap, const SparseMatrix& D, const std::vector<double>& g,
                           const CellField& p_guess, const StepOptions& opt, int* iters) {
  std::vector<double> rhs = D * g;
  for (double& v : rhs) v = -v;
  CellField p(p_guess.grid(),
              detail::solve_increment(neg_lap, rhs, p_guess.data(), detail::with_method(opt.solver, SolverMethod::CG),
                                      iters));
  remove_mean(p);
  return p;
}

CoupledSolution solve_coupled(const Coupled& c, const State& s, const StaggeredVectorField& div_sigma,
                              const std::vector<double>& x_old, const StepOptions& opt, int* iters) {
  const GridSpec& g = s.grid();
  const auto n = static_cast<std::size_t>(g.cells());
  std::vector<double> f = c.f_base;
  const std::vector<double> ds = div_sigma.flat();
  for (std::size_t k = 0; k < ds.size(); ++k) f[k] += ds[k];

  std::vector<double> rhs = c.ph.rf;
  for (std::size_t k = 0; k < n; ++k) rhs[k] -= c.rf_shift[k];
  append(rhs, c.ph.rq);
  std::vector<double> fr(f);
  for (std::size_t k = 0; k < fr.size(); ++k) fr[k] -= c.mom_un[k];
  append(rhs, c.Qt * fr);

  CoupledSolution r;
  r.x = detail::solve_increment(c.A, rhs, x_old, opt.solver, iters);
  r.phi = slice(g, r.x, 0);
  r.q = slice(g, r.x, n);
  const std::vector<double> z(r.x.begin() + static_cast<std::ptrdiff_t>(2 * n), r.x.end());
  std::vector<double> v = c.Q * z;
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += c.un[k];
  r.v = StaggeredVectorField::from_flat(g, v);

  // grad p = f + T mu - Mom v (f already carries T bmu)
  std::vector<double> gp = c.TAmu * r.phi.values();
  const std::vector<double> mv = c.mom * v;
  for (std::size_t k = 0; k < gp.size(); ++k) gp[k] += f[k] - mv[k];
  r.p = recover_pressure(c.neg_lap, c.ph.D, gp, s.p, opt, iters);
  if (opt.conserve_mass) detail::restore_mass(s.phi, r.phi);
  return r;
}

StepResult coupled_family(const State& s, const ModelParams& prm, double dt, const StepOptions& opt,
                          SchemeKind kind) {
  check_inputs(s, dt);
  const bool half = kind != SchemeKind::Coupled;
  const double alpha = half ? 2.0 : 1.0;
  const PrevLevel* pr = (kind == SchemeKind::Coupled2nd && s.prev) ? &*s.prev : nullptr;
  const CellField phi_hat = pr ? extrapolate(s.phi, &pr->phi) : s.phi;
  const StaggeredVectorField u_hat = pr ? extrapolate(s.u, &pr->u) : s.u;
  const SymTensorField sig_hat = pr ? extrapolate(s.sigma, &pr->sigma) : s.sigma;
  const CellField eta = eta_field(prm, phi_hat);

  StepResult r;
  r.aux.scheme = kind;
  r.aux.dt = dt;
  const Coupled c = build_coupled(s, prm, dt, alpha, phi_hat, u_hat, eta);
  const CoupledSolution sol =
      solve_coupled(c, s, div_tensor_to_faces(sig_hat), initial_guess(s), opt, &r.aux.linear_iterations);

  const CellField phi_half = half_level(s.phi, sol.phi);
  const CellField its = inv_tau_s_field(prm, phi_half);
  const CellField b2 = b2_field(prm, phi_half);
  const StaggeredVectorField& v_adv = half ? sol.v : s.u;
  const SymTensorField sigma_new = detail::explicit_stress(s.sigma, sig_hat, v_adv, sol.v, its, b2, dt);

  detail::fill_phase_aux(c.ph, c.in, sol.phi, sol.q, r.aux);
  fill_full_aux(r.aux, sol.v, u_hat, eta, sig_hat, sig_hat, sol.v, its, b2, sol.p, sol.v);

  r.state = advanced(s, dt);
  r.state.phi = sol.phi;
  r.state.q = sol.q;
  r.state.u = half ? 2.0 * sol.v - s.u : sol.v;
  r.state.p = sol.p;
  r.state.sigma = sigma_new;
  return r;
}

// ---------------------------------------------------------------------------
// splitting

struct PhaseStep {
  detail::PhaseInputs in;
  detail::PhaseSystem ph;
  CellField phi, q;
  StaggeredVectorField u_star;
};

PhaseStep splitting_phase(const State& s, const ModelParams& prm, double dt, const StepOptions& opt, int* iters) {
  const GridSpec& g = s.grid();
  const int n = g.cells();
  PhaseStep r;
  r.in.phi_n = &s.phi;
  r.in.q_n = &s.q;
  r.in.phi_coef = s.phi;
  r.in.params = &prm;
  r.in.dt = dt;
  r.in.q_velocity = s.u;
  r.in.split_velocity = s.u;
  r.ph = detail::build_phase(r.in);

  BlockAssembler b({n, n}, {n, n});
  b.place(0, 0, r.ph.Pff);
  b.place(0, 1, r.ph.Pfq);
  b.place(1, 0, r.ph.Pqf);
  b.place(1, 1, r.ph.Pqq);
  std::vector<double> rhs = r.ph.rf;
  append(rhs, r.ph.rq);
  std::vector<double> x_old(s.phi.data());
  append(x_old, s.q.data());
  const std::vector<double> x = detail::solve_increment(b.build(), rhs, x_old, opt.solver, iters);
  r.phi = slice(g, x, 0);
  r.q = slice(g, x, static_cast<std::size_t>(n));
  if (opt.conserve_mass) detail::restore_mass(s.phi, r.phi);

  const CellField mu = detail::chemical_potential(r.ph, s.phi, r.phi);
  std::vector<double> us = s.u.flat();
  const std::vector<double> gmu = r.ph.G * mu.values();
  for (std::size_t f = 0; f < us.size(); ++f) us[f] -= dt * r.ph.phi_face[f] * gmu[f];
  r.u_star = StaggeredVectorField::from_flat(g, us);
  return r;
}

struct FluidSolution {
  StaggeredVectorField u;
  CellField p;
  std::optional<StaggeredVectorField> u_dagger;
  std::vector<double> z;  ///< monolithic: solenoidal coordinates of u - u^n
};

/// Step 2 operator for u from u* with explicit stress force; the matrices
/// do not depend on the stress, so the fixpoint loop reuses them.
class Fluid {
 public:
  Fluid(const State& s, double dt, const CellField& eta, SplittingMode mode) : mode_(mode), dt_(dt) {
    const GridSpec& g = s.grid();
    const ops::GridOperators& go = ops::grid_operators(g);
    G_ = go.G;
    D_ = go.D;
    mom_ = momentum_operator(1.0, dt, s.u, eta);
    neg_lap_ = scaled(go.L, -1.0);
    un_ = s.u.flat();
    if (mode == SplittingMode::MonolithicStokes) {
      Q_ = go.Q;
      Qt_ = go.Qt;
      A_ = multiply(Qt_, multiply(mom_, Q_));
      mom_un_ = mom_ * un_;
    }
  }

  /// prev (may be null) supplies the initial guesses of a fixpoint sweep.
  FluidSolution solve(const State& s, const StaggeredVectorField& u_star, const StaggeredVectorField& div_sigma,
                      const FluidSolution* prev, const StepOptions& opt, int* iters) const {
    const GridSpec& g = s.grid();
    std::vector<double> f = u_star.flat();
    const std::vector<double> ds = div_sigma.flat();
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = f[k] / dt_ + ds[k];
    const CellField& p_guess = prev ? prev->p : s.p;
    FluidSolution r;
    if (mode_ == SplittingMode::MonolithicStokes) {
      std::vector<double> fr(f);
      for (std::size_t k = 0; k < fr.size(); ++k) fr[k] -= mom_un_[k];
      const std::vector<double> z0 =
          prev ? prev->z : std::vector<double>(static_cast<std::size_t>(g.cells()) + 1, 0.0);
      r.z = detail::solve_increment(A_, Qt_ * fr, z0, opt.solver, iters);
      std::vector<double> v = Q_ * r.z;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += un_[k];
      const std::vector<double> mv = mom_ * v;
      std::vector<double> gp(f);
      for (std::size_t k = 0; k < gp.size(); ++k) gp[k] -= mv[k];
      r.u = StaggeredVectorField::from_flat(g, v);
      r.p = recover_pressure(neg_lap_, D_, gp, p_guess, opt, iters);
      return r;
    }
    const std::vector<double> ud =
        detail::solve_increment(mom_, f, prev && prev->u_dagger ? prev->u_dagger->flat() : u_star.flat(), opt.solver,
                                iters);
    std::vector<double> rhs = D_ * ud;
    for (double& v : rhs) v = -v / dt_;
    const std::vector<double> p = detail::solve_increment(neg_lap_, rhs, p_guess.data(),
                                                          detail::with_method(opt.solver, SolverMethod::CG), iters);
    r.p = CellField(g, p);
    remove_mean(r.p);
    const std::vector<double> gp = G_ * r.p.values();
    std::vector<double> u1(ud);
    for (std::size_t k = 0; k < u1.size(); ++k) u1[k] -= dt_ * gp[k];
    r.u = StaggeredVectorField::from_flat(g, u1);
    r.u_dagger = StaggeredVectorField::from_flat(g, ud);
    return r;
  }

 private:
  SplittingMode mode_;
  double dt_;
  SparseMatrix G_, D_, mom_, neg_lap_, Q_, Qt_, A_;
  std::vector<double> un_, mom_un_;
};

SchemeKind kind_of(SplittingMode m) {
  return m == SplittingMode::Chorin ? SchemeKind::SplittingChorin : SchemeKind::SplittingMonolithic;
}

void fill_splitting_aux(StepAux& aux, const State& s, const PhaseStep& ph, const FluidSolution& fl,
                        const CellField& eta, const SymTensorField& sigma_mom, const SymTensorField& sigma_stress,
                        const CellField& its, const CellField& b2) {
  detail::fill_phase_aux(ph.ph, ph.in, ph.phi, ph.q, aux);
  const StaggeredVectorField& v_mom = fl.u_dagger ? *fl.u_dagger : fl.u;
  fill_full_aux(aux, v_mom, s.u, eta, sigma_mom, sigma_stress, fl.u, its, b2, fl.p, fl.u);
  aux.u_star = ph.u_star;
  aux.u_dagger = fl.u_dagger;
}

}  // namespace

StepResult step_coupled(const State& s, const ModelParams& p, double dt, const StepOptions& opt) {
  return coupled_family(s, p, dt, opt, SchemeKind::Coupled);
}

StepResult step_coupled_cn(const State& s, const ModelParams& p, double dt, const StepOptions& opt) {
  return coupled_family(s, p, dt, opt, SchemeKind::CoupledCN);
}

StepResult step_coupled_o2(const State& s, const ModelParams& p, double dt, const StepOptions& opt) {
  return coupled_family(s, p, dt, opt, SchemeKind::Coupled2nd);
}

StepResult step_coupled_implicit_stress(const State& s, const ModelParams& prm, double dt, const StepOptions& opt) {
  check_inputs(s, dt);
  const CellField eta = eta_field(prm, s.phi);
  const CellField its = inv_tau_s_field(prm, s.phi);
  const Coupled c = build_coupled(s, prm, dt, 2.0, s.phi, s.u, eta);

  StepResult r;
  r.aux.scheme = SchemeKind::CoupledImplicitStress;
  r.aux.dt = dt;
  SymTensorField sigma_l = s.sigma;
  std::vector<double> x_iter = initial_guess(s);
  CoupledSolution sol, prev;
  CellField b2;
  double change = 0.0;
  for (int l = 1; l <= opt.fixpoint.max_l; ++l) {
    sol = solve_coupled(c, s, div_tensor_to_faces(sigma_l), x_iter, opt, &r.aux.linear_iterations);
    b2 = b2_field(prm, half_level(s.phi, sol.phi));
    SymTensorField sigma_next = detail::implicit_stress(s.sigma, sigma_l, sol.v, its, b2, dt);
    change = relative_change(flat(sigma_next), flat(sigma_l));
    if (l > 1) {
      change = std::max({change, relative_change(sol.v.flat(), prev.v.flat()),
                         relative_change(sol.p.data(), prev.p.data())});
    }
    r.aux.fixpoint_iterations = l;
    const bool done = change <= opt.fixpoint.delta;
    if (done) {
      detail::fill_phase_aux(c.ph, c.in, sol.phi, sol.q, r.aux);
      fill_full_aux(r.aux, sol.v, s.u, eta, sigma_l, sigma_next, sol.v, its, b2, sol.p, sol.v);
      r.state = advanced(s, dt);
      r.state.phi = sol.phi;
      r.state.q = sol.q;
      r.state.u = 2.0 * sol.v - s.u;
      r.state.p = sol.p;
      r.state.sigma = std::move(sigma_next);
      return r;
    }
    sigma_l = std::move(sigma_next);
    x_iter = sol.x;
    prev = sol;
  }
  throw FixpointError("implicit-stress fixpoint did not converge in " + std::to_string(opt.fixpoint.max_l) +
                          " iterations (last relative change " + std::to_string(change) + ")",
                      change);
}

StepResult step_splitting(const State& s, const ModelParams& prm, double dt, SplittingMode mode,
                          const StepOptions& opt) {
  check_inputs(s, dt);
  StepResult r;
  r.aux.scheme = kind_of(mode);
  r.aux.dt = dt;
  const PhaseStep ph = splitting_phase(s, prm, dt, opt, &r.aux.linear_iterations);
  const CellField phi_half = half_level(s.phi, ph.phi);
  const CellField eta = eta_field(prm, phi_half);
  const Fluid fluid(s, dt, eta, mode);
  const FluidSolution fl =
      fluid.solve(s, ph.u_star, div_tensor_to_faces(s.sigma), nullptr, opt, &r.aux.linear_iterations);

  const CellField its = inv_tau_s_field(prm, phi_half);
  const CellField b2 = b2_field(prm, phi_half);
  SymTensorField sigma_new = detail::explicit_stress(s.sigma, s.sigma, fl.u, fl.u, its, b2, dt);
  fill_splitting_aux(r.aux, s, ph, fl, eta, s.sigma, s.sigma, its, b2);

  r.state = advanced(s, dt);
  r.state.phi = ph.phi;
  r.state.q = ph.q;
  r.state.u = fl.u;
  r.state.p = fl.p;
  r.state.sigma = std::move(sigma_new);
  return r;
}

StepResult step_splitting_implicit(const State& s, const ModelParams& prm, double dt, const StepOptions& opt,
                                   SplittingMode mode) {
  check_inputs(s, dt);
  StepResult r;
  r.aux.scheme = SchemeKind::SplittingImplicitFixpoint;
  r.aux.dt = dt;
  const PhaseStep ph = splitting_phase(s, prm, dt, opt, &r.aux.linear_iterations);
  const CellField phi_half = half_level(s.phi, ph.phi);
  const CellField eta = eta_field(prm, phi_half);
  const CellField its = inv_tau_s_field(prm, phi_half);
  const CellField b2 = b2_field(prm, phi_half);
  const Fluid fluid(s, dt, eta, mode);

  SymTensorField sigma_l = s.sigma;
  FluidSolution fl, prev;
  double change = 0.0;
  for (int l = 1; l <= opt.fixpoint.max_l; ++l) {
    fl = fluid.solve(s, ph.u_star, div_tensor_to_faces(sigma_l), l > 1 ? &prev : nullptr, opt,
                     &r.aux.linear_iterations);
    SymTensorField sigma_next = detail::implicit_stress(s.sigma, sigma_l, fl.u, its, b2, dt);
    change = relative_change(flat(sigma_next), flat(sigma_l));
    if (l > 1) {
      change = std::max({change, relative_change(fl.u.flat(), prev.u.flat()),
                         relative_change(fl.p.data(), prev.p.data())});
    }
    r.aux.fixpoint_iterations = l;
    if (change <= opt.fixpoint.delta) {
      fill_splitting_aux(r.aux, s, ph, fl, eta, sigma_l, sigma_next, its, b2);
      r.state = advanced(s, dt);
      r.state.phi = ph.phi;
      r.state.q = ph.q;
      r.state.u = fl.u;
      r.state.p = fl.p;
      r.state.sigma = std::move(sigma_next);
      return r;
    }
    sigma_l = std::move(sigma_next);
    prev = std::move(fl);
  }
  throw FixpointError("splitting fixpoint did not converge in " + std::to_string(opt.fixpoint.max_l) +
                          " iterations (last relative change " + std::to_string(change) + ")",
                      change);
}

StepResult advance(SchemeKind kind, const State& s, const ModelParams& p, double dt, const StepOptions& opt) {
  switch (kind) {
    case SchemeKind::SimplifiedO1: return step_o1(s, p, dt, opt);
    case SchemeKind::SimplifiedO2: return step_o2(s, p, dt, opt);
    case SchemeKind::Coupled: return step_coupled(s, p, dt, opt);
    case SchemeKind::CoupledCN: return step_coupled_cn(s, p, dt, opt);
    case SchemeKind::Coupled2nd: return step_coupled_o2(s, p, dt, opt);
    case SchemeKind::CoupledImplicitStress: return step_coupled_implicit_stress(s, p, dt, opt);
    case SchemeKind::SplittingMonolithic: return step_splitting(s, p, dt, SplittingMode::MonolithicStokes, opt);
    case SchemeKind::SplittingChorin: return step_splitting(s, p, dt, SplittingMode::Chorin, opt);
    case SchemeKind::SplittingImplicitFixpoint: return step_splitting_implicit(s, p, dt, opt);
  }
  throw std::invalid_argument("unknown scheme kind");
}

}  // namespace vpsim
