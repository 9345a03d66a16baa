#include "vpsim/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vpsim/grid_ops.hpp"
#include "vpsim/operators.hpp"

namespace vpsim {

namespace {

double potential_integral(const CellField& phi, const ModelParams& p) {
  double acc = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) acc += potential_F(p.potential, clamp_phi(p, phi[k]));
  return acc * phi.grid().cell_area();
}

bool is_splitting(SchemeKind k) {
  return k == SchemeKind::SplittingMonolithic || k == SchemeKind::SplittingChorin ||
         k == SchemeKind::SplittingImplicitFixpoint;
}

}  // namespace

EnergyBreakdown energy(const State& s, const ModelParams& p) {
  EnergyBreakdown e;
  const StaggeredVectorField gp = grad_cc(s.phi);
  e.e_mix = 0.5 * p.C0 * face_dot(gp, gp) + potential_integral(s.phi, p);
  e.e_conf = 0.5 * cell_dot(s.q, s.q);
  e.e_el = 0.5 * integrate(s.sigma.trace());
  e.e_kin = 0.5 * face_dot(s.u, s.u);
  e.e_tot = e.e_mix + e.e_conf + e.e_el + e.e_kin;
  return e;
}

double nd_phobic(const CellField& f_eff, const CellField& phi_new, const CellField& phi_old, const ModelParams& p,
                 double dt) {
  double pair = 0.0;
  for (std::size_t k = 0; k < phi_new.size(); ++k) pair += f_eff[k] * (phi_new[k] - phi_old[k]);
  pair *= phi_new.grid().cell_area();
  return (pair - (potential_integral(phi_new, p) - potential_integral(phi_old, p))) / dt;
}

double nd_phobic(const CellField& phi_new, const CellField& phi_old, const ModelParams& p, double dt) {
  CellField f(phi_new.grid());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const AffineF af = f_approx_affine(p.potential, p.fapprox, clamp_phi(p, phi_old[k]), dt);
    f[k] = af.a * phi_new[k] + af.b;
  }
  return nd_phobic(f, phi_new, phi_old, p, dt);
}

double nd_split(const StaggeredVectorField& u_np1, const StaggeredVectorField& u_star,
                const StaggeredVectorField& u_n, double dt) {
  const StaggeredVectorField a = u_np1 - u_star;
  const StaggeredVectorField b = u_star - u_n;
  return (face_dot(a, a) + face_dot(b, b)) / (2.0 * dt);
}

double viscous_dissipation(const CellField& eta, const StaggeredVectorField& u) {
  const StrainRate d = strain_rate(u);
  const CellField eta_c = cell_to_corner(eta);
  double acc = 0.0;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    acc += 2.0 * eta[k] * (d.dxx[k] * d.dxx[k] + d.dyy[k] * d.dyy[k]) +
           4.0 * eta_c[k] * d.dxy_corner[k] * d.dxy_corner[k];
  }
  return acc * eta.grid().cell_area();
}

double LawTerms::rhs() const {
  return -nd_phobic - diss_mixflux - diss_bulk - q_advection + stress_power_el - diss_shear + bulk_work -
         stress_power_mom - diss_visc - convection - pressure_work - kinetic_extra;
}

LawTerms law_terms(const State& old_state, const State& new_state, const StepAux& aux, const ModelParams& p) {
  const double dt = aux.dt;
  LawTerms t;
  t.nd_phobic = nd_phobic(aux.f_eff, new_state.phi, old_state.phi, p, dt);
  t.diss_mixflux = p.M * face_dot(aux.flux, aux.flux);
  t.diss_bulk = cell_dot(hadamard(aux.inv_tau_b, aux.q_half), aux.q_half);
  if (aux.q_velocity) t.q_advection = cell_dot(advect_conservative_upwind(*aux.q_velocity, aux.q_half), aux.q_half);
  if (!is_full_model(aux.scheme)) return t;

  t.stress_power_el = stress_power(aux.sigma_L, aux.v_stress);
  t.diss_shear = 0.5 * cell_dot(aux.sigma_relax.trace(), aux.inv_tau_s);
  t.bulk_work = cell_dot(aux.b2, div_face(aux.v_stress));
  t.stress_power_mom = stress_power(aux.sigma_mom, aux.v_mom);
  t.diss_visc = viscous_dissipation(aux.eta, aux.v_mom);
  const GridSpec& g = aux.v_mom.grid();
  const StaggeredVectorField cv = StaggeredVectorField::from_flat(g, ops::convection(aux.conv_velocity) * aux.v_mom.flat());
  t.convection = face_dot(cv, aux.v_mom);
  t.pressure_work = face_dot(aux.pressure_grad, aux.pressure_velocity);

  if (aux.scheme == SchemeKind::Coupled) {
    const StaggeredVectorField du = new_state.u - old_state.u;
    t.kinetic_extra = face_dot(du, du) / (2.0 * dt);
  } else if (is_splitting(aux.scheme)) {
    if (!aux.u_star) throw std::invalid_argument("splitting aux without u*");
    t.nd_split = nd_split(new_state.u, *aux.u_star, old_state.u, dt);
    if (aux.u_dagger) {
      t.kinetic_extra = nd_split(*aux.u_dagger, *aux.u_star, old_state.u, dt) +
                        0.5 * dt * face_dot(aux.pressure_grad, aux.pressure_grad);
    } else {
      t.kinetic_extra = t.nd_split;
    }
  }
  return t;
}

EnergyBreakdown step_breakdown(const State& old_state, const State& new_state, const StepAux& aux,
                               const ModelParams& p) {
  EnergyBreakdown e = energy(new_state, p);
  const LawTerms t = law_terms(old_state, new_state, aux, p);
  e.nd_phobic = t.nd_phobic;
  e.nd_split = t.nd_split;
  e.diss_mixflux = t.diss_mixflux;
  e.diss_bulk = t.diss_bulk;
  e.diss_shear = t.diss_shear;
  e.diss_visc = t.diss_visc;
  return e;
}

double discrete_law_residual(SchemeKind kind, const State& old_state, const State& new_state, const StepAux& aux,
                             const ModelParams& p, double dt) {
  if (aux.scheme != kind) {
    throw std::invalid_argument("aux was recorded by " + to_string(aux.scheme) + ", not " + to_string(kind));
  }
  if (aux.dt != dt) throw std::invalid_argument("aux time step does not match dt");
  if (new_state.grid() != old_state.grid() || aux.mu.grid() != old_state.grid()) {
    throw std::invalid_argument("states and aux live on different grids");
  }
  const double de = (energy(new_state, p).e_tot - energy(old_state, p).e_tot) / dt;
  return std::abs(de - law_terms(old_state, new_state, aux, p).rhs());
}

double min_sym_eigenvalue(double a, double b, double d) {
  const double m = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), b);
  return m - r;
}

Conformation conformation_tensor(const State& s, const ModelParams& p) {
  const GridSpec& g = s.grid();
  Conformation c{SymTensorField(g), 0.0};
  double lo = INFINITY;
  const double e = p.phi_clamp_eps;
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    const double ph = std::clamp(s.phi[k], e, 1.0 - e);
    const double b2 = p.ms0 * ph * ph;
    // without elastic modulus only sigma = 0 is meaningful; it maps to c = 1
    auto ratio = [b2](double v) { return v == 0.0 ? 0.0 : v / b2; };
    c.c.xx[k] = ratio(s.sigma.xx[k]) + 1.0;
    c.c.xy[k] = ratio(s.sigma.xy[k]);
    c.c.yy[k] = ratio(s.sigma.yy[k]) + 1.0;
    lo = std::min(lo, min_sym_eigenvalue(c.c.xx[k], c.c.xy[k], c.c.yy[k]));
  }
  c.min_eigenvalue = lo;
  return c;
}

}  // namespace vpsim
