/// @file energy.hpp
/// @brief Energy functionals, the terms of the discrete energy laws and the
/// per-step law residual.

#pragma once

#include "vpsim/materials.hpp"
#include "vpsim/state.hpp"

namespace vpsim {

struct EnergyBreakdown {
  double e_mix = 0.0;
  double e_conf = 0.0;
  double e_el = 0.0;
  double e_kin = 0.0;
  double e_tot = 0.0;
  double diss_mixflux = 0.0;  ///< M ||flux||^2
  double diss_bulk = 0.0;     ///< <q/tau_b, q> at n+1/2
  double diss_shear = 0.0;    ///< int tr(sigma) / (2 tau_s)
  double diss_visc = 0.0;     ///< int eta/2 |grad u + grad u^T|^2
  double nd_phobic = 0.0;
  double nd_split = 0.0;
};

/// Energies only (dissipation fields stay zero).
EnergyBreakdown energy(const State& s, const ModelParams& p);

/// int f_eff (phi_new - phi_old)/dt - int (F(phi_new) - F(phi_old))/dt.
double nd_phobic(const CellField& f_eff, const CellField& phi_new, const CellField& phi_old, const ModelParams& p,
                 double dt);
/// Same with f_eff = a phi_new + b from f_approx_affine at phi_old (no c_mu part).
double nd_phobic(const CellField& phi_new, const CellField& phi_old, const ModelParams& p, double dt);

/// (||u_np1 - u_star||^2 + ||u_star - u_n||^2) / (2 dt), face norms.
double nd_split(const StaggeredVectorField& u_np1, const StaggeredVectorField& u_star,
                const StaggeredVectorField& u_n, double dt);

/// hx hy [ sum_cells 2 eta (Dxx^2 + Dyy^2) + sum_corners 4 eta_c Dxy^2 ], eta_c
/// the corner average. Equals <V(eta) u, u> for the viscous operator.
double viscous_dissipation(const CellField& eta, const StaggeredVectorField& u);

/// Signed right-hand side terms of the discrete law of one step.
struct LawTerms {
  double nd_phobic = 0.0;
  double diss_mixflux = 0.0;
  double diss_bulk = 0.0;
  double q_advection = 0.0;    ///< <A_up q^{n+1/2}, q^{n+1/2}> (donor-cell dissipation)
  double stress_power_el = 0.0;  ///< int sigma_L : grad v_stress
  double diss_shear = 0.0;
  double bulk_work = 0.0;      ///< <B2, div v_stress>
  double stress_power_mom = 0.0;
  double diss_visc = 0.0;
  double convection = 0.0;     ///< <C(a) v, v>
  double pressure_work = 0.0;  ///< <grad p, v>
  double kinetic_extra = 0.0;  ///< scheme-specific kinetic remainder
  double nd_split = 0.0;       ///< splitting schemes: the splitting defect on u^{n+1}
  /// dE/dt predicted by the law.
  double rhs() const;
};

LawTerms law_terms(const State& old_state, const State& new_state, const StepAux& aux, const ModelParams& p);

/// Energies of new_state plus the dissipation terms of the step.
EnergyBreakdown step_breakdown(const State& old_state, const State& new_state, const StepAux& aux,
                               const ModelParams& p);

/// |(E_tot^{n+1} - E_tot^n)/dt - RHS| of the law matching kind. Throws
/// std::invalid_argument if aux was produced by a different scheme or step.
double discrete_law_residual(SchemeKind kind, const State& old_state, const State& new_state, const StepAux& aux,
                             const ModelParams& p, double dt);

struct Conformation {
  SymTensorField c;
  double min_eigenvalue = 0.0;
};

/// c = sigma / B2(phi) + 1, with phi clamped to [eps, 1 - eps] for B2.
Conformation conformation_tensor(const State& s, const ModelParams& p);

/// Smaller eigenvalue of [[a, b], [b, d]].
double min_sym_eigenvalue(double a, double b, double d);

}  // namespace vpsim
