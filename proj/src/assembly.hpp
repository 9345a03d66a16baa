// Shared assembly pieces of the simplified and full schemes (internal).
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vpsim/grid.hpp"
#include "vpsim/krylov.hpp"
#include "vpsim/materials.hpp"
#include "vpsim/sparse.hpp"
#include "vpsim/state.hpp"

namespace vpsim::detail {

struct PhaseInputs {
  const CellField* phi_n = nullptr;
  const CellField* q_n = nullptr;
  CellField phi_coef;  ///< level of the frozen coefficients (phi^n or the extrapolation)
  const ModelParams* params = nullptr;
  double dt = 0.0;
  std::optional<StaggeredVectorField> q_velocity;  ///< upwind q advection
  /// Splitting scheme: u^n of u* = u^n - dt phi_f grad mu.
  std::optional<StaggeredVectorField> split_velocity;
};

/// Blocks of the (phi, q) rows after eliminating mu:
///   [Pff Pfq] [phi]   [rf]
///   [Pqf Pqq] [q  ] = [rq]
struct PhaseSystem {
  GridSpec grid;
  SparseMatrix G, D, L;
  SparseMatrix Amu;          ///< mu = Amu phi_new + bmu
  std::vector<double> bmu;
  std::vector<double> a, b;  ///< f(phi_new, phi_n) = a phi_new + b
  double c_mu = 0.0;
  std::vector<double> k_face;  ///< face mobility factor
  CellField A1, inv_tau_b;
  std::vector<double> phi_face;  ///< splitting only: face average of phi^n
  SparseMatrix Pff, Pfq, Pqf, Pqq;
  std::vector<double> rf, rq;
};

PhaseSystem build_phase(const PhaseInputs& in);

/// Fills mu, q_half, f_eff, inv_tau_b, flux and q_velocity of aux.
void fill_phase_aux(const PhaseSystem& sys, const PhaseInputs& in, const CellField& phi_new,
                    const CellField& q_new, StepAux& aux);

/// mu from the solved phi (same affine map as the assembly).
CellField chemical_potential(const PhaseSystem& sys, const CellField& phi_n, const CellField& phi_new);

/// Solves A x = b as an increment from x_old so the tolerance acts on the
/// change, not the full state. Adds the iteration count to *iters.
std::vector<double> solve_increment(const SparseMatrix& a, std::span<const double> b,
                                    std::span<const double> x_old, const SolverConfig& cfg, int* iters);

/// Shifts phi_new so its sum matches phi_old exactly.
void restore_mass(const CellField& phi_old, CellField& phi_new);

/// 1/(c0 * max(phi^2, eps^2)) per cell.
CellField inverse_relaxation(const CellField& phi, double c0, double eps);

/// Extrapolation (3 z^n - z^{n-1})/2; returns z^n itself when no previous level.
CellField extrapolate(const CellField& zn, const CellField* zprev);
StaggeredVectorField extrapolate(const StaggeredVectorField& zn, const StaggeredVectorField* zprev);
SymTensorField extrapolate(const SymTensorField& zn, const SymTensorField* zprev);

CellField half_level(const CellField& a, const CellField& b);

/// sigma_n + dt [ -div(v_adv s_hat) + L s_hat + s_hat L^T - inv_tau_s s_hat + b2 2D(v_L) ],
/// L = grad v_L.
SymTensorField explicit_stress(const SymTensorField& sigma_n, const SymTensorField& s_hat,
                               const StaggeredVectorField& v_adv, const StaggeredVectorField& v_L,
                               const CellField& inv_tau_s, const CellField& b2, double dt);

/// Per-cell implicit solve of
///   (s - sigma_n)/dt + div(v s_lag) - (L s + s L^T) + inv_tau_s s - b2 2D(v) = 0
/// for s, with the advection lagged at s_lag.
SymTensorField implicit_stress(const SymTensorField& sigma_n, const SymTensorField& s_lag,
                               const StaggeredVectorField& v, const CellField& inv_tau_s, const CellField& b2,
                               double dt);

/// Closed-form solution of the 3x3 per-cell system used by implicit_stress.
/// Returns (xx, xy, yy).
std::array<double, 3> solve_stress_cell(double c, double lxx, double lxy, double lyx, double lyy,
                                        const std::array<double, 3>& rhs);

/// ||a-b|| / ||b||; 0 when a == b (also for b = 0), +inf when only b = 0.
double relative_change(std::span<const double> a, std::span<const double> b);

SolverConfig with_method(const SolverConfig& base, SolverMethod m);

}  // namespace vpsim::detail
