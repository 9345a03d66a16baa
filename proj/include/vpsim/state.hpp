/// @file state.hpp
/// @brief Solution bundle, scheme selection and the per-step auxiliary record
/// used for discrete energy-law verification.

#pragma once

#include <optional>
#include <string>

#include "vpsim/grid.hpp"
#include "vpsim/krylov.hpp"

namespace vpsim {

/// Previous time level kept for the two-step schemes.
struct PrevLevel {
  CellField phi;
  StaggeredVectorField u;
  SymTensorField sigma;
};

/// Full solution (phi, q, sigma, u, p). The simplified model uses the same
/// container with sigma, u and p left at zero.
struct State {
  CellField phi;
  CellField q;
  SymTensorField sigma;
  StaggeredVectorField u;
  CellField p;
  std::optional<PrevLevel> prev;
  double t = 0.0;
  long step = 0;

  State() = default;
  explicit State(const GridSpec& g) : phi(g), q(g), sigma(g), u(g), p(g) {}
  const GridSpec& grid() const { return phi.grid(); }
  bool all_finite() const;
};

using SimplifiedState = State;
using FullState = State;

enum class SchemeKind {
  SimplifiedO1,
  SimplifiedO2,
  Coupled,
  CoupledCN,
  Coupled2nd,
  CoupledImplicitStress,
  SplittingMonolithic,
  SplittingChorin,
  SplittingImplicitFixpoint,
};

SchemeKind parse_scheme(const std::string& name);
std::string to_string(SchemeKind k);
bool is_full_model(SchemeKind k);

struct FixpointConfig {
  double delta = 1e-8;
  int max_l = 50;
};

struct StepOptions {
  /// Tolerance, iteration cap and Jacobi toggle shared by every solve. The
  /// method applies to the nonsymmetric non-saddle systems; saddle systems
  /// use GMRES and pressure Poisson solves use CG.
  SolverConfig solver{};
  FixpointConfig fixpoint{};
  /// Remove the solver-tolerance drift of the phi mean after each solve.
  bool conserve_mass = true;
};

/// Thrown when the fixpoint iteration does not meet its stop rule.
class FixpointError : public std::runtime_error {
 public:
  FixpointError(const std::string& what, double last_change)
      : std::runtime_error(what), last_change_(last_change) {}
  double last_change() const { return last_change_; }

 private:
  double last_change_;
};

/// Everything needed to re-evaluate the matching discrete energy law. Field
/// roles, not time levels, are recorded so one evaluator serves all schemes.
struct StepAux {
  SchemeKind scheme = SchemeKind::SimplifiedO1;
  double dt = 0.0;

  // phase-field / bulk-stress part
  CellField mu;         ///< mu^{n+1/2}
  CellField q_half;     ///< q^{n+1/2}
  CellField f_eff;      ///< linearized f incl. the -c_mu Lap(phi^{n+1/2}) term
  CellField inv_tau_b;  ///< 1/tau_b used in the relaxation term
  StaggeredVectorField flux;  ///< bracket k grad mu - grad(A1 q^{n+1/2}) on faces
  std::optional<StaggeredVectorField> q_velocity;  ///< upwind q advection velocity

  // full model only
  StaggeredVectorField v_mom;          ///< velocity tested in the momentum equation
  StaggeredVectorField conv_velocity;  ///< advecting velocity of the convection term
  CellField eta;                       ///< cell viscosity of the viscous operator
  SymTensorField sigma_mom;            ///< stress in the momentum force
  SymTensorField sigma_L;              ///< stress multiplying grad u in the stress equation
  SymTensorField sigma_relax;          ///< stress in the relaxation term
  StaggeredVectorField v_stress;       ///< velocity in the stress equation
  CellField inv_tau_s;
  CellField b2;
  StaggeredVectorField pressure_grad;      ///< grad p as used in the momentum equation
  StaggeredVectorField pressure_velocity;  ///< velocity paired with grad p
  std::optional<StaggeredVectorField> u_star;
  std::optional<StaggeredVectorField> u_dagger;

  int fixpoint_iterations = 0;
  int linear_iterations = 0;
};

struct StepResult {
  State state;
  StepAux aux;
};

}  // namespace vpsim
