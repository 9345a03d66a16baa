/// @file schemes.hpp
/// @brief Time steppers for the simplified (phi, q) model and the full
/// phase-field / Oldroyd-B / Navier-Stokes model.
///
/// Every stepper is a pure transition: it takes the state at t^n and returns
/// the state at t^{n+1} together with the StepAux record needed to evaluate
/// the matching discrete energy law (energy.hpp).

#pragma once

#include "vpsim/materials.hpp"
#include "vpsim/state.hpp"

namespace vpsim {

// simplified model

/// One-step first-order linear scheme; one 2N x 2N solve.
StepResult step_o1(const State& s, const ModelParams& p, double dt, const StepOptions& opt = {});
/// Two-step second-order scheme; coefficients at (3 phi^n - phi^{n-1})/2.
/// Without s.prev it reproduces step_o1 bitwise.
StepResult step_o2(const State& s, const ModelParams& p, double dt, const StepOptions& opt = {});

// full model, fully coupled

/// Monolithic (phi, q, u^{n+1}, p) solve, then explicit stress update.
StepResult step_coupled(const State& s, const ModelParams& p, double dt, const StepOptions& opt = {});
/// Same with half-step velocity unknowns u^{n+1/2}; u^{n+1} = 2u^{n+1/2} - u^n.
StepResult step_coupled_cn(const State& s, const ModelParams& p, double dt, const StepOptions& opt = {});
/// step_coupled_cn with explicit fields extrapolated to n-1/2.
StepResult step_coupled_o2(const State& s, const ModelParams& p, double dt, const StepOptions& opt = {});
/// Implicit stress variant linearized by a fixpoint iteration between the
/// coupled solve and per-cell stress solves. Throws FixpointError.
StepResult step_coupled_implicit_stress(const State& s, const ModelParams& p, double dt,
                                        const StepOptions& opt = {});

// full model, splitting

enum class SplittingMode { MonolithicStokes, Chorin };

/// Step 1: (phi, q) with u* = u^n - dt phi^n grad mu. Step 2: Stokes-type
/// solve for (u, p), monolithic or by Chorin projection. Step 3: explicit stress.
StepResult step_splitting(const State& s, const ModelParams& p, double dt, SplittingMode mode,
                          const StepOptions& opt = {});
/// Step 1 as step_splitting, then fixpoint between the fluid solve and
/// implicit per-cell stress solves. Throws FixpointError.
StepResult step_splitting_implicit(const State& s, const ModelParams& p, double dt, const StepOptions& opt = {},
                                   SplittingMode mode = SplittingMode::MonolithicStokes);

/// Dispatch by scheme kind.
StepResult advance(SchemeKind kind, const State& s, const ModelParams& p, double dt, const StepOptions& opt = {});

}  // namespace vpsim
