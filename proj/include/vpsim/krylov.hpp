/// @file krylov.hpp
/// @brief Iterative solvers for the sparse systems produced by the schemes.
///
/// All solvers are single threaded with a fixed reduction order, so equal
/// inputs give bitwise-equal iterates.

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpsim/sparse.hpp"

namespace vpsim {

enum class SolverMethod {
  BiCGStab,  ///< stabilized bi-conjugate gradients (nonsymmetric)
  GMRES,     ///< restarted GMRES, right preconditioned (nonsymmetric, saddle points)
  CG,        ///< conjugate gradients for symmetric positive (semi)definite systems
};

struct SolverConfig {
  double rel_tol = 1e-8;
  int max_iter = 5000;
  SolverMethod method = SolverMethod::BiCGStab;
  bool jacobi = true;
  int gmres_restart = 100;
  /// CG only: the matrix has the constant vector as its nullspace; b and the
  /// iterates are projected onto zero-mean vectors.
  bool zero_mean_nullspace = false;

  void validate() const;
};

SolverMethod parse_solver_method(const std::string& name);
std::string to_string(SolverMethod m);

struct SolveResult {
  std::vector<double> x;
  double residual = 0.0;           ///< ||b - A x||_2, recomputed from x
  double relative_residual = 0.0;  ///< residual / ||b||_2 (0 when b = 0)
  int iterations = 0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double achieved_relative_residual, int iterations)
      : std::runtime_error(what), achieved_(achieved_relative_residual), iterations_(iterations) {}
  double achieved_residual() const { return achieved_; }
  int iterations() const { return iterations_; }

 private:
  double achieved_;
  int iterations_;
};

/// Solves A x = b starting from x0 (empty x0 means zero). Throws SolverError
/// when ||b - A x|| <= rel_tol ||b|| is not reached within max_iter.
SolveResult solve(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0,
                  const SolverConfig& cfg);

}  // namespace vpsim
