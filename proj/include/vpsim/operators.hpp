/// @file operators.hpp
/// @brief Sparse-matrix forms of the grid operators, used to assemble the
/// implicit systems. Unknown vectors are laid out as
///   cells:  [c_0 .. c_{N-1}]            (N = nx*ny, index j*nx+i)
///   faces:  [x-faces (N); y-faces (N)]  (StaggeredVectorField::flat order)
/// Each matrix reproduces its field counterpart in grid_ops.hpp to round-off.

#pragma once

#include "vpsim/grid.hpp"
#include "vpsim/sparse.hpp"

namespace vpsim::ops {

/// 2N x N face gradient.
SparseMatrix gradient(const GridSpec& g);
/// N x 2N face divergence (= -gradient^T).
SparseMatrix divergence(const GridSpec& g);
/// N x N 5-point Laplacian (divergence * gradient).
SparseMatrix laplacian(const GridSpec& g);
/// 2N x N cell-to-face arithmetic average.
SparseMatrix face_interp(const GridSpec& g);

/// N x N donor-cell matrix of w -> div(u w).
SparseMatrix upwind_advection(const StaggeredVectorField& u);

/// N x 2N: Dxx, Dyy at cells; N x 2N: Dxy at corners.
SparseMatrix strain_xx(const GridSpec& g);
SparseMatrix strain_yy(const GridSpec& g);
SparseMatrix strain_xy(const GridSpec& g);

/// 2N x 2N discretization of -div(eta (grad u + grad u^T)) built as
/// Sxx^T 2eta Sxx + Syy^T 2eta Syy + Sxy^T 4eta_c Sxy, with eta_c the corner
/// average of the cell viscosity. Symmetric positive semidefinite.
SparseMatrix viscous(const CellField& eta);

/// 2N x 2N conservative donor-cell discretization of (a . grad) v on the MAC
/// dual cells; the advecting velocity a is averaged to dual-cell faces.
SparseMatrix convection(const StaggeredVectorField& a);

/// 2N x N capillary coupling T: (T mu)_f = (grad phi)_f * avg(mu)_f.
/// T^T v is the centered approximation of v . grad phi at cells.
SparseMatrix korteweg(const CellField& phi);

/// 2N x (N+1) basis of the discretely divergence-free face fields: the
/// curl of a corner stream function (corner 0 pinned to zero) followed by
/// the two uniform modes. divergence(g) * solenoidal_basis(g) = 0.
SparseMatrix solenoidal_basis(const GridSpec& g);

/// The grid-only matrices above, built once per grid and thread.
struct GridOperators {
  SparseMatrix G, D, L;
  SparseMatrix sxx, syy, sxy, sxx_t, syy_t, sxy_t;
  SparseMatrix Q, Qt;
};
const GridOperators& grid_operators(const GridSpec& g);

}  // namespace vpsim::ops
