/// @file grid_ops.hpp
/// @brief Discrete differential and interpolation operators on the periodic
/// MAC grid, evaluated directly on fields.
///
/// Conventions follow grid.hpp. Face scalars (one value per x-face and one
/// per y-face) reuse StaggeredVectorField: ux holds x-face values, uy holds
/// y-face values. Corner scalars reuse CellField with corner (i,j) at the
/// top-right corner of cell (i,j).

#pragma once

#include "vpsim/grid.hpp"

namespace vpsim {

using FaceScalars = StaggeredVectorField;

/// Face gradient of a cell field.
StaggeredVectorField grad_cc(const CellField& w);
/// Cell divergence of a face field; the negative adjoint of grad_cc.
CellField div_face(const StaggeredVectorField& v);
/// 5-point Laplacian, literally div_face(grad_cc(w)).
CellField laplacian_cc(const CellField& w);

/// Donor-cell approximation of div(u w).
CellField advect_conservative_upwind(const StaggeredVectorField& u, const CellField& w);

struct VelocityGradient {
  CellField dux_dx, dux_dy, duy_dx, duy_dy;
};
/// Cell-centered velocity gradient. Normal derivatives difference the two
/// faces of a cell; cross derivatives average the four surrounding corner
/// differences.
VelocityGradient grad_velocity_cc(const StaggeredVectorField& u);

/// Face divergence of a symmetric tensor; sxy is averaged to corners.
/// Exact negative adjoint of grad_velocity_cc in the pairing sigma : grad u.
StaggeredVectorField div_tensor_to_faces(const SymTensorField& s);

/// hx*hy*sum(w).
double integrate(const CellField& w);
/// hx*hy*sum(a*b).
double cell_dot(const CellField& a, const CellField& b);
/// hx*hy*sum over all faces of a.b.
double face_dot(const StaggeredVectorField& a, const StaggeredVectorField& b);

/// Arithmetic mean of the two cells adjacent to each face.
FaceScalars interp_cc_to_face(const CellField& w);
/// Average of the two faces bounding each cell, per component.
struct CellVector {
  CellField x, y;
};
CellVector face_to_cell_average(const StaggeredVectorField& u);

/// Average of the four cells around each corner.
CellField cell_to_corner(const CellField& w);
/// Average of the four corners of each cell.
CellField corner_to_cell(const CellField& c);

/// Symmetric strain rate components: Dxx, Dyy at cells, Dxy at corners.
struct StrainRate {
  CellField dxx, dyy, dxy_corner;
};
StrainRate strain_rate(const StaggeredVectorField& u);

/// integral of sigma : grad u with the grad_velocity_cc stencils.
double stress_power(const SymTensorField& s, const StaggeredVectorField& u);

}  // namespace vpsim
