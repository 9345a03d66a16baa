#include "vpsim/grid_ops.hpp"

namespace vpsim {

StaggeredVectorField grad_cc(const CellField& w) {
  const GridSpec& g = w.grid();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  StaggeredVectorField v(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = w(i, j);
      v.ux(i, j) = (w(i + 1, j) - c) * ihx;
      v.uy(i, j) = (w(i, j + 1) - c) * ihy;
    }
  }
  return v;
}

CellField div_face(const StaggeredVectorField& v) {
  const GridSpec& g = v.grid();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  CellField d(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      d(i, j) = (v.ux(i, j) - v.ux(i - 1, j)) * ihx + (v.uy(i, j) - v.uy(i, j - 1)) * ihy;
    }
  }
  return d;
}

CellField laplacian_cc(const CellField& w) { return div_face(grad_cc(w)); }

CellField advect_conservative_upwind(const StaggeredVectorField& u, const CellField& w) {
  const GridSpec& g = w.grid();
  require_same_grid(g, u.grid());
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  FaceScalars flux(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double a = u.ux(i, j), b = u.uy(i, j);
      flux.ux(i, j) = a > 0.0 ? a * w(i, j) : (a < 0.0 ? a * w(i + 1, j) : 0.0);
      flux.uy(i, j) = b > 0.0 ? b * w(i, j) : (b < 0.0 ? b * w(i, j + 1) : 0.0);
    }
  }
  CellField r(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      r(i, j) = (flux.ux(i, j) - flux.ux(i - 1, j)) * ihx + (flux.uy(i, j) - flux.uy(i, j - 1)) * ihy;
    }
  }
  return r;
}

VelocityGradient grad_velocity_cc(const StaggeredVectorField& u) {
  const GridSpec& g = u.grid();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  // corner derivatives first, then average to cells
  CellField cy(g), cx(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      cy(i, j) = (u.ux(i, j + 1) - u.ux(i, j)) * ihy;
      cx(i, j) = (u.uy(i + 1, j) - u.uy(i, j)) * ihx;
    }
  }
  VelocityGradient r{CellField(g), corner_to_cell(cy), corner_to_cell(cx), CellField(g)};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      r.dux_dx(i, j) = (u.ux(i, j) - u.ux(i - 1, j)) * ihx;
      r.duy_dy(i, j) = (u.uy(i, j) - u.uy(i, j - 1)) * ihy;
    }
  }
  return r;
}

StaggeredVectorField div_tensor_to_faces(const SymTensorField& s) {
  const GridSpec& g = s.grid();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  const CellField c = cell_to_corner(s.xy);
  StaggeredVectorField v(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      v.ux(i, j) = (s.xx(i + 1, j) - s.xx(i, j)) * ihx + (c(i, j) - c(i, j - 1)) * ihy;
      v.uy(i, j) = (s.yy(i, j + 1) - s.yy(i, j)) * ihy + (c(i, j) - c(i - 1, j)) * ihx;
    }
  }
  return v;
}

double integrate(const CellField& w) {
  double s = 0.0;
  for (double x : w.values()) s += x;
  return s * w.grid().cell_area();
}

double cell_dot(const CellField& a, const CellField& b) {
  require_same_grid(a.grid(), b.grid());
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * a.grid().cell_area();
}

double face_dot(const StaggeredVectorField& a, const StaggeredVectorField& b) {
  require_same_grid(a.grid(), b.grid());
  double s = 0.0;
  for (std::size_t k = 0; k < a.ux.size(); ++k) s += a.ux[k] * b.ux[k] + a.uy[k] * b.uy[k];
  return s * a.grid().cell_area();
}

FaceScalars interp_cc_to_face(const CellField& w) {
  const GridSpec& g = w.grid();
  FaceScalars f(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      f.ux(i, j) = 0.5 * (w(i, j) + w(i + 1, j));
      f.uy(i, j) = 0.5 * (w(i, j) + w(i, j + 1));
    }
  }
  return f;
}

CellVector face_to_cell_average(const StaggeredVectorField& u) {
  const GridSpec& g = u.grid();
  CellVector r{CellField(g), CellField(g)};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      r.x(i, j) = 0.5 * (u.ux(i - 1, j) + u.ux(i, j));
      r.y(i, j) = 0.5 * (u.uy(i, j - 1) + u.uy(i, j));
    }
  }
  return r;
}

CellField cell_to_corner(const CellField& w) {
  const GridSpec& g = w.grid();
  CellField c(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      c(i, j) = 0.25 * (w(i, j) + w(i + 1, j) + w(i, j + 1) + w(i + 1, j + 1));
    }
  }
  return c;
}

CellField corner_to_cell(const CellField& c) {
  const GridSpec& g = c.grid();
  CellField w(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      w(i, j) = 0.25 * (c(i, j) + c(i - 1, j) + c(i, j - 1) + c(i - 1, j - 1));
    }
  }
  return w;
}

StrainRate strain_rate(const StaggeredVectorField& u) {
  const GridSpec& g = u.grid();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  StrainRate r{CellField(g), CellField(g), CellField(g)};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      r.dxx(i, j) = (u.ux(i, j) - u.ux(i - 1, j)) * ihx;
      r.dyy(i, j) = (u.uy(i, j) - u.uy(i, j - 1)) * ihy;
      r.dxy_corner(i, j) = 0.5 * ((u.ux(i, j + 1) - u.ux(i, j)) * ihy + (u.uy(i + 1, j) - u.uy(i, j)) * ihx);
    }
  }
  return r;
}

double stress_power(const SymTensorField& s, const StaggeredVectorField& u) {
  require_same_grid(s.grid(), u.grid());
  const VelocityGradient d = grad_velocity_cc(u);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.xx.size(); ++k) {
    acc += s.xx[k] * d.dux_dx[k] + s.xy[k] * (d.dux_dy[k] + d.duy_dx[k]) + s.yy[k] * d.duy_dy[k];
  }
  return acc * s.grid().cell_area();
}

}  // namespace vpsim
