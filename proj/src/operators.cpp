#include "vpsim/operators.hpp"

#include <memory>
#include <utility>

#include "vpsim/grid_ops.hpp"

namespace vpsim::ops {

namespace {

// Upwind weight pair: flux a * (a > 0 ? w_minus : w_plus); zero on a == 0.
void push_flux(std::vector<Triplet>& t, int row, double sign, double a, int minus, int plus) {
  if (a > 0.0) t.push_back({row, minus, sign * a});
  else if (a < 0.0) t.push_back({row, plus, sign * a});
}

}  // namespace

SparseMatrix gradient(const GridSpec& g) {
  const int n = g.cells();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  std::vector<Triplet> t;
  t.reserve(4 * static_cast<std::size_t>(n));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.index(i, j);
      t.push_back({c, g.index(i + 1, j), ihx});
      t.push_back({c, c, -ihx});
      t.push_back({n + c, g.index(i, j + 1), ihy});
      t.push_back({n + c, c, -ihy});
    }
  }
  return SparseMatrix::from_triplets(2 * n, n, t);
}

SparseMatrix divergence(const GridSpec& g) { return scaled(gradient(g).transpose(), -1.0); }

SparseMatrix laplacian(const GridSpec& g) { return multiply(divergence(g), gradient(g)); }

SparseMatrix face_interp(const GridSpec& g) {
  const int n = g.cells();
  std::vector<Triplet> t;
  t.reserve(4 * static_cast<std::size_t>(n));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.index(i, j);
      t.push_back({c, c, 0.5});
      t.push_back({c, g.index(i + 1, j), 0.5});
      t.push_back({n + c, c, 0.5});
      t.push_back({n + c, g.index(i, j + 1), 0.5});
    }
  }
  return SparseMatrix::from_triplets(2 * n, n, t);
}

SparseMatrix upwind_advection(const StaggeredVectorField& u) {
  const GridSpec& g = u.grid();
  const int n = g.cells();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  std::vector<Triplet> t;
  t.reserve(4 * static_cast<std::size_t>(n));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.index(i, j);
      push_flux(t, c, ihx, u.ux(i, j), c, g.index(i + 1, j));
      push_flux(t, c, -ihx, u.ux(i - 1, j), g.index(i - 1, j), c);
      push_flux(t, c, ihy, u.uy(i, j), c, g.index(i, j + 1));
      push_flux(t, c, -ihy, u.uy(i, j - 1), g.index(i, j - 1), c);
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

SparseMatrix strain_xx(const GridSpec& g) {
  const int n = g.cells();
  const double ihx = 1.0 / g.hx();
  std::vector<Triplet> t;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.index(i, j);
      t.push_back({c, c, ihx});
      t.push_back({c, g.index(i - 1, j), -ihx});
    }
  }
  return SparseMatrix::from_triplets(n, 2 * n, t);
}

SparseMatrix strain_yy(const GridSpec& g) {
  const int n = g.cells();
  const double ihy = 1.0 / g.hy();
  std::vector<Triplet> t;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.index(i, j);
      t.push_back({c, n + c, ihy});
      t.push_back({c, n + g.index(i, j - 1), -ihy});
    }
  }
  return SparseMatrix::from_triplets(n, 2 * n, t);
}

SparseMatrix strain_xy(const GridSpec& g) {
  const int n = g.cells();
  const double hy2 = 0.5 / g.hy(), hx2 = 0.5 / g.hx();
  std::vector<Triplet> t;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.index(i, j);
      t.push_back({c, g.index(i, j + 1), hy2});
      t.push_back({c, c, -hy2});
      t.push_back({c, n + g.index(i + 1, j), hx2});
      t.push_back({c, n + c, -hx2});
    }
  }
  return SparseMatrix::from_triplets(n, 2 * n, t);
}

SparseMatrix viscous(const CellField& eta) {
  const GridSpec& g = eta.grid();
  const CellField eta_c = cell_to_corner(eta);
  std::vector<double> two_eta(eta.data()), four_eta_c(eta_c.data());
  for (double& v : two_eta) v *= 2.0;
  for (double& v : four_eta_c) v *= 4.0;
  const GridOperators& o = grid_operators(g);
  SparseMatrix v = multiply(o.sxx_t, scale_rows(two_eta, o.sxx));
  v = add(v, multiply(o.syy_t, scale_rows(two_eta, o.syy)));
  v = add(v, multiply(o.sxy_t, scale_rows(four_eta_c, o.sxy)));
  return v;
}

SparseMatrix convection(const StaggeredVectorField& a) {
  const GridSpec& g = a.grid();
  const int n = g.cells();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  std::vector<Triplet> t;
  t.reserve(8 * static_cast<std::size_t>(n));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.index(i, j);
      // x-momentum dual cell centered on x-face (i,j)
      {
        const double ue = 0.5 * (a.ux(i, j) + a.ux(i + 1, j));
        const double uw = 0.5 * (a.ux(i - 1, j) + a.ux(i, j));
        const double vn = 0.5 * (a.uy(i, j) + a.uy(i + 1, j));
        const double vs = 0.5 * (a.uy(i, j - 1) + a.uy(i + 1, j - 1));
        push_flux(t, c, ihx, ue, c, g.index(i + 1, j));
        push_flux(t, c, -ihx, uw, g.index(i - 1, j), c);
        push_flux(t, c, ihy, vn, c, g.index(i, j + 1));
        push_flux(t, c, -ihy, vs, g.index(i, j - 1), c);
      }
      // y-momentum dual cell centered on y-face (i,j)
      {
        const double vn = 0.5 * (a.uy(i, j) + a.uy(i, j + 1));
        const double vs = 0.5 * (a.uy(i, j - 1) + a.uy(i, j));
        const double ue = 0.5 * (a.ux(i, j) + a.ux(i, j + 1));
        const double uw = 0.5 * (a.ux(i - 1, j) + a.ux(i - 1, j + 1));
        const int r = n + c;
        push_flux(t, r, ihy, vn, r, n + g.index(i, j + 1));
        push_flux(t, r, -ihy, vs, n + g.index(i, j - 1), r);
        push_flux(t, r, ihx, ue, r, n + g.index(i + 1, j));
        push_flux(t, r, -ihx, uw, n + g.index(i - 1, j), r);
      }
    }
  }
  return SparseMatrix::from_triplets(2 * n, 2 * n, t);
}

SparseMatrix korteweg(const CellField& phi) {
  const GridSpec& g = phi.grid();
  const std::vector<double> gp = grad_cc(phi).flat();
  return scale_rows(gp, face_interp(g));
}

SparseMatrix solenoidal_basis(const GridSpec& g) {
  const int n = g.cells();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  // column of corner psi(c) is c-1 (corner 0 is dropped); then the two means
  auto col = [](int c) { return c - 1; };
  std::vector<Triplet> t;
  t.reserve(4 * static_cast<std::size_t>(n) + 2 * static_cast<std::size_t>(n));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int f = g.index(i, j);
      const int c = g.index(i, j), cs = g.index(i, j - 1), cw = g.index(i - 1, j);
      // ux = (psi(i,j) - psi(i,j-1))/hy, uy = -(psi(i,j) - psi(i-1,j))/hx
      if (c != 0) t.push_back({f, col(c), ihy});
      if (cs != 0) t.push_back({f, col(cs), -ihy});
      if (c != 0) t.push_back({n + f, col(c), -ihx});
      if (cw != 0) t.push_back({n + f, col(cw), ihx});
      t.push_back({f, n - 1, 1.0});
      t.push_back({n + f, n, 1.0});
    }
  }
  return SparseMatrix::from_triplets(2 * n, n + 1, t);
}

const GridOperators& grid_operators(const GridSpec& g) {
  thread_local std::vector<std::pair<GridSpec, std::unique_ptr<GridOperators>>> cache;
  for (const auto& [key, ops] : cache) {
    if (key == g) return *ops;
  }
  auto o = std::make_unique<GridOperators>();
  o->G = gradient(g);
  o->D = divergence(g);
  o->L = multiply(o->D, o->G);
  o->sxx = strain_xx(g);
  o->syy = strain_yy(g);
  o->sxy = strain_xy(g);
  o->sxx_t = o->sxx.transpose();
  o->syy_t = o->syy.transpose();
  o->sxy_t = o->sxy.transpose();
  o->Q = solenoidal_basis(g);
  o->Qt = o->Q.transpose();
  // a handful of grids per thread at most (tests, EOC); drop the oldest
  if (cache.size() >= 8) cache.erase(cache.begin());
  cache.emplace_back(g, std::move(o));
  return *cache.back().second;
}

}  // namespace vpsim::ops
