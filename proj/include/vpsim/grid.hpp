/// @file grid.hpp
/// @brief Periodic MAC grid description and the field containers living on it.
///
/// Layout (cell (i,j) spans [i*hx,(i+1)*hx] x [j*hy,(j+1)*hy]):
///   - cell-centered scalars at ((i+1/2)hx, (j+1/2)hy)
///   - ux(i,j) on the vertical face between cells (i,j) and (i+1,j)
///   - uy(i,j) on the horizontal face between cells (i,j) and (i,j+1)
///   - corner values (i,j) at the top-right corner ((i+1)hx, (j+1)hy)
/// Every array has nx*ny entries; periodic wrap gives one face per cell per
/// direction. Linear storage is row-major: index = j*nx + i.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace vpsim {

struct GridSpec {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;

  GridSpec() = default;
  GridSpec(int nx_, int ny_, double lx_, double ly_);

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  int cells() const { return nx * ny; }

  int wrap_i(int i) const { return ((i % nx) + nx) % nx; }
  int wrap_j(int j) const { return ((j % ny) + ny) % ny; }
  /// Linear index with periodic wrap in both directions.
  int index(int i, int j) const { return wrap_j(j) * nx + wrap_i(i); }

  double xc(int i) const { return (i + 0.5) * hx(); }
  double yc(int j) const { return (j + 0.5) * hy(); }
  double xf(int i) const { return (i + 1) * hx(); }
  double yf(int j) const { return (j + 1) * hy(); }

  bool operator==(const GridSpec& o) const {
    return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

void require_same_grid(const GridSpec& a, const GridSpec& b);

/// Scalar values on one nx*ny lattice (cell centers, faces of one
/// orientation, or corners; the meaning is fixed by the owner).
class CellField {
 public:
  CellField() = default;
  explicit CellField(const GridSpec& g, double value = 0.0)
      : grid_(g), v_(static_cast<std::size_t>(g.cells()), value) {}
  CellField(const GridSpec& g, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t k) { return v_[k]; }
  double operator[](std::size_t k) const { return v_[k]; }
  double& operator()(int i, int j) { return v_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return v_[grid_.index(i, j)]; }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  bool all_finite() const;
  double max_abs() const;
  double min() const;
  double max() const;

  CellField& operator+=(const CellField& o);
  CellField& operator-=(const CellField& o);
  CellField& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<double> v_;
};

CellField operator+(CellField a, const CellField& b);
CellField operator-(CellField a, const CellField& b);
CellField operator*(double s, CellField a);
CellField operator*(CellField a, double s);
/// Pointwise product.
CellField hadamard(const CellField& a, const CellField& b);

/// Velocity on the MAC layout.
struct StaggeredVectorField {
  CellField ux;
  CellField uy;

  StaggeredVectorField() = default;
  explicit StaggeredVectorField(const GridSpec& g, double vx = 0.0, double vy = 0.0)
      : ux(g, vx), uy(g, vy) {}
  StaggeredVectorField(CellField x, CellField y);

  const GridSpec& grid() const { return ux.grid(); }
  bool all_finite() const { return ux.all_finite() && uy.all_finite(); }
  double max_abs() const;

  StaggeredVectorField& operator+=(const StaggeredVectorField& o);
  StaggeredVectorField& operator-=(const StaggeredVectorField& o);
  StaggeredVectorField& operator*=(double s);

  /// [ux; uy] as one vector of length 2*cells.
  std::vector<double> flat() const;
  static StaggeredVectorField from_flat(const GridSpec& g, std::span<const double> x);
};

StaggeredVectorField operator+(StaggeredVectorField a, const StaggeredVectorField& b);
StaggeredVectorField operator-(StaggeredVectorField a, const StaggeredVectorField& b);
StaggeredVectorField operator*(double s, StaggeredVectorField a);

/// Symmetric 2x2 tensor at cell centers; symmetry by single xy storage.
struct SymTensorField {
  CellField xx;
  CellField xy;
  CellField yy;

  SymTensorField() = default;
  explicit SymTensorField(const GridSpec& g) : xx(g), xy(g), yy(g) {}
  SymTensorField(CellField a, CellField b, CellField c);

  const GridSpec& grid() const { return xx.grid(); }
  bool all_finite() const { return xx.all_finite() && xy.all_finite() && yy.all_finite(); }
  double max_abs() const;
  CellField trace() const { return xx + yy; }

  SymTensorField& operator+=(const SymTensorField& o);
  SymTensorField& operator-=(const SymTensorField& o);
  SymTensorField& operator*=(double s);

  /// B * identity.
  static SymTensorField isotropic(const CellField& b);
};

SymTensorField operator+(SymTensorField a, const SymTensorField& b);
SymTensorField operator-(SymTensorField a, const SymTensorField& b);
SymTensorField operator*(double s, SymTensorField a);

/// Euclidean norm of the linear storage (no area weights).
double l2_norm(std::span<const double> x);
double l2_norm(const CellField& f);
double l2_norm(const StaggeredVectorField& f);
double l2_norm(const SymTensorField& f);

}  // namespace vpsim
