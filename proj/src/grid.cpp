#include "vpsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vpsim {

GridSpec::GridSpec(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
  if (nx < 4 || ny < 4) {
    std::ostringstream os;
    os << "grid needs at least 4 cells per direction, got " << nx << "x" << ny;
    throw std::invalid_argument(os.str());
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw std::invalid_argument("grid edge lengths must be positive and finite");
  }
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (a != b) throw std::invalid_argument("fields live on different grids");
}

CellField::CellField(const GridSpec& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
  if (v_.size() != static_cast<std::size_t>(g.cells())) {
    throw std::invalid_argument("CellField: value count does not match grid");
  }
}

bool CellField::all_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double CellField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double CellField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double CellField::max() const { return *std::max_element(v_.begin(), v_.end()); }

CellField& CellField::operator+=(const CellField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

CellField& CellField::operator-=(const CellField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

CellField& CellField::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

CellField operator+(CellField a, const CellField& b) { return a += b; }
CellField operator-(CellField a, const CellField& b) { return a -= b; }
CellField operator*(double s, CellField a) { return a *= s; }
CellField operator*(CellField a, double s) { return a *= s; }

CellField hadamard(const CellField& a, const CellField& b) {
  require_same_grid(a.grid(), b.grid());
  CellField r(a.grid());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] * b[k];
  return r;
}

StaggeredVectorField::StaggeredVectorField(CellField x, CellField y) : ux(std::move(x)), uy(std::move(y)) {
  require_same_grid(ux.grid(), uy.grid());
}

double StaggeredVectorField::max_abs() const { return std::max(ux.max_abs(), uy.max_abs()); }

StaggeredVectorField& StaggeredVectorField::operator+=(const StaggeredVectorField& o) {
  ux += o.ux;
  uy += o.uy;
  return *this;
}

StaggeredVectorField& StaggeredVectorField::operator-=(const StaggeredVectorField& o) {
  ux -= o.ux;
  uy -= o.uy;
  return *this;
}

StaggeredVectorField& StaggeredVectorField::operator*=(double s) {
  ux *= s;
  uy *= s;
  return *this;
}

std::vector<double> StaggeredVectorField::flat() const {
  std::vector<double> x(ux.data());
  x.insert(x.end(), uy.data().begin(), uy.data().end());
  return x;
}

StaggeredVectorField StaggeredVectorField::from_flat(const GridSpec& g, std::span<const double> x) {
  const auto n = static_cast<std::size_t>(g.cells());
  if (x.size() != 2 * n) throw std::invalid_argument("from_flat: expected 2*cells entries");
  return {CellField(g, std::vector<double>(x.begin(), x.begin() + n)),
          CellField(g, std::vector<double>(x.begin() + n, x.end()))};
}

StaggeredVectorField operator+(StaggeredVectorField a, const StaggeredVectorField& b) { return a += b; }
StaggeredVectorField operator-(StaggeredVectorField a, const StaggeredVectorField& b) { return a -= b; }
StaggeredVectorField operator*(double s, StaggeredVectorField a) { return a *= s; }

SymTensorField::SymTensorField(CellField a, CellField b, CellField c)
    : xx(std::move(a)), xy(std::move(b)), yy(std::move(c)) {
  require_same_grid(xx.grid(), xy.grid());
  require_same_grid(xx.grid(), yy.grid());
}

double SymTensorField::max_abs() const { return std::max({xx.max_abs(), xy.max_abs(), yy.max_abs()}); }

SymTensorField& SymTensorField::operator+=(const SymTensorField& o) {
  xx += o.xx;
  xy += o.xy;
  yy += o.yy;
  return *this;
}

SymTensorField& SymTensorField::operator-=(const SymTensorField& o) {
  xx -= o.xx;
  xy -= o.xy;
  yy -= o.yy;
  return *this;
}

SymTensorField& SymTensorField::operator*=(double s) {
  xx *= s;
  xy *= s;
  yy *= s;
  return *this;
}

SymTensorField SymTensorField::isotropic(const CellField& b) { return {b, CellField(b.grid()), b}; }

SymTensorField operator+(SymTensorField a, const SymTensorField& b) { return a += b; }
SymTensorField operator-(SymTensorField a, const SymTensorField& b) { return a -= b; }
SymTensorField operator*(double s, SymTensorField a) { return a *= s; }

double l2_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double l2_norm(const CellField& f) { return l2_norm(f.values()); }

double l2_norm(const StaggeredVectorField& f) {
  const double a = l2_norm(f.ux), b = l2_norm(f.uy);
  return std::sqrt(a * a + b * b);
}

double l2_norm(const SymTensorField& f) {
  const double a = l2_norm(f.xx), b = l2_norm(f.xy), c = l2_norm(f.yy);
  return std::sqrt(a * a + 2.0 * b * b + c * c);
}

}  // namespace vpsim
