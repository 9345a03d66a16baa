#include "vpsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vpsim {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void scalars(std::ostream& os, const char* name, const CellField& f) {
  os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < f.size(); ++k) os << num(f[k]) << '\n';
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

}  // namespace

std::array<CellField, 2> cell_velocity(const StaggeredVectorField& u) {
  const GridSpec& g = u.grid();
  CellField vx(g), vy(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      vx(i, j) = 0.5 * (u.ux(i - 1, j) + u.ux(i, j));
      vy(i, j) = 0.5 * (u.uy(i, j - 1) + u.uy(i, j));
    }
  }
  return {std::move(vx), std::move(vy)};
}

void write_snapshot(const State& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(path, "cannot open for writing");
  const GridSpec& g = s.grid();
  os << "# vtk DataFile Version 3.0\n"
     << "vpsim step " << s.step << " time " << num(s.t) << "\n"
     << "ASCII\nDATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << g.nx + 1 << ' ' << g.ny + 1 << " 1\n"
     << "ORIGIN 0 0 0\n"
     << "SPACING " << num(g.hx()) << ' ' << num(g.hy()) << " 1\n"
     << "CELL_DATA " << g.cells() << '\n';
  scalars(os, "phi", s.phi);
  scalars(os, "q", s.q);
  scalars(os, "sigma_xx", s.sigma.xx);
  scalars(os, "sigma_xy", s.sigma.xy);
  scalars(os, "sigma_yy", s.sigma.yy);
  scalars(os, "pressure", s.p);
  const auto v = cell_velocity(s.u);
  os << "VECTORS velocity double\n";
  for (std::size_t k = 0; k < v[0].size(); ++k) os << num(v[0][k]) << ' ' << num(v[1][k]) << " 0\n";
  os.flush();
  if (!os) fail(path, "write failed");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(path, "cannot open for reading");
  Snapshot snap;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# vtk DataFile", 0) != 0) fail(path, "not a legacy VTK file");
  std::getline(is, snap.title);
  std::string tok;
  long cells = -1;
  while (is >> tok) {
    if (tok == "ASCII" || tok == "DATASET" || tok == "STRUCTURED_POINTS") continue;
    if (tok == "DIMENSIONS") {
      int nz = 0;
      is >> snap.nx >> snap.ny >> nz;
      snap.nx -= 1;
      snap.ny -= 1;
    } else if (tok == "ORIGIN") {
      double o[3];
      is >> o[0] >> o[1] >> o[2];
    } else if (tok == "SPACING") {
      double hz = 0.0;
      is >> snap.hx >> snap.hy >> hz;
    } else if (tok == "CELL_DATA") {
      is >> cells;
    } else if (tok == "SCALARS") {
      std::string name, type, lt, table;
      int comps = 0;
      is >> name >> type >> comps >> lt >> table;
      if (cells < 0 || comps != 1 || lt != "LOOKUP_TABLE") fail(path, "malformed SCALARS " + name);
      std::vector<double> vals(static_cast<std::size_t>(cells));
      for (double& x : vals) is >> x;
      snap.scalars[name] = std::move(vals);
    } else if (tok == "VECTORS") {
      std::string name, type;
      is >> name >> type;
      if (cells < 0) fail(path, "VECTORS before CELL_DATA");
      snap.velocity.resize(static_cast<std::size_t>(cells));
      for (auto& v : snap.velocity) is >> v[0] >> v[1] >> v[2];
    } else {
      fail(path, "unexpected token '" + tok + "'");
    }
    if (is.fail()) fail(path, "truncated after " + tok);
  }
  if (static_cast<long>(snap.nx) * snap.ny != cells) fail(path, "CELL_DATA count does not match DIMENSIONS");
  return snap;
}

const std::string& energy_csv_header() {
  static const std::string h =
      "step,time,e_mix,e_conf,e_el,e_kin,e_tot,nd_phobic,nd_split,diss_mixflux,diss_bulk,diss_shear,diss_visc,"
      "min_conf_eig";
  return h;
}

std::string energy_csv_row(long step, double time, const EnergyBreakdown& e, double min_conf_eig) {
  std::ostringstream os;
  os << step;
  for (double x : {time, e.e_mix, e.e_conf, e.e_el, e.e_kin, e.e_tot, e.nd_phobic, e.nd_split, e.diss_mixflux,
                   e.diss_bulk, e.diss_shear, e.diss_visc, min_conf_eig}) {
    os << ',' << num(x);
  }
  return os.str();
}

}  // namespace vpsim
