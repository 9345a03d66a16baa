/// @file io.hpp
/// @brief Legacy-VTK snapshots and the energy CSV.

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "vpsim/energy.hpp"
#include "vpsim/state.hpp"

namespace vpsim {

/// ASCII STRUCTURED_POINTS, DIMENSIONS (nx+1) (ny+1) 1, CELL_DATA scalars
/// phi, q, sigma_xx, sigma_xy, sigma_yy, pressure and cell-averaged velocity,
/// all printed with 17 significant digits. Throws std::runtime_error naming
/// the path on IO failure.
void write_snapshot(const State& s, const std::string& path);

struct Snapshot {
  int nx = 0;
  int ny = 0;
  double hx = 0.0;
  double hy = 0.0;
  std::string title;
  std::map<std::string, std::vector<double>> scalars;
  std::vector<std::array<double, 3>> velocity;
};

/// Reader for the files written by write_snapshot.
Snapshot read_snapshot(const std::string& path);

/// Velocity interpolated to cell centers, x and y.
std::array<CellField, 2> cell_velocity(const StaggeredVectorField& u);

const std::string& energy_csv_header();
/// One CSV line (no newline), numbers at 17 significant digits.
std::string energy_csv_row(long step, double time, const EnergyBreakdown& e, double min_conf_eig);

}  // namespace vpsim
