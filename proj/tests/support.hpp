// Shared fixtures for the unit tests and the acceptance suite.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "vpsim/grid.hpp"
#include "vpsim/materials.hpp"
#include "vpsim/sim.hpp"
#include "vpsim/state.hpp"

namespace vpsim::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform in [-1, 1) per cell.
inline CellField random_field(const GridSpec& g, std::uint64_t seed) {
  SplitMix64 r(seed);
  CellField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = 2.0 * r.uniform() - 1.0;
  return f;
}

inline StaggeredVectorField random_vector(const GridSpec& g, std::uint64_t seed) {
  return {random_field(g, seed), random_field(g, seed + 7919)};
}

inline CellField sample(const GridSpec& g, auto&& fn) {
  CellField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = fn(g.xc(i), g.yc(j));
  return f;
}

/// A few random Fourier modes with amplitudes decaying in the wavenumber.
struct SmoothRandom {
  struct Mode {
    int kx, ky;
    double a, px, py;
  };
  std::vector<Mode> modes;
  SmoothRandom(std::uint64_t seed, int count = 6) {
    SplitMix64 r(seed);
    for (int m = 0; m < count; ++m) {
      const int kx = 1 + static_cast<int>(r.next() % 3);
      const int ky = static_cast<int>(r.next() % 3);
      const double a = (2.0 * r.uniform() - 1.0) / (kx + ky);
      modes.push_back({kx, ky, a, kTwoPi * r.uniform(), kTwoPi * r.uniform()});
    }
  }
  double operator()(double x, double y) const {
    double v = 0.0;
    for (const auto& m : modes) v += m.a * std::cos(kTwoPi * m.kx * x + m.px) * std::cos(kTwoPi * m.ky * y + m.py);
    return v;
  }
};

/// Smooth random state: phi in (0.3, 0.5), small q, positive-definite sigma
/// near the B2 (sqrt2 - 1) initialization and a discretely divergence-free
/// velocity from a corner stream function. Domain must be the unit square.
inline State smooth_random_state(const GridSpec& g, const ModelParams& p, std::uint64_t seed, bool flow = true) {
  State s(g);
  const SmoothRandom a(seed), b(seed + 1), c(seed + 2), d(seed + 3);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.xc(i), y = g.yc(j);
      s.phi(i, j) = 0.4 + 0.04 * a(x, y);
      s.q(i, j) = 0.01 * b(x, y);
      const double b2 = coefficients(p, s.phi(i, j)).B2 * (std::numbers::sqrt2 - 1.0);
      s.sigma.xx(i, j) = b2 * (1.0 + 0.1 * c(x, y));
      s.sigma.yy(i, j) = b2 * (1.0 - 0.1 * c(x, y));
      s.sigma.xy(i, j) = 0.05 * b2 * d(x, y);
    }
  }
  if (flow) {
    const SmoothRandom e(seed + 4);
    CellField psi(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) psi(i, j) = 0.01 * e(g.xf(i), g.yf(j));
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        s.u.ux(i, j) = (psi(i, j) - psi(i, j - 1)) / g.hy();
        s.u.uy(i, j) = -(psi(i, j) - psi(i - 1, j)) / g.hx();
      }
    }
  }
  return s;
}

inline double sum(const CellField& f) {
  double s = 0.0;
  for (double v : f.data()) s += v;
  return s;
}

inline double max_abs_diff(const CellField& a, const CellField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs_diff(const StaggeredVectorField& a, const StaggeredVectorField& b) {
  return std::max(max_abs_diff(a.ux, b.ux), max_abs_diff(a.uy, b.uy));
}

inline double max_abs_diff(const SymTensorField& a, const SymTensorField& b) {
  return std::max({max_abs_diff(a.xx, b.xx), max_abs_diff(a.xy, b.xy), max_abs_diff(a.yy, b.yy)});
}

inline bool bitwise_equal(const CellField& a, const CellField& b) { return a.data() == b.data(); }

/// Dense Gaussian elimination with partial pivoting; a is row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = a[r * n + c] / a[c * n + c];
      if (m == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= m * a[c * n + k];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
    x[r] = s / a[r * n + r];
  }
  return x;
}

/// Experiment-1 material parameters (unit square setup).
inline ModelParams experiment1_params() { return preset_experiment1().model; }

}  // namespace vpsim::testing
