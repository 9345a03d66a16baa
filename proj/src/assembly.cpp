#include "assembly.hpp"

#include <cmath>
#include <limits>

#include "vpsim/grid_ops.hpp"
#include "vpsim/operators.hpp"

namespace vpsim::detail {

PhaseSystem build_phase(const PhaseInputs& in) {
  const ModelParams& P = *in.params;
  const CellField& phi_n = *in.phi_n;
  const CellField& q_n = *in.q_n;
  const double dt = in.dt;
  PhaseSystem s;
  s.grid = phi_n.grid();
  const int n = s.grid.cells();
  const auto un = static_cast<std::size_t>(n);

  const ops::GridOperators& go = ops::grid_operators(s.grid);
  s.G = go.G;
  s.D = go.D;
  s.L = go.L;

  const CellField pc = clamp_phi(P, in.phi_coef);
  const CellField pn = clamp_phi(P, phi_n);

  s.a.resize(un);
  s.b.resize(un);
  for (std::size_t k = 0; k < un; ++k) {
    const AffineF af = f_approx_affine(P.potential, P.fapprox, pn[k], dt);
    s.a[k] = af.a;
    s.b[k] = af.b;
    s.c_mu = af.c_mu;
  }
  const double cl = -0.5 * (P.C0 + s.c_mu);
  s.Amu = add(scaled(s.L, cl), SparseMatrix::diagonal(s.a));
  s.bmu = s.L * phi_n.values();
  for (std::size_t k = 0; k < un; ++k) s.bmu[k] = cl * s.bmu[k] + s.b[k];

  CellField mob(s.grid);
  s.A1 = CellField(s.grid);
  for (std::size_t k = 0; k < un; ++k) {
    mob[k] = mobility_factor(P, pc[k]);
    s.A1[k] = bulk_modulus_A1(P, pc[k]);
  }
  s.k_face = interp_cc_to_face(mob).flat();
  s.inv_tau_b = inverse_relaxation(pc, P.tau_b0, P.phi_clamp_eps);

  const SparseMatrix GA = multiply(s.G, s.Amu);
  const std::vector<double> Gb = s.G * s.bmu;
  const SparseMatrix GA1 = scale_cols(s.G, s.A1.values());
  const SparseMatrix KGA = scale_rows(s.k_face, GA);
  std::vector<double> mk(s.k_face);
  for (double& v : mk) v *= P.M;
  const SparseMatrix MDK = scale_cols(s.D, mk);
  const SparseMatrix A1MD = scaled(scale_rows(s.A1.values(), s.D), P.M);

  // known part of the flux bracket: k Gb - 0.5 GA1 q^n
  std::vector<double> wk = GA1 * q_n.values();
  for (std::size_t f = 0; f < wk.size(); ++f) wk[f] = s.k_face[f] * Gb[f] - 0.5 * wk[f];

  const SparseMatrix I_dt = SparseMatrix::identity(n, 1.0 / dt);
  s.Pff = add(I_dt, multiply(MDK, KGA), 1.0, -1.0);
  s.Pfq = scaled(multiply(MDK, GA1), 0.5);
  s.Pqf = multiply(A1MD, KGA);

  std::vector<double> half_inv(s.inv_tau_b.data());
  for (double& v : half_inv) v *= 0.5;
  s.Pqq = add(add(I_dt, SparseMatrix::diagonal(half_inv)), multiply(A1MD, GA1), 1.0, -0.5);

  s.rf = MDK * wk;
  for (std::size_t k = 0; k < un; ++k) s.rf[k] += phi_n[k] / dt;

  s.rq = A1MD * wk;
  for (std::size_t k = 0; k < un; ++k) s.rq[k] = q_n[k] / dt - half_inv[k] * q_n[k] - s.rq[k];

  if (in.q_velocity) {
    const SparseMatrix aq = ops::upwind_advection(*in.q_velocity);
    s.Pqq = add(s.Pqq, aq, 1.0, 0.5);
    const std::vector<double> aqn = aq * q_n.values();
    for (std::size_t k = 0; k < un; ++k) s.rq[k] -= 0.5 * aqn[k];
  }

  if (in.split_velocity) {
    // div(u* phi_f) with u* = u^n - dt phi_f G mu
    s.phi_face = interp_cc_to_face(phi_n).flat();
    std::vector<double> phi2(s.phi_face);
    for (double& v : phi2) v *= v;
    const SparseMatrix DP2 = scale_cols(s.D, phi2);
    s.Pff = add(s.Pff, multiply(DP2, GA), 1.0, -dt);
    std::vector<double> fl = in.split_velocity->flat();
    for (std::size_t f = 0; f < fl.size(); ++f) fl[f] = s.phi_face[f] * fl[f] - dt * phi2[f] * Gb[f];
    const std::vector<double> dfl = s.D * fl;
    for (std::size_t k = 0; k < un; ++k) s.rf[k] -= dfl[k];
  }
  return s;
}

CellField chemical_potential(const PhaseSystem& sys, const CellField& phi_n, const CellField& phi_new) {
  (void)phi_n;
  const std::vector<double> m = sys.Amu * phi_new.values();
  CellField mu(phi_new.grid());
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = m[k] + sys.bmu[k];
  return mu;
}

void fill_phase_aux(const PhaseSystem& sys, const PhaseInputs& in, const CellField& phi_new, const CellField& q_new,
                    StepAux& aux) {
  const ModelParams& P = *in.params;
  const GridSpec& g = sys.grid;
  aux.mu = chemical_potential(sys, *in.phi_n, phi_new);
  aux.q_half = half_level(*in.q_n, q_new);
  aux.inv_tau_b = sys.inv_tau_b;
  aux.q_velocity = in.q_velocity;

  // f_eff = mu + C0 Lap(phi^{n+1/2})
  const CellField lap = laplacian_cc(half_level(*in.phi_n, phi_new));
  aux.f_eff = CellField(g);
  for (std::size_t k = 0; k < lap.size(); ++k) aux.f_eff[k] = aux.mu[k] + P.C0 * lap[k];

  const StaggeredVectorField gmu = grad_cc(aux.mu);
  const StaggeredVectorField gaq = grad_cc(hadamard(sys.A1, aux.q_half));
  std::vector<double> w = gmu.flat();
  const std::vector<double> ga = gaq.flat();
  for (std::size_t f = 0; f < w.size(); ++f) w[f] = sys.k_face[f] * w[f] - ga[f];
  aux.flux = StaggeredVectorField::from_flat(g, w);
}

std::vector<double> solve_increment(const SparseMatrix& a, std::span<const double> b, std::span<const double> x_old,
                                    const SolverConfig& cfg, int* iters) {
  std::vector<double> r = a * x_old;
  bool zero = true;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = b[i] - r[i];
    if (r[i] != 0.0) zero = false;
  }
  std::vector<double> x(x_old.begin(), x_old.end());
  if (zero) return x;
  const SolveResult res = solve(a, r, {}, cfg);
  if (iters) *iters += res.iterations;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += res.x[i];
  return x;
}

void restore_mass(const CellField& phi_old, CellField& phi_new) {
  double so = 0.0, sn = 0.0;
  for (std::size_t k = 0; k < phi_old.size(); ++k) {
    so += phi_old[k];
    sn += phi_new[k];
  }
  const double shift = (so - sn) / static_cast<double>(phi_new.size());
  if (shift == 0.0) return;
  for (double& v : phi_new.data()) v += shift;
}

CellField inverse_relaxation(const CellField& phi, double c0, double eps) {
  CellField r(phi.grid());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = 1.0 / (c0 * std::max(phi[k] * phi[k], eps * eps));
  return r;
}

CellField extrapolate(const CellField& zn, const CellField* zprev) {
  if (!zprev) return zn;
  CellField r(zn.grid());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = 0.5 * (3.0 * zn[k] - (*zprev)[k]);
  return r;
}

StaggeredVectorField extrapolate(const StaggeredVectorField& zn, const StaggeredVectorField* zprev) {
  if (!zprev) return zn;
  return {extrapolate(zn.ux, &zprev->ux), extrapolate(zn.uy, &zprev->uy)};
}

SymTensorField extrapolate(const SymTensorField& zn, const SymTensorField* zprev) {
  if (!zprev) return zn;
  return {extrapolate(zn.xx, &zprev->xx), extrapolate(zn.xy, &zprev->xy), extrapolate(zn.yy, &zprev->yy)};
}

CellField half_level(const CellField& a, const CellField& b) {
  CellField r(a.grid());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = 0.5 * (a[k] + b[k]);
  return r;
}

SymTensorField explicit_stress(const SymTensorField& sigma_n, const SymTensorField& s_hat,
                               const StaggeredVectorField& v_adv, const StaggeredVectorField& v_L,
                               const CellField& inv_tau_s, const CellField& b2, double dt) {
  const CellField axx = advect_conservative_upwind(v_adv, s_hat.xx);
  const CellField axy = advect_conservative_upwind(v_adv, s_hat.xy);
  const CellField ayy = advect_conservative_upwind(v_adv, s_hat.yy);
  const VelocityGradient L = grad_velocity_cc(v_L);
  SymTensorField r(sigma_n.grid());
  for (std::size_t k = 0; k < r.xx.size(); ++k) {
    const double sxx = s_hat.xx[k], sxy = s_hat.xy[k], syy = s_hat.yy[k];
    const double lxx = L.dux_dx[k], lxy = L.dux_dy[k], lyx = L.duy_dx[k], lyy = L.duy_dy[k];
    const double ucxx = 2.0 * (lxx * sxx + lxy * sxy);
    const double ucxy = lyx * sxx + (lxx + lyy) * sxy + lxy * syy;
    const double ucyy = 2.0 * (lyx * sxy + lyy * syy);
    r.xx[k] = sigma_n.xx[k] + dt * (-axx[k] + ucxx - inv_tau_s[k] * sxx + 2.0 * b2[k] * lxx);
    r.xy[k] = sigma_n.xy[k] + dt * (-axy[k] + ucxy - inv_tau_s[k] * sxy + b2[k] * (lxy + lyx));
    r.yy[k] = sigma_n.yy[k] + dt * (-ayy[k] + ucyy - inv_tau_s[k] * syy + 2.0 * b2[k] * lyy);
  }
  return r;
}

std::array<double, 3> solve_stress_cell(double c, double lxx, double lxy, double lyx, double lyy,
                                        const std::array<double, 3>& rhs) {
  // unknowns (xx, xy, yy); rows of (c - (L s + s L^T))
  const double m[3][3] = {{c - 2.0 * lxx, -2.0 * lxy, 0.0},
                          {-lyx, c - lxx - lyy, -lxy},
                          {0.0, -2.0 * lyx, c - 2.0 * lyy}};
  auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double det = det3(m);
  if (det == 0.0 || !std::isfinite(det)) throw std::runtime_error("singular per-cell stress system");
  std::array<double, 3> x{};
  for (int col = 0; col < 3; ++col) {
    double t[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c2 = 0; c2 < 3; ++c2) t[r][c2] = (c2 == col) ? rhs[r] : m[r][c2];
    }
    x[col] = det3(t) / det;
  }
  return x;
}

SymTensorField implicit_stress(const SymTensorField& sigma_n, const SymTensorField& s_lag,
                               const StaggeredVectorField& v, const CellField& inv_tau_s, const CellField& b2,
                               double dt) {
  const CellField axx = advect_conservative_upwind(v, s_lag.xx);
  const CellField axy = advect_conservative_upwind(v, s_lag.xy);
  const CellField ayy = advect_conservative_upwind(v, s_lag.yy);
  const VelocityGradient L = grad_velocity_cc(v);
  SymTensorField r(sigma_n.grid());
  for (std::size_t k = 0; k < r.xx.size(); ++k) {
    const double lxx = L.dux_dx[k], lxy = L.dux_dy[k], lyx = L.duy_dx[k], lyy = L.duy_dy[k];
    const std::array<double, 3> rhs = {sigma_n.xx[k] / dt - axx[k] + 2.0 * b2[k] * lxx,
                                       sigma_n.xy[k] / dt - axy[k] + b2[k] * (lxy + lyx),
                                       sigma_n.yy[k] / dt - ayy[k] + 2.0 * b2[k] * lyy};
    const auto x = solve_stress_cell(1.0 / dt + inv_tau_s[k], lxx, lxy, lyx, lyy, rhs);
    r.xx[k] = x[0];
    r.xy[k] = x[1];
    r.yy[k] = x[2];
  }
  return r;
}

double relative_change(std::span<const double> a, std::span<const double> b) {
  double d = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    nb += b[i] * b[i];
  }
  if (d == 0.0) return 0.0;
  if (nb == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(d / nb);
}

SolverConfig with_method(const SolverConfig& base, SolverMethod m) {
  SolverConfig c = base;
  c.method = m;
  c.zero_mean_nullspace = (m == SolverMethod::CG);
  return c;
}

}  // namespace vpsim::detail
