#include "vpsim/krylov.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace vpsim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void remove_mean(std::span<double> x) {
  if (x.empty()) return;
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  for (double& v : x) v -= m;
}

std::vector<double> residual_of(const SparseMatrix& a, std::span<const double> b, std::span<const double> x) {
  std::vector<double> r(b.size());
  a.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

std::vector<double> inverse_diagonal(const SparseMatrix& a, bool enabled) {
  std::vector<double> inv(static_cast<std::size_t>(a.rows()), 1.0);
  if (!enabled) return inv;
  const auto d = a.diagonal_entries();
  for (std::size_t i = 0; i < d.size(); ++i) inv[i] = (d[i] != 0.0) ? 1.0 / d[i] : 1.0;
  return inv;
}

void apply_diag(std::span<const double> dinv, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = dinv[i] * x[i];
}

[[noreturn]] void fail(const char* method, double rel, int it, double tol) {
  std::ostringstream os;
  os << method << " did not converge: relative residual " << rel << " after " << it
     << " iterations (target " << tol << ")";
  throw SolverError(os.str(), rel, it);
}

int bicgstab(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x, const SolverConfig& cfg,
             double target) {
  const std::size_t n = b.size();
  const auto dinv = inverse_diagonal(a, cfg.jacobi);
  std::vector<double> r = residual_of(a, b, x);
  std::vector<double> rhat(r), p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int it = 0;
  double rnorm = norm(r);
  while (it < cfg.max_iter) {
    if (rnorm <= target) {
      // confirm against the true residual before accepting
      r = residual_of(a, b, x);
      rnorm = norm(r);
      if (rnorm <= target) break;
      rhat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
    }
    ++it;
    const double rho_new = dot(rhat, r);
    if (std::abs(rho_new) < 1e-300 || !std::isfinite(rho_new)) {
      // breakdown: restart from the current residual
      r = residual_of(a, b, x);
      rhat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      rnorm = norm(r);
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    apply_diag(dinv, p, ph);
    a.multiply(ph, v);
    const double rv = dot(rhat, v);
    if (rv == 0.0 || !std::isfinite(rv)) {
      rho = 0.0;
      continue;
    }
    alpha = rho_new / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    const double snorm = norm(s);
    if (snorm <= target) {
      axpy(alpha, ph, x);
      r = s;
      rnorm = snorm;
      rho = rho_new;
      continue;
    }
    apply_diag(dinv, s, sh);
    a.multiply(sh, t);
    const double tt = dot(t, t);
    omega = (tt > 0.0) ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) x[i] += alpha * ph[i] + omega * sh[i];
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    rnorm = norm(r);
    rho = rho_new;
    if (omega == 0.0) rho = 0.0;
  }
  return it;
}

int gmres(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x, const SolverConfig& cfg,
          double target) {
  const std::size_t n = b.size();
  const int m = std::max(1, cfg.gmres_restart);
  const auto dinv = inverse_diagonal(a, cfg.jacobi);
  std::vector<std::vector<double>> basis(static_cast<std::size_t>(m) + 1, std::vector<double>(n));
  std::vector<double> h(static_cast<std::size_t>((m + 1) * m), 0.0);
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)),
      g(static_cast<std::size_t>(m) + 1);
  std::vector<double> z(n), w(n);
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i * m + j)]; };

  int it = 0;
  while (it < cfg.max_iter) {
    std::vector<double> r = residual_of(a, b, x);
    const double beta = norm(r);
    if (beta <= target) break;
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && it < cfg.max_iter; ++k) {
      ++it;
      apply_diag(dinv, basis[k], z);
      a.multiply(z, w);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = dot(w, basis[i]);
        axpy(-H(i, k), basis[i], w);
      }
      const double hn = norm(w);
      H(k + 1, k) = hn;
      if (hn > 0.0) {
        for (std::size_t i = 0; i < n; ++i) basis[k + 1][i] = w[i] / hn;
      }
      for (int i = 0; i < k; ++i) {
        const double t0 = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t0;
      }
      const double den = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = (den > 0.0) ? H(k, k) / den : 1.0;
      sn[k] = (den > 0.0) ? H(k + 1, k) / den : 0.0;
      H(k, k) = den;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= 0.5 * target || hn == 0.0) {
        ++k;
        break;
      }
    }
    // back substitution and update x += M^{-1} V y
    std::vector<double> y(static_cast<std::size_t>(k), 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
      y[i] = (H(i, i) != 0.0) ? s / H(i, i) : 0.0;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) axpy(y[j], basis[j], w);
    apply_diag(dinv, w, z);
    axpy(1.0, z, x);
  }
  return it;
}

int cg(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x, const SolverConfig& cfg,
       double target) {
  const std::size_t n = b.size();
  const bool proj = cfg.zero_mean_nullspace;
  const auto dinv = inverse_diagonal(a, cfg.jacobi);
  if (proj) remove_mean(x);
  std::vector<double> r = residual_of(a, b, x);
  if (proj) remove_mean(r);
  std::vector<double> z(n), p(n), q(n);
  apply_diag(dinv, r, z);
  if (proj) remove_mean(z);
  p = z;
  double rz = dot(r, z);
  int it = 0;
  double rnorm = norm(r);
  while (it < cfg.max_iter) {
    if (rnorm <= target) {
      r = residual_of(a, b, x);
      if (proj) remove_mean(r);
      rnorm = norm(r);
      if (rnorm <= target) break;
      apply_diag(dinv, r, z);
      if (proj) remove_mean(z);
      p = z;
      rz = dot(r, z);
    }
    ++it;
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    if (proj) {
      remove_mean(x);
      remove_mean(r);
    }
    rnorm = norm(r);
    apply_diag(dinv, r, z);
    if (proj) remove_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return it;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("solver rel_tol must lie in (0, 1)");
  if (max_iter < 1) throw std::invalid_argument("solver max_iter must be >= 1");
  if (gmres_restart < 1) throw std::invalid_argument("gmres restart must be >= 1");
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "bicgstab" || name == "general-nonsymmetric-krylov") return SolverMethod::BiCGStab;
  if (name == "gmres") return SolverMethod::GMRES;
  if (name == "cg" || name == "conjugate-gradient") return SolverMethod::CG;
  throw std::invalid_argument("unknown solver method '" + name + "'");
}

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::BiCGStab: return "bicgstab";
    case SolverMethod::GMRES: return "gmres";
    case SolverMethod::CG: return "cg";
  }
  return "?";
}

SolveResult solve(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0,
                  const SolverConfig& cfg) {
  cfg.validate();
  if (a.rows() != a.cols()) throw std::invalid_argument("solve: matrix must be square");
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (b.size() != n || (!x0.empty() && x0.size() != n)) throw std::invalid_argument("solve: dimension mismatch");

  std::vector<double> rhs(b.begin(), b.end());
  if (cfg.method == SolverMethod::CG && cfg.zero_mean_nullspace) remove_mean(rhs);
  SolveResult res;
  res.x = x0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(x0.begin(), x0.end());
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    return res;
  }
  const double target = cfg.rel_tol * bnorm;

  switch (cfg.method) {
    case SolverMethod::BiCGStab: res.iterations = bicgstab(a, rhs, res.x, cfg, target); break;
    case SolverMethod::GMRES: res.iterations = gmres(a, rhs, res.x, cfg, target); break;
    case SolverMethod::CG: res.iterations = cg(a, rhs, res.x, cfg, target); break;
  }
  if (cfg.method == SolverMethod::CG && cfg.zero_mean_nullspace) remove_mean(res.x);
  std::vector<double> r = residual_of(a, rhs, res.x);
  if (cfg.method == SolverMethod::CG && cfg.zero_mean_nullspace) remove_mean(r);
  res.residual = norm(r);
  res.relative_residual = res.residual / bnorm;
  const bool finite = std::isfinite(res.residual);
  if (!finite || res.residual > target) fail(to_string(cfg.method).c_str(), res.relative_residual, res.iterations, cfg.rel_tol);
  return res;
}

}  // namespace vpsim
