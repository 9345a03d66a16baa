#include "vpsim/materials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vpsim {

namespace {

void require_finite(double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("potential evaluated at non-finite phi");
}

// Closed-form sup norms on (-1,1) of the convex/concave parts 2*phi and phi^3-3*phi.
constexpr double kVexNorm = 2.0;
constexpr double kCaveNorm = 3.0;

}  // namespace

void PotentialKind::validate() const {
  if (variant != Variant::FloryHuggins) return;
  if (!(np >= 1.0) || !(ns >= 1.0)) throw std::invalid_argument("Flory-Huggins needs np >= 1 and ns >= 1");
  if (!(chi > 0.0)) throw std::invalid_argument("Flory-Huggins needs chi > 0");
}

PotentialKind::Variant parse_potential(const std::string& name) {
  if (name == "ginzburg_landau" || name == "gl") return PotentialKind::Variant::GinzburgLandau;
  if (name == "modified_ginzburg_landau" || name == "modified_gl") return PotentialKind::Variant::ModifiedGinzburgLandau;
  if (name == "flory_huggins" || name == "fh") return PotentialKind::Variant::FloryHuggins;
  throw std::invalid_argument("unknown potential '" + name + "'");
}

FApproxKind parse_fapprox(const std::string& name) {
  if (name == "f1" || name == "stabilized") return FApproxKind::F1Stabilized;
  if (name == "f2" || name == "convex_concave") return FApproxKind::F2ConvexConcave;
  if (name == "f3" || name == "od2") return FApproxKind::F3OD2;
  throw std::invalid_argument("unknown f approximation '" + name + "'");
}

std::string to_string(PotentialKind::Variant v) {
  switch (v) {
    case PotentialKind::Variant::GinzburgLandau: return "ginzburg_landau";
    case PotentialKind::Variant::ModifiedGinzburgLandau: return "modified_ginzburg_landau";
    case PotentialKind::Variant::FloryHuggins: return "flory_huggins";
  }
  return "?";
}

std::string to_string(FApproxKind k) {
  switch (k) {
    case FApproxKind::F1Stabilized: return "f1";
    case FApproxKind::F2ConvexConcave: return "f2";
    case FApproxKind::F3OD2: return "od2";
  }
  return "?";
}

void ModelParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(C0, "C0");
  positive(M, "M");
  positive(tau_b0, "tau_b0");
  positive(tau_s0, "tau_s0");
  // ms0 = 0 switches the elastic coupling off
  if (!(ms0 >= 0.0) || !std::isfinite(ms0)) throw std::invalid_argument("ms0 must be nonnegative");
  positive(eps_A1, "eps_A1");
  positive(phi_clamp_eps, "phi_clamp_eps");
  positive(eta_floor, "eta_floor");
  if (mobility_exponent < 0) throw std::invalid_argument("mobility exponent must be >= 0");
  if (!(phi_star > 0.0 && phi_star < 1.0)) throw std::invalid_argument("phi_star must lie in (0, 1)");
  if (!(phi_clamp_eps < 0.5)) throw std::invalid_argument("phi_clamp_eps must be < 0.5");
  if (!std::isfinite(Mb0) || !std::isfinite(Mb1)) throw std::invalid_argument("bulk modulus constants must be finite");
  potential.validate();
  if (fapprox != FApproxKind::F3OD2 && potential.variant != PotentialKind::Variant::ModifiedGinzburgLandau) {
    throw std::invalid_argument("f1/f2 approximations need the modified Ginzburg-Landau potential (bounded f')");
  }
  // The unfloored viscosity 1 - tau_s0*ms0*phi^4 must stay nonnegative on [0,1];
  // the floor then only acts where it degenerates at phi -> 1.
  if (tau_s0 * ms0 > 1.0) throw std::invalid_argument("tau_s0*ms0 > 1 makes the viscosity negative inside (0,1)");
  if (!(eta_floor < 1.0)) throw std::invalid_argument("eta_floor must be < 1");
}

double potential_F(const PotentialKind& k, double phi) {
  require_finite(phi);
  switch (k.variant) {
    case PotentialKind::Variant::GinzburgLandau: return 0.25 * (phi * phi - 1.0) * (phi * phi - 1.0);
    case PotentialKind::Variant::ModifiedGinzburgLandau:
      if (phi < -1.0) return (phi + 1.0) * (phi + 1.0);
      if (phi > 1.0) return (phi - 1.0) * (phi - 1.0);
      return 0.25 * (phi * phi - 1.0) * (phi * phi - 1.0);
    case PotentialKind::Variant::FloryHuggins:
      return phi * std::log(phi) / k.np + (1.0 - phi) * std::log(1.0 - phi) / k.ns + k.chi * phi * (1.0 - phi);
  }
  return 0.0;
}

double potential_f(const PotentialKind& k, double phi) {
  require_finite(phi);
  switch (k.variant) {
    case PotentialKind::Variant::GinzburgLandau: return phi * phi * phi - phi;
    case PotentialKind::Variant::ModifiedGinzburgLandau:
      if (phi < -1.0) return 2.0 * (phi + 1.0);
      if (phi > 1.0) return 2.0 * (phi - 1.0);
      return phi * phi * phi - phi;
    case PotentialKind::Variant::FloryHuggins:
      return (std::log(phi) + 1.0) / k.np - (std::log(1.0 - phi) + 1.0) / k.ns + k.chi * (1.0 - 2.0 * phi);
  }
  return 0.0;
}

double potential_fprime(const PotentialKind& k, double phi) {
  require_finite(phi);
  switch (k.variant) {
    case PotentialKind::Variant::GinzburgLandau: return 3.0 * phi * phi - 1.0;
    case PotentialKind::Variant::ModifiedGinzburgLandau:
      if (phi < -1.0 || phi > 1.0) return 2.0;
      return 3.0 * phi * phi - 1.0;
    case PotentialKind::Variant::FloryHuggins:
      return 1.0 / (k.np * phi) + 1.0 / (k.ns * (1.0 - phi)) - 2.0 * k.chi;
  }
  return 0.0;
}

AffineF f_approx_affine(const PotentialKind& k, FApproxKind fa, double phi_old, double dt) {
  if (fa != FApproxKind::F3OD2 && k.variant != PotentialKind::Variant::ModifiedGinzburgLandau) {
    throw std::invalid_argument("f1/f2 approximations need the modified Ginzburg-Landau potential");
  }
  const double f0 = potential_f(k, phi_old);
  switch (fa) {
    case FApproxKind::F1Stabilized:
      // 0.5*||f'||_inf = 1
      return {1.0, f0 - phi_old, 0.0};
    case FApproxKind::F2ConvexConcave: {
      // concave part f - 2 phi: phi^3 - 3 phi inside [-1,1]
      const double fc = f0 - 2.0 * phi_old;
      const double fcp = potential_fprime(k, phi_old) - 2.0;
      const double cmu = dt * (kVexNorm + kCaveNorm) * (kVexNorm + kCaveNorm) / 16.0;
      return {1.0 + 0.5 * fcp, phi_old + fc - 0.5 * phi_old * fcp, cmu};
    }
    case FApproxKind::F3OD2: {
      const double fp = potential_fprime(k, phi_old);
      return {0.5 * fp, f0 - 0.5 * phi_old * fp, 0.0};
    }
  }
  return {};
}

double mobility(const ModelParams& p, double phi) {
  const double s = mobility_factor(p, phi);
  return p.M * s * s;
}

double mobility_factor(const ModelParams& p, double phi) {
  const double w = phi * (1.0 - phi);
  const int n = p.mobility_exponent;
  if (n == 0) return 1.0;
  if (n % 2 == 0) return std::pow(w, n / 2);
  // odd n: (phi(1-phi))^n may be negative; keep the sign on the factor
  return std::copysign(std::pow(std::abs(w), 0.5 * n), w);
}

double bulk_modulus_A1(const ModelParams& p, double phi) {
  const double e = p.phi_clamp_eps;
  const double pc = std::clamp(phi, e, 1.0 - e);
  const double pi = std::numbers::pi;
  const double cot_star = 1.0 / std::tan(pi * p.phi_star);
  const double cot_phi = 1.0 / std::tan(pi * pc);
  return p.Mb0 * (1.0 + std::tanh((cot_star - cot_phi) / p.eps_A1)) + p.Mb1;
}

Coefficients coefficients(const ModelParams& p, double phi) {
  const double p2 = phi * phi;
  Coefficients c;
  c.tau_b = p.tau_b0 * p2;
  c.tau_s = p.tau_s0 * p2;
  c.B2 = p.ms0 * p2;
  c.eta = std::max(1.0 - c.tau_s * c.B2, p.eta_floor);
  c.A1 = bulk_modulus_A1(p, phi);
  return c;
}

double clamp_phi(const ModelParams& p, double phi) {
  if (!p.potential.is_flory_huggins()) return phi;
  return std::clamp(phi, p.phi_clamp_eps, 1.0 - p.phi_clamp_eps);
}

CellField clamp_phi(const ModelParams& p, const CellField& phi) {
  CellField r(phi);
  if (!p.potential.is_flory_huggins()) return r;
  for (double& v : r.data()) v = clamp_phi(p, v);
  return r;
}

}  // namespace vpsim
