/// @file materials.hpp
/// @brief Free-energy potentials, their linearizations, mobility and the
/// phi-dependent model coefficients.

#pragma once

#include <string>

#include "vpsim/grid.hpp"

namespace vpsim {

struct PotentialKind {
  enum class Variant { GinzburgLandau, ModifiedGinzburgLandau, FloryHuggins };
  Variant variant = Variant::FloryHuggins;
  double np = 1.0;  ///< polymerization degree of the polymer
  double ns = 1.0;  ///< polymerization degree of the solvent
  double chi = 3.0;

  bool is_flory_huggins() const { return variant == Variant::FloryHuggins; }
  void validate() const;
};

enum class FApproxKind { F1Stabilized, F2ConvexConcave, F3OD2 };

PotentialKind::Variant parse_potential(const std::string& name);
FApproxKind parse_fapprox(const std::string& name);
std::string to_string(PotentialKind::Variant v);
std::string to_string(FApproxKind k);

struct ModelParams {
  double C0 = 1.0 / 600.0;
  double M = 10.0;
  int mobility_exponent = 2;
  double tau_b0 = 10.0;
  double tau_s0 = 5.0;
  double ms0 = 0.2;
  double Mb0 = 0.5;
  double Mb1 = 1.0;
  double phi_star = 0.4;
  double eps_A1 = 0.01;
  PotentialKind potential{};
  FApproxKind fapprox = FApproxKind::F3OD2;
  double phi_clamp_eps = 1e-6;
  double eta_floor = 1e-3;

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
};

double potential_F(const PotentialKind& kind, double phi);
double potential_f(const PotentialKind& kind, double phi);
/// f'(phi) = F''(phi).
double potential_fprime(const PotentialKind& kind, double phi);

/// f(phi_new, phi_old) = a*phi_new + b; c_mu multiplies -Lap(phi^{n+1/2})
/// in the chemical potential.
struct AffineF {
  double a = 0.0;
  double b = 0.0;
  double c_mu = 0.0;
};

/// phi_old must already be clamped for Flory-Huggins.
AffineF f_approx_affine(const PotentialKind& kind, FApproxKind fapprox, double phi_old, double dt);

/// M * (phi(1-phi))^n.
double mobility(const ModelParams& p, double phi);
/// Signed square root of the mobility shape: s with s^2 = (phi(1-phi))^n and
/// sign(s) = sign(phi(1-phi))^n. Equals phi(1-phi) for n = 2.
double mobility_factor(const ModelParams& p, double phi);

struct Coefficients {
  double tau_b = 0.0;
  double tau_s = 0.0;
  double B2 = 0.0;
  double eta = 0.0;
  double A1 = 0.0;
};

/// tau_b, tau_s, B2, eta(floored) at phi; A1 uses phi clamped away from
/// {0, 1} before the cotangent regardless of the potential.
Coefficients coefficients(const ModelParams& p, double phi);
double bulk_modulus_A1(const ModelParams& p, double phi);

/// Clips into [eps, 1-eps] for Flory-Huggins models; identity otherwise.
CellField clamp_phi(const ModelParams& p, const CellField& phi);
double clamp_phi(const ModelParams& p, double phi);

}  // namespace vpsim
