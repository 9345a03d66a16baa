#include "vpsim/state.hpp"

#include <stdexcept>

namespace vpsim {

bool State::all_finite() const {
  return phi.all_finite() && q.all_finite() && sigma.all_finite() && u.all_finite() && p.all_finite();
}

SchemeKind parse_scheme(const std::string& name) {
  if (name == "simplified_o1") return SchemeKind::SimplifiedO1;
  if (name == "simplified_o2") return SchemeKind::SimplifiedO2;
  if (name == "coupled") return SchemeKind::Coupled;
  if (name == "coupled_cn") return SchemeKind::CoupledCN;
  if (name == "coupled_o2") return SchemeKind::Coupled2nd;
  if (name == "coupled_implicit_stress") return SchemeKind::CoupledImplicitStress;
  if (name == "splitting" || name == "splitting_monolithic") return SchemeKind::SplittingMonolithic;
  if (name == "splitting_chorin") return SchemeKind::SplittingChorin;
  if (name == "splitting_implicit") return SchemeKind::SplittingImplicitFixpoint;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::SimplifiedO1: return "simplified_o1";
    case SchemeKind::SimplifiedO2: return "simplified_o2";
    case SchemeKind::Coupled: return "coupled";
    case SchemeKind::CoupledCN: return "coupled_cn";
    case SchemeKind::Coupled2nd: return "coupled_o2";
    case SchemeKind::CoupledImplicitStress: return "coupled_implicit_stress";
    case SchemeKind::SplittingMonolithic: return "splitting_monolithic";
    case SchemeKind::SplittingChorin: return "splitting_chorin";
    case SchemeKind::SplittingImplicitFixpoint: return "splitting_implicit";
  }
  return "?";
}

bool is_full_model(SchemeKind k) { return k != SchemeKind::SimplifiedO1 && k != SchemeKind::SimplifiedO2; }

}  // namespace vpsim
