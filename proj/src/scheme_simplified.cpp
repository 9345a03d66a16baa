#include <stdexcept>

#include "assembly.hpp"
#include "vpsim/schemes.hpp"

namespace vpsim {

namespace {

StepResult step_simplified(const State& s, const ModelParams& p, double dt, const StepOptions& opt, bool second) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const GridSpec& g = s.grid();
  const int n = g.cells();
  const auto un = static_cast<std::size_t>(n);

  detail::PhaseInputs in;
  in.phi_n = &s.phi;
  in.q_n = &s.q;
  in.phi_coef = second && s.prev ? detail::extrapolate(s.phi, &s.prev->phi) : s.phi;
  in.params = &p;
  in.dt = dt;
  const detail::PhaseSystem sys = detail::build_phase(in);

  BlockAssembler blocks({n, n}, {n, n});
  blocks.place(0, 0, sys.Pff);
  blocks.place(0, 1, sys.Pfq);
  blocks.place(1, 0, sys.Pqf);
  blocks.place(1, 1, sys.Pqq);
  const SparseMatrix a = blocks.build();

  std::vector<double> rhs(sys.rf);
  rhs.insert(rhs.end(), sys.rq.begin(), sys.rq.end());
  std::vector<double> x_old(s.phi.data());
  x_old.insert(x_old.end(), s.q.data().begin(), s.q.data().end());

  StepResult r;
  r.aux.scheme = second ? SchemeKind::SimplifiedO2 : SchemeKind::SimplifiedO1;
  r.aux.dt = dt;
  const std::vector<double> x = detail::solve_increment(a, rhs, x_old, opt.solver, &r.aux.linear_iterations);

  CellField phi(g, std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(un)));
  CellField q(g, std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(un), x.end()));
  if (opt.conserve_mass) detail::restore_mass(s.phi, phi);
  detail::fill_phase_aux(sys, in, phi, q, r.aux);

  r.state = s;
  r.state.prev = PrevLevel{s.phi, s.u, s.sigma};
  r.state.phi = std::move(phi);
  r.state.q = std::move(q);
  r.state.t = s.t + dt;
  r.state.step = s.step + 1;
  return r;
}

}  // namespace

StepResult step_o1(const State& s, const ModelParams& p, double dt, const StepOptions& opt) {
  return step_simplified(s, p, dt, opt, false);
}

StepResult step_o2(const State& s, const ModelParams& p, double dt, const StepOptions& opt) {
  return step_simplified(s, p, dt, opt, true);
}

}  // namespace vpsim
