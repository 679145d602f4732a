#include "metapop/simulate.hpp"

#include "metapop/equilibria.hpp"
#include "metapop/errors.hpp"
#include "metapop/sampling.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace metapop {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 3>;

Vec3 to_vec(const State& s) { return Vec3(s[0], s[1], s[2]); }

// Stage evaluations may undershoot zero slightly; the field is evaluated at the
// clamped state so that small excursions do not trip the domain check.
struct Field {
  const ModelParams& params;
  void operator()(const State& x, State& dxdt, double /*t*/) const {
    const Vec3 f = rhs(params, to_vec(x).cwiseMax(0.0));
    for (int i = 0; i < 3; ++i) dxdt[i] = f(i);
  }
};

double max_abs(const State& s) { return std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2])}); }

}  // namespace

std::string_view to_string(Terminal t) {
  switch (t) {
    case Terminal::Steady: return "STEADY";
    case Terminal::MaxTime: return "MAX_TIME";
    case Terminal::Diverged: return "DIVERGED";
  }
  return "?";
}

Trajectory integrate(const ModelParams& params, const ModelState& x0, double t_end, double rel_tol, double abs_tol) {
  if (!(t_end > 0.0)) throw PreconditionError("integrate requires t_end > 0");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw PreconditionError("integrate requires positive tolerances");
  if (!x0.allFinite() || (x0.array() < 0.0).any()) throw PreconditionError("integrate requires a nonnegative x0");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  const Field field{params};
  State x{x0(0), x0(1), x0(2)};
  State dxdt;
  field(x, dxdt, 0.0);
  if (max_abs(dxdt) == 0.0) {
    traj.terminal = Terminal::Steady;
    return traj;
  }

  auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  double t = 0.0;
  double dt = std::min(1e-3, 1e-3 * t_end);
  const double dt_min = 1e-14 * t_end;
  int quiet = 0;

  while (t < t_end) {
    dt = std::min(dt, t_end - t);
    const State x_prev = x, dxdt_prev = dxdt;
    const double t_prev = t, dt_prev = dt;
    if (stepper.try_step(field, x, dxdt, t, dt) == odeint::fail) {
      if (dt < dt_min) {
        std::ostringstream os;
        os << "integrate: step size " << dt << " underflowed at t = " << t;
        throw StepUnderflowError(os.str());
      }
      continue;
    }

    bool clamped = false, rejected = false;
    for (double& xi : x) {
      if (xi >= 0.0) continue;
      if (-xi <= abs_tol) {
        xi = 0.0;
        clamped = true;
      } else {
        rejected = true;
      }
    }
    if (rejected) {
      x = x_prev;
      dxdt = dxdt_prev;
      t = t_prev;
      dt = 0.5 * dt_prev;
      if (dt < dt_min) {
        std::ostringstream os;
        os << "integrate: step size " << dt << " underflowed at t = " << t << " while keeping the state nonnegative";
        throw StepUnderflowError(os.str());
      }
      continue;
    }
    if (clamped) field(x, dxdt, t);

    traj.times.push_back(t);
    traj.states.push_back(to_vec(x));
    if (!traj.states.back().allFinite() || max_abs(x) > 1e12) {
      traj.terminal = Terminal::Diverged;
      return traj;
    }
    quiet = max_abs(dxdt) < 1e-9 * (1.0 + max_abs(x)) ? quiet + 1 : 0;
    if (quiet >= 10) {
      traj.terminal = Terminal::Steady;
      return traj;
    }
  }
  traj.terminal = Terminal::MaxTime;
  return traj;
}

BasinResult basin_sample(TopologyId topo, const ModelParams& params, int n, std::uint64_t seed, double t_end) {
  if (n < 1) throw PreconditionError("basin_sample requires n >= 1");
  const ModelParams p = apply_topology(params, topo);
  const auto equilibria = find_all_equilibria(topo, p);

  BasinResult out;
  out.starts = quasi_random_points(static_cast<std::size_t>(n), seed, Vec3::Zero(),
                                   Vec3::Constant(2.0 * p.k().maxCoeff()));
  std::map<std::string, int> counts;
  for (const auto& x0 : out.starts) {
    const Trajectory tr = integrate(p, x0, t_end);
    std::string outcome(kNotSteady);
    if (tr.terminal == Terminal::Steady) {
      outcome = kUnmatched;
      double best = 1e-4;
      for (const auto& eq : equilibria) {
        const double d = (eq.point - tr.states.back()).norm();
        if (d <= best) {
          best = d;
          outcome = to_string(eq.label);
        }
      }
    }
    ++counts[outcome];
    out.outcomes.push_back(outcome);
  }
  for (const auto& [label, c] : counts) out.fractions[label] = static_cast<double>(c) / n;
  return out;
}

}  // namespace metapop
