#include "metapop/commands.hpp"

#include "metapop/bifurcation.hpp"
#include "metapop/equilibria.hpp"
#include "metapop/errors.hpp"
#include "metapop/simulate.hpp"
#include "metapop/stability.hpp"
#include "metapop/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>

namespace metapop {

namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

// Leading eigenvalue: largest real part, first in the sorted triple.
const Complex& leading(const StabilityReport& rep) { return rep.eigenvalues[0]; }

json report_json(const EquilibriumRecord& eq, const StabilityReport& rep) {
  json e;
  e["label"] = std::string(to_string(eq.label));
  e["point"] = vec_json(eq.point);
  e["feasible"] = eq.feasible;
  e["residual"] = eq.residual;
  e["eigenvalues"] = json::array();
  for (const auto& l : rep.eigenvalues) e["eigenvalues"].push_back({l.real(), l.imag()});
  e["classification"] = std::string(to_string(rep.classification));
  e["routh_hurwitz"] = rep.routh_hurwitz;
  e["characteristic"] = {
      {"trace", rep.coefficients.trace}, {"minor_sum", rep.coefficients.minor_sum}, {"det", rep.coefficients.det}};
  e["conditions"] = json::array();
  for (const auto& c : rep.conditions) {
    e["conditions"].push_back({{"id", c.id},
                               {"kind", std::string(to_string(c.kind))},
                               {"relation", std::string(1, c.relation)},
                               {"lhs", c.lhs},
                               {"rhs", c.rhs},
                               {"holds", c.holds}});
  }
  if (const auto s = rep.stated_stable()) e["conditions_say_stable"] = *s;
  e["diagnostics"] = eq.diagnostics;
  return e;
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
  if (!opts.config_path) throw ConfigError("--config PATH is required for this command");
  RunConfig cfg = load_config(*opts.config_path);
  if (opts.topology) {
    const auto id = parse_topology(*opts.topology);
    if (!id) throw ConfigError("unknown topology token \"" + *opts.topology + "\"");
    cfg.topology = *id;
  }
  cfg.params = apply_topology(cfg.params, cfg.topology);
  if (opts.param || opts.lo || opts.hi || opts.steps) {
    SweepSpec s = cfg.sweep.value_or(SweepSpec{});
    if (opts.param) {
      const auto id = parse_param(*opts.param);
      if (!id) throw ConfigError("unknown parameter token \"" + *opts.param + "\"");
      s.param = *id;
    }
    if (opts.lo) s.lo = *opts.lo;
    if (opts.hi) s.hi = *opts.hi;
    if (opts.steps) s.steps = *opts.steps;
    cfg.sweep = s;
  }
  cfg.seed = opts.seed;
  if (opts.samples) cfg.samples = *opts.samples;
  if (opts.t_end) cfg.simulate.t_end = *opts.t_end;
  return cfg;
}

void cmd_enumerate(std::ostream& out) {
  out << "topology\tarcs\tzeroed\tstrongly_connected\tequilibria\n";
  for (const auto& t : enumerate_canonical()) {
    std::vector<std::string> arcs, zeroed, labels;
    for (int bit = 0; bit < ArcSet::kPairCount; ++bit) {
      const auto [into, from] = arc_pair(bit);
      if (t.representative.has(into, from)) arcs.push_back("m" + std::to_string(into + 1) + std::to_string(from + 1));
    }
    for (auto z : zeroed_rates(t.id)) zeroed.emplace_back(z);
    for (auto l : admitted_labels(t.id)) labels.emplace_back(to_string(l));
    out << to_string(t.id) << '\t' << join(arcs, ",") << '\t' << (zeroed.empty() ? "-" : join(zeroed, ",")) << '\t'
        << (is_strongly_connected(t.representative) ? "true" : "false") << '\t' << join(labels, ",") << '\n';
  }
}

void cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  FindOptions fo;
  fo.seed = cfg.seed;
  json doc;
  doc["topology"] = std::string(to_string(cfg.topology));
  doc["seed"] = cfg.seed;
  doc["equilibria"] = json::array();
  for (const auto& eq : find_all_equilibria(cfg.topology, cfg.params, fo)) {
    doc["equilibria"].push_back(report_json(eq, classify(cfg.topology, eq, cfg.params)));
  }
  out << doc.dump(2) << '\n';
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.sweep) throw ConfigError("sweep needs --param, --lo, --hi and --steps (or a \"sweep\" config block)");
  const SweepSpec& s = *cfg.sweep;
  SweepOptions so;
  so.find.seed = cfg.seed;
  const auto records = sweep(cfg.topology, cfg.params, s.param, s.lo, s.hi, s.steps, so);

  const std::string name(to_string(s.param));
  out << "# topology=" << to_string(cfg.topology) << " seed=" << cfg.seed << '\n';
  out << "param_name,param_value,eq_label,p1,p2,p3,feasible,class,lead_re,lead_im,crossing\n";
  out << std::setprecision(12);
  auto row = [&](double v, EqLabel label, const Vec3& p, bool feasible, std::string_view cls, const Complex& l,
                 std::string_view crossing) {
    out << name << ',' << v << ',' << to_string(label) << ',' << p(0) << ',' << p(1) << ',' << p(2) << ','
        << (feasible ? "true" : "false") << ',' << cls << ',' << l.real() << ',' << l.imag() << ',' << crossing << '\n';
  };
  std::vector<Crossing> crossings;
  for (const auto& rec : records) {
    for (std::size_t i = 0; i < rec.equilibria.size(); ++i) {
      const auto& eq = rec.equilibria[i];
      const auto& rep = rec.reports[i];
      row(rec.param_value, eq.label, eq.point, eq.feasible, to_string(rep.classification), leading(rep), "");
    }
    crossings.insert(crossings.end(), rec.crossings.begin(), rec.crossings.end());
  }
  std::stable_sort(crossings.begin(), crossings.end(),
                   [](const Crossing& a, const Crossing& b) { return a.param_value < b.param_value; });
  for (const auto& c : crossings) row(c.param_value, c.label, c.point, true, "CROSSING", c.eigenvalue, to_string(c.type));
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const auto& s = cfg.simulate;
  const Trajectory tr = integrate(cfg.params, s.x0, s.t_end, s.rel_tol, s.abs_tol);
  out << "# topology=" << to_string(cfg.topology) << " terminal=" << to_string(tr.terminal) << '\n';
  out << "t,p1,p2,p3\n" << std::setprecision(12);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const Vec3& x = tr.states[i];
    out << tr.times[i] << ',' << x(0) << ',' << x(1) << ',' << x(2) << '\n';
  }
}

void cmd_basin(const RunConfig& cfg, std::ostream& out) {
  const BasinResult res = basin_sample(cfg.topology, cfg.params, cfg.samples, cfg.seed, cfg.simulate.t_end);
  json doc;
  doc["topology"] = std::string(to_string(cfg.topology));
  doc["seed"] = cfg.seed;
  doc["samples"] = cfg.samples;
  doc["fractions"] = res.fractions;
  out << doc.dump(2) << '\n';
}

int cmd_verify(std::uint64_t seed, int n, std::ostream& out) {
  out << "# seed=" << seed << " n=" << n << '\n';
  const auto results = run_verification(seed, n);
  for (const auto& r : results) {
    const char* tag = r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL");
    out << tag << ' ' << r.name << ": " << r.detail << '\n';
  }
  return all_passed(results) ? kExitOk : kExitPropertyFailure;
}

}  // namespace metapop
