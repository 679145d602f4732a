#include "metapop/commands.hpp"
#include "metapop/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace metapop;

int main(int argc, char** argv) {
  CLI::App app{"Three-patch metapopulation analysis"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::string out_path;
  int verify_n = 200;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON configuration file");
    sub->add_option("--topology", opts.topology, "topology token, overrides the config");
    sub->add_option("--seed", opts.seed, "random seed")->default_val(0);
    sub->add_option("--out", out_path, "write output here instead of stdout");
  };

  auto* enumerate = app.add_subcommand("enumerate", "list the 13 canonical topologies");
  enumerate->add_option("--out", out_path, "write output here instead of stdout");

  auto* analyze = app.add_subcommand("analyze", "equilibria and stability as JSON");
  add_common(analyze);

  auto* sweep = app.add_subcommand("sweep", "one-parameter sweep as CSV");
  add_common(sweep);
  sweep->add_option("--param", opts.param, "parameter token (r1..m32)");
  sweep->add_option("--lo", opts.lo, "lower end of the range");
  sweep->add_option("--hi", opts.hi, "upper end of the range");
  sweep->add_option("--steps", opts.steps, "number of grid values (>= 2)");

  auto* simulate = app.add_subcommand("simulate", "trajectory as CSV");
  add_common(simulate);
  simulate->add_option("--t-end", opts.t_end, "integration horizon");

  auto* basin = app.add_subcommand("basin", "attraction fractions as JSON");
  add_common(basin);
  basin->add_option("--samples", opts.samples, "number of starting points");
  basin->add_option("--t-end", opts.t_end, "integration horizon per start");

  auto* verify = app.add_subcommand("verify", "run the property battery");
  verify->add_option("--seed", opts.seed, "random seed")->default_val(0);
  verify->add_option("--samples", verify_n, "draws per randomized property")->default_val(200);
  verify->add_option("--out", out_path, "write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot open " << out_path << " for writing\n";
      return kExitUsage;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file;

  try {
    if (*enumerate) {
      cmd_enumerate(out);
    } else if (*verify) {
      if (verify_n < 1) throw ConfigError("--samples must be >= 1");
      return cmd_verify(opts.seed, verify_n, out);
    } else {
      const RunConfig cfg = resolve_config(opts);
      if (*analyze) cmd_analyze(cfg, out);
      else if (*sweep) cmd_sweep(cfg, out);
      else if (*simulate) cmd_simulate(cfg, out);
      else if (*basin) cmd_basin(cfg, out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPropertyFailure;
  }
  return kExitOk;
}
