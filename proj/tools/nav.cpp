#include <cstdio>
#include <iostream>
#include <utility>

#include "CLI11.hpp"
#include "zermelo/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Zermelo navigation via Randers geodesics"};
  app.require_subcommand(1);

  zermelo::RunOptions options;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::string trajectory;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "time-optimal path by geodesic interception"},
      {"oracle", "brute-force minimum time over piecewise-constant controls"},
      {"verify", "check a trajectory and certify it against the oracle"},
      {"convert", "tabulate the Randers data along the route"},
      {"quantum", "time-optimal control Hamiltonian for a gate"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--scenario", options.scenario, "scenario file")->required();
    sub->add_option("--out", options.out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "oracle seed override");
    sub->add_option("--dt", dt, "integrator step override");
    if (std::string_view(name) == "verify") {
      sub->add_option("--trajectory", trajectory, "trajectory CSV to verify");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return zermelo::exit_status::parse_error;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) options.seed = seed;
  if (sub->count("--dt")) options.dt = dt;
  if (sub->get_option_no_throw("--trajectory") && sub->count("--trajectory")) options.trajectory = trajectory;

  const auto command = zermelo::parse_command(sub->get_name());
  const zermelo::RunReport report = zermelo::run_command(*command, options);
  std::cout << report.render();
  if (report.error_code != "none") {
    std::fprintf(stderr, "nav: %s: %s\n", report.error_code.c_str(), report.error_message.c_str());
  }
  return report.exit_code;
}
