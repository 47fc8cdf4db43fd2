// nehari-forge <eigs|solve|continuation|symmetry|reproduce> --config FILE --out DIR
//              [--resolution N] [--quiet]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nehari/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ground states and least-energy nodal solutions of -Lu + Vu = lambda |u|^{p-2} u"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "nehari-forge 0.1.0");

  std::string config, out;
  int resolution = 0;
  bool quiet = false;

  const std::pair<const char*, const char*> commands[] = {
      {"eigs", "lowest eigenpairs of -Laplace + V"},
      {"solve", "ground state and/or least-energy nodal solution"},
      {"continuation", "follow a branch as p decreases to 2"},
      {"symmetry", "classify a field CSV under the lattice symmetries"},
      {"reproduce", "run the reference experiments and tabulate them"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--resolution", resolution, "lattice intervals per unit length")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", quiet, "no progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nehari::kExitConfigError;
  }

  nehari::RunOptions opts;
  opts.command = *nehari::command_from_string(app.get_subcommands().front()->get_name());
  opts.config_file = config;
  opts.out_dir = out;
  if (resolution > 0) opts.resolution = resolution;
  opts.quiet = quiet;
  return nehari::run(opts, std::cout, std::cerr);
}
