#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "alab/config.hpp"
#include "alab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume experiments for random Schroedinger operators on lattices"};
  app.require_subcommand(1, 1);

  alab::RunOptions options;
  std::uint64_t seed = 0;
  for (const std::string& name : alab::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config_path, "JSON configuration")->required();
    sub->add_option("--out", options.out, "output path (default <command>.<format>)");
    sub->add_option("--format", options.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "overrides the disorder seed");
    sub->add_option("--threads", options.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&options, &seed, sub, name] {
      options.command = name;
      if (sub->count("--seed") > 0) options.seed = seed;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return alab::run_experiment(options, std::cerr);
}
