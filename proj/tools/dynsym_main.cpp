#include <cstdint>
#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "dynsym/commands.hpp"
#include "dynsym/config.hpp"
#include "dynsym/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision-time densities, jump trajectories and detector signals for two Gaussian wavepackets"};
  app.require_subcommand(1, 1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  int grid_points = 0;
  for (const auto* name : {"density", "pc", "signal", "trajectories", "density3d"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "CSV output path; the summary goes next to it")->required();
    sub->add_option("--seed", seed, "override mc.seed");
    sub->add_option("--grid-points", grid_points, "override grid.points")->check(CLI::Range(2, 100000000));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  const auto* sub = app.get_subcommands().front();
  const auto cmd = dynsym::parse_command(sub->get_name());
  try {
    auto cfg = dynsym::load_config(config_path);
    if (sub->count("--seed")) cfg.mc.seed = seed;
    if (sub->count("--grid-points")) cfg.grid.points = grid_points;
    const auto result = dynsym::run_command(*cmd, cfg);
    for (const auto& p : dynsym::write_outputs(result, out_path)) std::cout << p.string() << '\n';
    return 0;
  } catch (const dynsym::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
}
