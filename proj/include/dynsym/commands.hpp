#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynsym/config.hpp"

namespace dynsym {

enum class Command { density, pc, signal, trajectories, density3d };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command c);

// Column-oriented numeric table. CSV cells use 12 significant digits.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  // Throws std::logic_error on ragged columns and DomainError on NaN cells.
  void validate() const;
  std::string to_csv() const;
};

using NamedValues = std::vector<std::pair<std::string, double>>;

struct Summary {
  std::string command;
  std::string fingerprint;
  std::uint64_t seed = 0;
  NamedValues scalars;
  NamedValues tolerances;  // requested targets and achieved error estimates
  double wall_time_s = 0.0;

  std::string to_json() const;
};

struct CommandOutput {
  Table table;
  std::optional<Table> jumps;  // per-trajectory listing, trajectories only
  Summary summary;
};

// Missing command-specific fields raise ConfigError; numerical failures
// propagate as DomainError / ConvergenceError / DivergenceError.
CommandOutput run_command(Command cmd, const ScenarioConfig& cfg);

// Writes the CSV to `out`, the summary to <stem>.summary.json and, when
// present, the trajectory listing to <stem>.jumps.csv. Returns the paths.
std::vector<std::filesystem::path> write_outputs(const CommandOutput& result, const std::filesystem::path& out);

}  // namespace dynsym
