#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spdc/config.hpp"

// Subcommand pipelines behind the command-line tool.
namespace spdc::pipeline {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output.directory
  std::optional<double> idler_center;
  bool wavelength_avg = false;
  std::optional<std::size_t> grid_points;
  bool both_branches = false;
  bool point_slits = false;
};

struct RunResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  std::string summary;  // printed on standard output
};

const std::vector<std::string>& subcommands();

/// Thrown for an unknown subcommand name.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs one subcommand and writes its outputs plus `<subcommand>.log`.
RunResult run(const std::string& subcommand, const config::RunConfig& cfg, const RunOptions& opts);

}  // namespace spdc::pipeline
