// Command-line front end: spdc_sim <subcommand> --config FILE [flags]
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "spdc/config.hpp"
#include "spdc/io.hpp"
#include "spdc/pipeline.hpp"

namespace {

enum Exit { ok = 0, internal = 1, usage = 2, config_error = 3, invalid = 4, io_error = 5 };

const char* exit_help =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (bad flags or subcommand)\n"
    "  3  configuration error (unknown/missing key, invalid value)\n"
    "  4  invalid parameter or numerical failure during the run\n"
    "  5  file input/output error\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biphoton angular-spectrum simulator"};
  app.footer(exit_help);

  std::string sub;
  std::string config_path;
  spdc::pipeline::RunOptions opts;
  std::string out_dir;
  double idler_center = 0.0;
  std::size_t grid_points = 0;

  std::string names;
  for (const auto& n : spdc::pipeline::subcommands()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("subcommand", sub, "one of: " + names)
      ->required()
      ->check(CLI::IsMember(spdc::pipeline::subcommands()));
  app.add_option("--config", config_path, "YAML run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  auto* idler_opt = app.add_option("--idler-center", idler_center,
                                   "scan: idler slit position in rad/um; switches to coincidences");
  app.add_flag("--wavelength-avg", opts.wavelength_avg, "average over the filter passband");
  auto* grid_opt = app.add_option("--grid-points", grid_points, "points per wavevector axis");
  app.add_flag("--both-branches", opts.both_branches, "keep both noncollinear emission branches");
  app.add_flag("--point-slits", opts.point_slits, "zero-width slits (point detectors)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }
  if (*out_opt) opts.out_dir = out_dir;
  if (*idler_opt) opts.idler_center = idler_center;
  if (*grid_opt) opts.grid_points = grid_points;

  try {
    const auto cfg = spdc::config::parse_config(config_path);
    const auto result = spdc::pipeline::run(sub, cfg, opts);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << result.summary;
    return ok;
  } catch (const spdc::config::ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return config_error;
  } catch (const spdc::io::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return io_error;
  } catch (const spdc::pipeline::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return io_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return invalid;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return invalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return invalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return internal;
  }
}
