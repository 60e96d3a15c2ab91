#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdc/detection.hpp"
#include "spdc/optics.hpp"
#include "spdc/slm.hpp"
#include "spdc/tpa_kernel.hpp"

// YAML run configuration. Every key is validated; unknown keys are errors.
namespace spdc::config {

struct ConfigError : std::runtime_error {
  ConfigError(int line, const std::string& field, const std::string& what);
  int line;  // 1-based, 0 when unknown
  std::string field;
};

enum class SigmaPrimeMode { automatic, match, value };

struct PumpBlock {
  Length fwhm;
  SigmaPrimeMode sigma_prime_mode = SigmaPrimeMode::automatic;
  double sigma_prime_value = 0.0;
  int modes = 1;
  double k0 = 0.0;
  std::optional<double> alpha;
};

struct GridBlock {
  std::size_t points = 512;
  double margin_sigma = 5.0;
};

struct ProvenanceEntry {
  std::string key;
  std::string value;
  bool from_user = false;
};

struct RunConfig {
  optics::PhaseMatchConfig phase_match;  // indices resolved at the degenerate wavelength
  optics::IndexSource indices;
  PumpBlock pump;
  GridBlock grid;
  detection::DetectionGeometry detection;
  std::size_t wavelength_samples = 21;
  slm::SlmGeometry slm;
  std::optional<Length> input_beam_fwhm;
  std::filesystem::path output_directory = "out";
  std::vector<ProvenanceEntry> provenance;

  optics::PumpWidths widths() const;
  /// Offset of k_s - k_i at degeneracy; 0 for collinear.
  double offset_K() const;
  tpa::MultiPeakParams multipeak() const;
  slm::PumpProfileParams pump_profile() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

/// Canonical YAML with every value explicit; parse(emit(c)) emits identically.
std::string emit_normalized(const RunConfig& config);

/// One line per consumed parameter with its provenance.
std::string provenance_log(const RunConfig& config);

}  // namespace spdc::config
