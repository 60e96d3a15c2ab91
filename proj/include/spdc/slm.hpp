#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spdc/optics.hpp"
#include "spdc/tpa_kernel.hpp"

// Crystal-plane pump profiles and their phase-only SLM holograms.
namespace spdc::slm {

using cplx = std::complex<double>;

struct PumpProfileParams {
  int M = 1;
  double k0 = 0.0;       // far-field signal peak spacing
  double sigma_k = 0.0;  // envelope width, rad/um
  std::optional<double> alpha;

  void validate() const;
};

struct FieldProfile1D {
  std::vector<double> x;  // um
  std::vector<cplx> amplitude;

  std::size_t size() const { return x.size(); }
  double peak() const;
  void normalize_peak();
  void validate() const;
};

/// Uniform grid of n points over +-half_width_factor / sigma_k.
std::vector<double> pump_x_grid(const PumpProfileParams& params, std::size_t n,
                                double half_width_factor = 4.0);

/// Real crystal-plane modulation without the Gaussian envelope.
double pump_modulation(const PumpProfileParams& params, double x);

/// Crystal-plane pump field, peak amplitude 1.
FieldProfile1D pump_field(const PumpProfileParams& params, const std::vector<double>& x);

/// v(q) = sum_x E(x) exp(-i q x) dx on the given grid, normalized.
tpa::PumpSpectrum angular_spectrum(const FieldProfile1D& field, const optics::WavevectorGrid& grid);

struct HologramImage {
  int width = 0;
  int height = 0;
  double pixel_pitch_um = 8.0;
  int grating_period_px = 6;
  std::vector<std::uint8_t> levels;  // row-major, level/256 of a full turn

  std::uint8_t at(int col, int row) const {
    return levels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
  void validate() const;
  bool operator==(const HologramImage&) const = default;
};

struct SlmGeometry {
  int width = 1920;
  int height = 1080;
  double pixel_pitch_um = 8.0;
  int grating_period_px = 6;
  double magnification = 16.0;  // SLM size / crystal-plane size of the relay

  void validate() const;
  /// Crystal-plane coordinate imaged from each SLM column.
  std::vector<double> crystal_coordinates() const;
  /// SLM-plane coordinate of each column.
  std::vector<double> slm_coordinates() const;
};

/// Target resampled onto the SLM columns (linear interpolation, zero outside).
std::vector<cplx> resample_to_columns(const FieldProfile1D& target, const SlmGeometry& geom);

/// x in [-pi, 0] with sin(x)/x = a, for a in [0, 1].
double inverse_sinc(double a);

/// Continuous phase of one hologram row, in [0, 2 pi).
std::vector<double> hologram_phase_row(const std::vector<cplx>& target_columns,
                                       const SlmGeometry& geom);

HologramImage encode_hologram(const FieldProfile1D& target, const SlmGeometry& geom);

enum class DiffractionOrder { first, zero };

/// Field in the crystal plane after the Fourier-filtered relay, sampled at
/// the SLM columns. `phase` is one hologram row in radians.
FieldProfile1D simulate_order(const std::vector<double>& phase, const std::vector<cplx>& input_beam,
                              const SlmGeometry& geom, DiffractionOrder order);

/// Same, reading the central row of a quantized image.
FieldProfile1D simulate_first_order(const HologramImage& holo, const FieldProfile1D& input_beam,
                                    double magnification,
                                    DiffractionOrder order = DiffractionOrder::first);

/// Input beam on the SLM columns: flat, or Gaussian with the given intensity FWHM.
FieldProfile1D input_beam(const SlmGeometry& geom, std::optional<Length> intensity_fwhm);

/// |<a,b>| / (|a| |b|) on a shared sampling.
double field_overlap(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Overlap of the moduli |a| and |b|, ignoring phase.
double amplitude_overlap(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Intensity of the central maximum over the mean of its two neighbouring
/// maxima; maxima below 5% of the peak are ignored.
double center_side_ratio(const FieldProfile1D& field);

/// FWHM of the Gaussian amplitude envelope, after dividing out the known modulation.
double envelope_fwhm(const FieldProfile1D& field, const PumpProfileParams& params);

void export_pgm(const HologramImage& holo, const std::filesystem::path& path);
HologramImage import_pgm(const std::filesystem::path& path, double pixel_pitch_um,
                         int grating_period_px);

}  // namespace spdc::slm
