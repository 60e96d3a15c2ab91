#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spdc/optics.hpp"

namespace spdc::tpa {

using optics::PumpWidths;
using optics::WavevectorGrid;

/// Discretized two-photon amplitude F(k_s, k_i). Rows index the signal
/// grid, columns the idler grid.
struct TpaKernel {
  WavevectorGrid grid_s;
  WavevectorGrid grid_i;
  Eigen::MatrixXd amplitude;
  bool normalized = false;
  std::vector<std::string> warnings;

  /// sum |F|^2 dk_s dk_i
  double norm_squared() const;
};

/// Rescale so that sum |F|^2 dk_s dk_i = 1. Throws on an all-zero kernel.
TpaKernel normalize(TpaKernel kernel);

enum class Branches { single, both };

struct MultiPeakParams {
  int M = 1;
  double k0 = 0.0;  // far-field (signal) peak spacing
  double K = 0.0;   // noncollinear offset of k_s - k_i
  PumpWidths widths;
  std::optional<double> alpha;  // central weight 1/2, side weights alpha/2 (M = 3)

  void validate() const;
};

/// Far-field peak positions k(m) = (M-1-2m) k0/2, m = 0..M-1. The pump
/// angular spectrum of peak m sits at 2 k(m) so that signal peaks are k0 apart.
std::vector<double> peak_centers(int M, double k0);

/// Relative pump amplitudes of the M peaks.
std::vector<double> peak_weights(const MultiPeakParams& params);

struct PumpSpectrum {
  WavevectorGrid grid;
  std::vector<std::complex<double>> amplitude;

  /// Normalize to sum |v|^2 dk = 1.
  void normalize();
};

enum class PhaseMatchModel { sinc, gaussian };

/// Shape of the phase-matching factor as a function of k_s - k_i.
struct PhaseMatchProfile {
  optics::Regime regime = optics::Regime::noncollinear;
  double K = 0.0;
  double sigma_prime = 0.0;
};

PhaseMatchProfile phase_match_profile(const optics::PhaseMatchConfig& config);

/// Phase-matching factor at difference coordinate d = k_s - k_i.
double phase_match_factor(const PhaseMatchProfile& profile, double d, PhaseMatchModel model,
                          Branches branches);

TpaKernel build_double_gaussian(const PumpWidths& widths, const WavevectorGrid& grid_s,
                                const WavevectorGrid& grid_i);

TpaKernel build_multipeak(const MultiPeakParams& params, const WavevectorGrid& grid_s,
                          const WavevectorGrid& grid_i, Branches branches = Branches::single);

TpaKernel build_from_pump(const PumpSpectrum& pump, const PhaseMatchProfile& profile,
                          const WavevectorGrid& grid_s, const WavevectorGrid& grid_i,
                          PhaseMatchModel model, Branches branches = Branches::single);

TpaKernel build_from_pump(const PumpSpectrum& pump, const optics::PhaseMatchConfig& config,
                          const WavevectorGrid& grid_s, const WavevectorGrid& grid_i,
                          PhaseMatchModel model, Branches branches = Branches::single);

enum class Axis { signal, idler };

/// I(k) = sum over the other axis of |F|^2 dk.
std::vector<double> marginal_intensity(const TpaKernel& kernel, Axis which);

/// Default grids: n points per axis spanning `margin` * max(sigma) beyond
/// the outermost peak of each axis.
std::pair<WavevectorGrid, WavevectorGrid> default_grids(const MultiPeakParams& params,
                                                        std::size_t n_points = 512,
                                                        double margin = 5.0,
                                                        Branches branches = Branches::single);

}  // namespace spdc::tpa
