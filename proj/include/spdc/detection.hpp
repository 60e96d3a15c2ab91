#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spdc/optics.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/tpa_kernel.hpp"
#include "spdc/units.hpp"

// Slit-scanned singles and coincidence spectra, widths, the Fedorov ratio,
// filter-bandwidth averaging and inter-mode crosstalk.
namespace spdc::detection {

using optics::WavevectorGrid;

/// Far-field detection optics. A slit of width w behind a lens of focal
/// length f accepts dk = k w / f with k = 2 pi n / lambda. A zero slit width
/// denotes a point detector: rates are then the sampled density.
struct DetectionGeometry {
  Length focal_length = Length::mm(100.0);
  Length slit_width_signal = Length::mm(0.2);
  Length slit_width_idler = Length::mm(0.4);
  Length central_wavelength = Length::nm(810.0);
  Length filter_fwhm = Length::nm(10.0);
  double medium_index = 1.0;

  void validate() const;
  double acceptance(Length slit_width) const;
  double signal_acceptance() const { return acceptance(slit_width_signal); }
  double idler_acceptance() const { return acceptance(slit_width_idler); }

  bool operator==(const DetectionGeometry&) const = default;
};

/// |F|^2 (or an incoherent mixture of them) on signal x idler grids.
struct JointIntensity {
  WavevectorGrid grid_s;
  WavevectorGrid grid_i;
  Eigen::MatrixXd density;
};

JointIntensity joint_intensity(const tpa::TpaKernel& kernel);

enum class ScanKind { singles, coincidence };

struct ScanSpectrum {
  std::vector<double> positions;  // rad/um, ascending
  std::vector<double> rates;
  ScanKind kind = ScanKind::singles;
  std::vector<std::string> warnings;
};

/// Weights w_j with sum_j w_j g_j = integral over [center - width/2,
/// center + width/2] of the piecewise-linear interpolant of g. Width 0
/// gives plain interpolation weights.
std::vector<std::pair<std::size_t, double>> slit_weights(const WavevectorGrid& grid, double center,
                                                         double width);

ScanSpectrum singles_scan(const JointIntensity& joint, const DetectionGeometry& geom,
                          std::span<const double> scan_positions);
ScanSpectrum singles_scan(const tpa::TpaKernel& kernel, const DetectionGeometry& geom,
                          std::span<const double> scan_positions);

ScanSpectrum coincidence_scan(const JointIntensity& joint, const DetectionGeometry& geom,
                              double idler_center, std::span<const double> scan_positions);
ScanSpectrum coincidence_scan(const tpa::TpaKernel& kernel, const DetectionGeometry& geom,
                              double idler_center, std::span<const double> scan_positions);

/// Idler-arm singles, used to place the conditioning slit.
ScanSpectrum idler_singles_scan(const JointIntensity& joint, const DetectionGeometry& geom,
                                std::span<const double> scan_positions);

enum class FwhmMethod { interpolate, gaussian_fit };

/// Full width at half maximum. Throws std::domain_error when more than one
/// peak rises above half maximum.
double fwhm_of(const ScanSpectrum& spectrum, FwhmMethod method = FwhmMethod::interpolate);

struct FedorovResult {
  double ratio = 0.0;
  double singles_fwhm = 0.0;
  double coincidence_fwhm = 0.0;
  double idler_center = 0.0;
};

/// FWHM(unconditional signal singles) / FWHM(coincidences with the idler
/// slit at the idler singles maximum).
FedorovResult fedorov_ratio(const JointIntensity& joint, const DetectionGeometry& geom);
FedorovResult fedorov_ratio(const tpa::TpaKernel& kernel, const DetectionGeometry& geom);

/// Index of the largest value; ties go to the position with smaller |k|.
std::size_t argmax_central(std::span<const double> positions, std::span<const double> values);

struct WavelengthSample {
  Length signal;
  Length idler;
  double weight = 0.0;
  double K = 0.0;
};

/// Gaussian passband sampled at n points over +-3 sigma of the filter.
std::vector<WavelengthSample> passband_samples(const optics::PhaseMatchConfig& config,
                                               const optics::IndexSource& indices,
                                               const DetectionGeometry& geom,
                                               std::size_t n_samples);

/// Builds a normalized kernel for offset K on the given (true-wavevector) grids.
using KernelBuilder = std::function<tpa::TpaKernel(double K, const WavevectorGrid& grid_s,
                                                   const WavevectorGrid& grid_i)>;

/// Incoherent filter-weighted average of |F|^2 over the passband. Detector
/// positions are expressed as degenerate-wavelength wavevectors: a photon
/// at lambda seen at detector coordinate q carries q * (2 lambda_p)/lambda.
JointIntensity wavelength_average(const optics::PhaseMatchConfig& config,
                                  const optics::IndexSource& indices,
                                  const DetectionGeometry& geom, const KernelBuilder& builder,
                                  const WavevectorGrid& grid_s, const WavevectorGrid& grid_i,
                                  std::size_t n_samples = 21);

struct CrosstalkMatrix {
  Eigen::MatrixXd linear;      // clamped to [0, 1]
  Eigen::MatrixXd log_values;  // natural log, exact where linear underflows

  Eigen::Index size() const { return linear.rows(); }
  double log10(Eigen::Index m, Eigen::Index n) const;
};

enum class OverlapKind { intensity, amplitude };

/// X_mn = (int I_m I_n)^2 / (int I_m^2 int I_n^2) from log-intensity
/// profiles sampled on a common uniform grid, evaluated with log-sum-exp.
CrosstalkMatrix crosstalk_from_log_intensities(const std::vector<std::vector<double>>& log_profiles);

/// Same quantity evaluated directly on linear intensities.
CrosstalkMatrix crosstalk_linear(const std::vector<std::vector<double>>& intensities);

CrosstalkMatrix crosstalk_matrix(const schmidt::SchmidtDecomposition& dec,
                                 OverlapKind kind = OverlapKind::intensity);

/// Log of the signal singles profile produced by each pump peak on its own.
std::vector<std::vector<double>> multipeak_mode_log_intensities(
    const tpa::MultiPeakParams& params, const WavevectorGrid& grid_s, const WavevectorGrid& grid_i,
    tpa::Branches branches = tpa::Branches::single);

}  // namespace spdc::detection
