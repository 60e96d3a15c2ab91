#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>

#include "spdc/units.hpp"

// Phase-matching constants, transverse-wavevector grids and refractive
// indices. Transverse wavevectors are in rad/um throughout.
namespace spdc::optics {

enum class Regime { collinear, noncollinear };

struct PhaseMatchConfig {
  Length crystal_length;
  Length pump_wavelength;
  double signal_index = 0.0;
  double pump_index = 0.0;
  Regime regime = Regime::noncollinear;

  // Gaussian fits of sinc(x^2) and sinc(x) respectively.
  static constexpr double gamma1 = 0.249;
  static constexpr double gamma2 = 0.195;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  bool operator==(const PhaseMatchConfig&) const = default;
};

/// Uniformly spaced transverse-wavevector axis, endpoints included.
class WavevectorGrid {
public:
  WavevectorGrid(double k_min, double k_max, std::size_t n_points);

  /// Grid of `n_points` centred on `center` with half-width `half_span`.
  static WavevectorGrid centered(double center, double half_span, std::size_t n_points);

  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return (k_max_ - k_min_) / static_cast<double>(n_ - 1); }
  double operator[](std::size_t i) const;
  bool contains(double k) const { return k >= k_min_ && k <= k_max_; }

  /// Same number of points with both endpoints multiplied by `factor`.
  WavevectorGrid scaled(double factor) const;

  bool operator==(const WavevectorGrid&) const = default;

private:
  double k_min_;
  double k_max_;
  std::size_t n_;
};

struct PumpWidths {
  double sigma_k = 0.0;        // pump angular-spectrum width
  double sigma_k_prime = 0.0;  // phase-matching width

  void validate() const;
  bool operator==(const PumpWidths&) const = default;
};

/// sigma_k of a Gaussian pump field whose amplitude FWHM is `fwhm`.
/// Convention: field exp(-x^2/(2 sx^2)) has spectrum exp(-k^2/(2 sk^2)), sk = 1/sx.
double fwhm_to_sigma_k(Length fwhm);
Length sigma_k_to_fwhm(double sigma_k);

/// Width of the Gaussian surrogate of the phase-matching function.
double sigma_prime(const PhaseMatchConfig& config);

struct NoncollinearOffset {
  double K = 0.0;         // offset of k_s - k_i on the emission branch
  double theta_s0 = 0.0;  // internal signal angle at degeneracy, rad
};

/// Degenerate noncollinear offset. The signal transverse wavevector on the
/// branch is K/2 = k_s sin(theta_s0).
NoncollinearOffset transverse_K(const PhaseMatchConfig& config);

/// Paraxial offset K = 2*kappa for a nondegenerate pair with
/// 1/lambda_s + 1/lambda_i = 1/lambda_p; reduces to transverse_K at degeneracy.
double transverse_K_at(double n_signal, double n_idler, double n_pump,
                       Length pump_wavelength, Length signal_wavelength);

/// Idler wavelength from energy conservation.
Length idler_wavelength(Length pump_wavelength, Length signal_wavelength);

/// n^2 = A + B/(lambda^2 - C) - D lambda^2, lambda in um.
struct SellmeierAxis {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  bool operator==(const SellmeierAxis&) const = default;
};

/// Uniaxial crystal dispersion with its declared validity window.
struct SellmeierCrystal {
  SellmeierAxis ordinary;
  SellmeierAxis extraordinary;
  Length valid_min;
  Length valid_max;
  bool operator==(const SellmeierCrystal&) const = default;
};

struct IndexPair {
  double ordinary = 0.0;
  double extraordinary = 0.0;  // at the requested propagation angle
};

/// Ordinary index and angle-tuned extraordinary index,
/// 1/n_e(theta)^2 = cos^2/n_o^2 + sin^2/n_e^2.
IndexPair refractive_indices(const SellmeierCrystal& crystal, Length wavelength, double angle);

/// Type-I (e -> o + o) crystal cut at `cut_angle` to the optic axis.
struct SellmeierSource {
  SellmeierCrystal crystal;
  double cut_angle = 0.0;  // rad
  bool operator==(const SellmeierSource&) const = default;
};

struct ConstantIndices {
  double signal = 0.0;
  double pump = 0.0;
  bool operator==(const ConstantIndices&) const = default;
};

using IndexSource = std::variant<ConstantIndices, SellmeierSource>;

struct PairIndices {
  double signal = 0.0;
  double idler = 0.0;
  double pump = 0.0;
};

/// Indices of signal, idler (ordinary) and pump (extraordinary at the cut).
PairIndices indices_at(const IndexSource& source, Length pump_wavelength,
                       Length signal_wavelength);

/// Exit angle in air of a ray travelling at `internal` inside medium `n`.
double external_angle(double internal, double n);

}  // namespace spdc::optics
