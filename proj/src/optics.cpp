#include "spdc/optics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdc::optics {

namespace {

const double fwhm_factor = 2.0 * std::sqrt(2.0 * std::log(2.0));

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double sellmeier_index(const SellmeierAxis& axis, double lambda_um) {
  const double l2 = lambda_um * lambda_um;
  const double n2 = axis.A + axis.B / (l2 - axis.C) - axis.D * l2;
  require(n2 > 0.0 && std::isfinite(n2), "Sellmeier evaluation gave non-positive n^2");
  return std::sqrt(n2);
}

}  // namespace

void PhaseMatchConfig::validate() const {
  require(crystal_length.in_um() > 0.0, "crystal_length must be positive");
  require(pump_wavelength.in_um() > 0.0, "pump_wavelength must be positive");
  require(pump_index > 0.0, "pump_index must be positive");
  require(signal_index > 0.0, "signal_index must be positive");
  if (regime == Regime::noncollinear) {
    require(signal_index > pump_index,
            "noncollinear regime needs n_s > n_p: radicand 2*n_s*(n_s-n_p) must be positive");
  }
}

WavevectorGrid::WavevectorGrid(double k_min, double k_max, std::size_t n_points)
    : k_min_(k_min), k_max_(k_max), n_(n_points) {
  require(std::isfinite(k_min) && std::isfinite(k_max), "grid bounds must be finite");
  require(k_min < k_max, "grid needs k_min < k_max");
  require(n_points >= 16, "grid needs at least 16 points");
}

WavevectorGrid WavevectorGrid::centered(double center, double half_span, std::size_t n_points) {
  return WavevectorGrid(center - half_span, center + half_span, n_points);
}

double WavevectorGrid::operator[](std::size_t i) const {
  return k_min_ + static_cast<double>(i) * spacing();
}

WavevectorGrid WavevectorGrid::scaled(double factor) const {
  require(factor > 0.0, "grid scale factor must be positive");
  return WavevectorGrid(k_min_ * factor, k_max_ * factor, n_);
}

void PumpWidths::validate() const {
  require(sigma_k > 0.0 && std::isfinite(sigma_k), "sigma_k must be positive");
  require(sigma_k_prime > 0.0 && std::isfinite(sigma_k_prime), "sigma_k_prime must be positive");
}

double fwhm_to_sigma_k(Length fwhm) {
  require(fwhm.in_um() > 0.0, "FWHM must be positive");
  return fwhm_factor / fwhm.in_um();
}

Length sigma_k_to_fwhm(double sigma_k) {
  require(sigma_k > 0.0, "sigma_k must be positive");
  return Length::um(fwhm_factor / sigma_k);
}

double sigma_prime(const PhaseMatchConfig& config) {
  config.validate();
  const double L = config.crystal_length.in_um();
  if (config.regime == Regime::collinear) {
    const double k_p = wavenumber(config.pump_index, config.pump_wavelength);
    return std::sqrt(4.0 * k_p / (PhaseMatchConfig::gamma1 * L));
  }
  const double dn = config.signal_index - config.pump_index;
  return std::sqrt(config.signal_index) / (L * std::sqrt(dn * PhaseMatchConfig::gamma2));
}

NoncollinearOffset transverse_K(const PhaseMatchConfig& config) {
  const double n_s = config.signal_index;
  const double n_p = config.pump_index;
  const double radicand = 2.0 * n_s * (n_s - n_p);
  require(radicand >= 0.0, "transverse K: radicand 2*n_s*(n_s-n_p) is negative");
  const double lp = config.pump_wavelength.in_um();
  require(lp > 0.0, "pump_wavelength must be positive");

  NoncollinearOffset out;
  out.K = two_pi * std::sqrt(radicand) / lp;
  const double k_s = wavenumber(n_s, Length::um(2.0 * lp));
  const double s = out.K / (2.0 * k_s);
  require(s <= 1.0, "transverse K exceeds the signal wavenumber");
  out.theta_s0 = std::asin(s);
  return out;
}

Length idler_wavelength(Length pump_wavelength, Length signal_wavelength) {
  const double inv = 1.0 / pump_wavelength.in_um() - 1.0 / signal_wavelength.in_um();
  require(inv > 0.0, "signal wavelength must exceed the pump wavelength");
  return Length::um(1.0 / inv);
}

double transverse_K_at(double n_signal, double n_idler, double n_pump, Length pump_wavelength,
                       Length signal_wavelength) {
  const Length li = idler_wavelength(pump_wavelength, signal_wavelength);
  const double k_s = wavenumber(n_signal, signal_wavelength);
  const double k_i = wavenumber(n_idler, li);
  const double k_p = wavenumber(n_pump, pump_wavelength);
  const double kappa2 = 2.0 * (k_s + k_i - k_p) * k_s * k_i / (k_s + k_i);
  require(kappa2 >= 0.0, "no noncollinear phase matching at this wavelength");
  return 2.0 * std::sqrt(kappa2);
}

IndexPair refractive_indices(const SellmeierCrystal& crystal, Length wavelength, double angle) {
  if (wavelength < crystal.valid_min || wavelength > crystal.valid_max) {
    throw std::out_of_range("wavelength " + std::to_string(wavelength.in_nm()) +
                            " nm is outside the Sellmeier validity window");
  }
  const double lum = wavelength.in_um();
  const double n_o = sellmeier_index(crystal.ordinary, lum);
  const double n_e = sellmeier_index(crystal.extraordinary, lum);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double inv2 = c * c / (n_o * n_o) + s * s / (n_e * n_e);
  return {n_o, 1.0 / std::sqrt(inv2)};
}

PairIndices indices_at(const IndexSource& source, Length pump_wavelength,
                       Length signal_wavelength) {
  if (const auto* fixed = std::get_if<ConstantIndices>(&source)) {
    return {fixed->signal, fixed->signal, fixed->pump};
  }
  const auto& sm = std::get<SellmeierSource>(source);
  const Length li = idler_wavelength(pump_wavelength, signal_wavelength);
  return {refractive_indices(sm.crystal, signal_wavelength, sm.cut_angle).ordinary,
          refractive_indices(sm.crystal, li, sm.cut_angle).ordinary,
          refractive_indices(sm.crystal, pump_wavelength, sm.cut_angle).extraordinary};
}

double external_angle(double internal, double n) {
  const double s = n * std::sin(internal);
  require(std::abs(s) <= 1.0, "total internal reflection at the exit face");
  return std::asin(s);
}

}  // namespace spdc::optics
