#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spdc/slm.hpp"

namespace spdc::slm {

void PumpProfileParams::validate() const {
  if (M < 1) throw std::invalid_argument("pump: M must be >= 1");
  if (!(sigma_k > 0.0) || !std::isfinite(sigma_k)) {
    throw std::invalid_argument("pump: sigma_k must be positive");
  }
  if (M > 1 && (!(k0 > 0.0) || !std::isfinite(k0))) {
    throw std::invalid_argument("pump: k0 must be positive when M > 1");
  }
  if (alpha) {
    if (M != 3) throw std::invalid_argument("pump: alpha requires M = 3");
    if (!(*alpha > 0.0) || !std::isfinite(*alpha)) {
      throw std::invalid_argument("pump: alpha must be positive");
    }
  }
}

double FieldProfile1D::peak() const {
  double p = 0.0;
  for (const auto& a : amplitude) p = std::max(p, std::abs(a));
  return p;
}

void FieldProfile1D::normalize_peak() {
  const double p = peak();
  if (p == 0.0) throw std::invalid_argument("field is identically zero");
  for (auto& a : amplitude) a /= p;
}

void FieldProfile1D::validate() const {
  if (x.size() != amplitude.size()) throw std::invalid_argument("field: coordinate/sample count mismatch");
  if (x.size() < 2) throw std::invalid_argument("field: need at least two samples");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j]) || !std::isfinite(amplitude[j].real()) ||
        !std::isfinite(amplitude[j].imag())) {
      throw std::invalid_argument("field: non-finite sample");
    }
    if (j > 0 && !(x[j] > x[j - 1])) throw std::invalid_argument("field: coordinates must ascend");
  }
}

std::vector<double> pump_x_grid(const PumpProfileParams& params, std::size_t n,
                                double half_width_factor) {
  params.validate();
  if (n < 2) throw std::invalid_argument("pump grid needs at least two points");
  const double half = half_width_factor / params.sigma_k;
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = -half + 2.0 * half * static_cast<double>(j) / static_cast<double>(n - 1);
  }
  return x;
}

double pump_modulation(const PumpProfileParams& params, double x) {
  if (params.alpha) return 0.5 + *params.alpha * std::cos(2.0 * params.k0 * x);
  double s = 0.0;
  for (double c : tpa::peak_centers(params.M, params.k0)) s += std::cos(2.0 * c * x);
  return s;
}

FieldProfile1D pump_field(const PumpProfileParams& params, const std::vector<double>& x) {
  params.validate();
  FieldProfile1D out{x, std::vector<cplx>(x.size())};
  const double s2 = params.sigma_k * params.sigma_k;
  for (std::size_t j = 0; j < x.size(); ++j) {
    out.amplitude[j] = pump_modulation(params, x[j]) * std::exp(-0.5 * x[j] * x[j] * s2);
  }
  out.validate();
  out.normalize_peak();
  return out;
}

tpa::PumpSpectrum angular_spectrum(const FieldProfile1D& field, const optics::WavevectorGrid& grid) {
  field.validate();
  const std::size_t n = field.size();
  std::vector<double> dx(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = field.x[j == 0 ? 0 : j - 1];
    const double hi = field.x[j + 1 == n ? j : j + 1];
    dx[j] = 0.5 * (hi - lo);
  }
  tpa::PumpSpectrum out{grid, std::vector<cplx>(grid.size())};
  for (std::size_t q = 0; q < grid.size(); ++q) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += field.amplitude[j] * std::polar(dx[j], -grid[q] * field.x[j]);
    }
    out.amplitude[q] = acc;
  }
  out.normalize();
  return out;
}

}  // namespace spdc::slm
