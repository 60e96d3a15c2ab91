#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spdc/schmidt.hpp"

namespace spdc::schmidt {

SampledMode hermite_gauss(int n, double w, const WavevectorGrid& grid, double center) {
  if (n < 0) throw std::invalid_argument("Hermite-Gauss order must be non-negative");
  if (!(w > 0.0)) throw std::invalid_argument("Hermite-Gauss scale must be positive");

  SampledMode out;
  out.values.resize(grid.size());
  const double norm0 = 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * w);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = (grid[i] - center) / w;
    // orthonormal Hermite functions; avoids overflow of H_n for large n
    double prev = 0.0;
    double cur = norm0 * std::exp(-x * x / 2.0);
    for (int j = 0; j < n; ++j) {
      const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(double(j) / (j + 1)) * prev;
      prev = cur;
      cur = next;
    }
    out.values[i] = cur;
  }

  double energy = 0.0;
  for (double v : out.values) energy += v * v;
  energy *= grid.spacing();
  if (energy < 1.0 - 1e-6) {
    std::ostringstream msg;
    msg << "grid holds only " << energy << " of the HG" << n << " mode energy";
    out.warnings.push_back(msg.str());
  }
  if (!(energy > 0.0)) throw std::invalid_argument("Hermite-Gauss mode vanishes on the grid");
  const double s = 1.0 / std::sqrt(energy);
  for (double& v : out.values) v *= s;
  return out;
}

AnalyticSchmidt analytic_double_gaussian(const PumpWidths& widths, std::size_t m_max,
                                         const WavevectorGrid& grid_s,
                                         const WavevectorGrid& grid_i) {
  widths.validate();
  const double s = widths.sigma_k;
  const double sp = widths.sigma_k_prime;

  AnalyticSchmidt out;
  const double t = (sp - s) / (sp + s);
  out.mu = t * t;
  out.schmidt_number = (s * s + sp * sp) / (2.0 * s * sp);
  out.mode_width = std::sqrt(s * sp / 2.0);

  const auto m_count = static_cast<Eigen::Index>(m_max);
  out.signal_modes.resize(static_cast<Eigen::Index>(grid_s.size()), m_count);
  out.idler_modes.resize(static_cast<Eigen::Index>(grid_i.size()), m_count);
  for (std::size_t m = 0; m < m_max; ++m) {
    out.eigenvalues.push_back((1.0 - out.mu) * std::pow(out.mu, static_cast<double>(m)));
    const auto fs = hermite_gauss(static_cast<int>(m), out.mode_width, grid_s);
    const auto fi = hermite_gauss(static_cast<int>(m), out.mode_width, grid_i);
    // anticorrelated kernels (s' > s) alternate the idler sign
    const double sign = (sp > s && m % 2 == 1) ? -1.0 : 1.0;
    const auto col = static_cast<Eigen::Index>(m);
    for (std::size_t i = 0; i < grid_s.size(); ++i) {
      out.signal_modes(static_cast<Eigen::Index>(i), col) = fs.values[i];
    }
    for (std::size_t i = 0; i < grid_i.size(); ++i) {
      out.idler_modes(static_cast<Eigen::Index>(i), col) = sign * fi.values[i];
    }
  }
  return out;
}

}  // namespace spdc::schmidt
