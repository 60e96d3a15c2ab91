#include <cmath>
#include <stdexcept>

#include "spdc/detection.hpp"

namespace spdc::detection {

std::vector<WavelengthSample> passband_samples(const optics::PhaseMatchConfig& config,
                                               const optics::IndexSource& indices,
                                               const DetectionGeometry& geom,
                                               std::size_t n_samples) {
  geom.validate();
  if (n_samples == 0) throw std::invalid_argument("need at least one wavelength sample");
  const double center = geom.central_wavelength.in_um();
  const double sigma = geom.filter_fwhm.in_um() / (2.0 * std::sqrt(2.0 * std::log(2.0)));

  std::vector<double> lambdas;
  if (sigma == 0.0 || n_samples == 1) {
    lambdas.push_back(center);
  } else {
    const double step = 6.0 * sigma / static_cast<double>(n_samples - 1);
    for (std::size_t j = 0; j < n_samples; ++j) {
      lambdas.push_back(center + (static_cast<double>(j) - (n_samples - 1) / 2.0) * step);
    }
  }

  std::vector<WavelengthSample> out;
  double total = 0.0;
  for (double l : lambdas) {
    WavelengthSample s;
    s.signal = Length::um(l);
    s.idler = optics::idler_wavelength(config.pump_wavelength, s.signal);
    s.weight = sigma == 0.0 ? 1.0 : std::exp(-(l - center) * (l - center) / (2.0 * sigma * sigma));
    if (config.regime == optics::Regime::noncollinear) {
      const auto n = optics::indices_at(indices, config.pump_wavelength, s.signal);
      s.K = optics::transverse_K_at(n.signal, n.idler, n.pump, config.pump_wavelength, s.signal);
    }
    total += s.weight;
    out.push_back(s);
  }
  for (auto& s : out) s.weight /= total;
  return out;
}

JointIntensity wavelength_average(const optics::PhaseMatchConfig& config,
                                  const optics::IndexSource& indices,
                                  const DetectionGeometry& geom, const KernelBuilder& builder,
                                  const WavevectorGrid& grid_s, const WavevectorGrid& grid_i,
                                  std::size_t n_samples) {
  const double reference = 2.0 * config.pump_wavelength.in_um();
  JointIntensity out{grid_s, grid_i,
                     Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid_s.size()),
                                           static_cast<Eigen::Index>(grid_i.size()))};
  for (const auto& s : passband_samples(config, indices, geom, n_samples)) {
    const double scale_s = reference / s.signal.in_um();
    const double scale_i = reference / s.idler.in_um();
    const tpa::TpaKernel k = builder(s.K, grid_s.scaled(scale_s), grid_i.scaled(scale_i));
    // density per unit detector coordinate
    out.density += (s.weight * scale_s * scale_i) * k.amplitude.array().square().matrix();
  }
  return out;
}

}  // namespace spdc::detection
