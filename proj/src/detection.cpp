#include "spdc/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/NonLinearOptimization>

namespace spdc::detection {

namespace {

const double fwhm_factor = 2.0 * std::sqrt(2.0 * std::log(2.0));

using Weights = std::vector<std::pair<std::size_t, double>>;

double weigh(const Weights& w, const std::vector<double>& values) {
  double acc = 0.0;
  for (const auto& [j, wj] : w) acc += wj * values[j];
  return acc;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Keep scan positions that fall on the grid; warn about the rest.
std::vector<double> clip_positions(std::span<const double> positions, const WavevectorGrid& grid,
                                   std::vector<std::string>& warnings) {
  std::vector<double> kept;
  kept.reserve(positions.size());
  for (double p : positions) {
    if (grid.contains(p)) kept.push_back(p);
  }
  if (kept.size() != positions.size()) {
    std::ostringstream msg;
    msg << positions.size() - kept.size() << " scan positions lie outside the kernel grid ["
        << grid.k_min() << ", " << grid.k_max() << "] and were dropped";
    warnings.push_back(msg.str());
  }
  return kept;
}

ScanSpectrum scan_marginal(const std::vector<double>& marginal, const WavevectorGrid& grid,
                           double width, std::span<const double> scan_positions) {
  ScanSpectrum out;
  out.kind = ScanKind::singles;
  out.positions = clip_positions(scan_positions, grid, out.warnings);
  out.rates.reserve(out.positions.size());
  for (double p : out.positions) {
    out.rates.push_back(std::max(0.0, weigh(slit_weights(grid, p, width), marginal)));
  }
  return out;
}

struct GaussianResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>& x;
  const std::vector<double>& y;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(x.size()); }

  // p = (amplitude, center, sigma)
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (x[i] - p(1)) / p(2);
      r(static_cast<Eigen::Index>(i)) = p(0) * std::exp(-0.5 * u * u) - y[i];
    }
    return 0;
  }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (x[i] - p(1)) / p(2);
      const double g = std::exp(-0.5 * u * u);
      const auto row = static_cast<Eigen::Index>(i);
      J(row, 0) = g;
      J(row, 1) = p(0) * g * u / p(2);
      J(row, 2) = p(0) * g * u * u / p(2);
    }
    return 0;
  }
};

}  // namespace

void DetectionGeometry::validate() const {
  if (!(focal_length.in_um() > 0.0)) throw std::invalid_argument("focal_length must be positive");
  if (slit_width_signal.in_um() < 0.0 || slit_width_idler.in_um() < 0.0) {
    throw std::invalid_argument("slit widths must be non-negative");
  }
  if (!(central_wavelength.in_um() > 0.0)) {
    throw std::invalid_argument("central_wavelength must be positive");
  }
  if (filter_fwhm.in_um() < 0.0) throw std::invalid_argument("filter_fwhm must be non-negative");
  if (!(medium_index > 0.0)) throw std::invalid_argument("medium_index must be positive");
}

double DetectionGeometry::acceptance(Length slit_width) const {
  return wavenumber(medium_index, central_wavelength) * slit_width.in_um() / focal_length.in_um();
}

JointIntensity joint_intensity(const tpa::TpaKernel& kernel) {
  return {kernel.grid_s, kernel.grid_i, kernel.amplitude.array().square().matrix()};
}

std::vector<std::pair<std::size_t, double>> slit_weights(const WavevectorGrid& grid, double center,
                                                         double width) {
  if (width < 0.0) throw std::invalid_argument("slit width must be non-negative");
  const double dk = grid.spacing();
  const std::size_t last = grid.size() - 1;
  Weights w;
  if (width == 0.0) {
    if (!grid.contains(center)) return w;
    const double t = (center - grid.k_min()) / dk;
    const auto j = std::min(static_cast<std::size_t>(std::floor(t)), last - 1);
    const double f = t - static_cast<double>(j);
    w.emplace_back(j, 1.0 - f);
    w.emplace_back(j + 1, f);
    return w;
  }
  const double a = std::max(center - width / 2.0, grid.k_min());
  const double b = std::min(center + width / 2.0, grid.k_max());
  if (!(b > a)) return w;
  const auto first = std::min(static_cast<std::size_t>(std::floor((a - grid.k_min()) / dk)), last - 1);
  const auto stop = std::min(static_cast<std::size_t>(std::ceil((b - grid.k_min()) / dk)), last);
  std::vector<double> acc(stop - first + 1, 0.0);
  for (std::size_t j = first; j < stop; ++j) {
    const double kj = grid[j];
    const double tu = std::clamp((a - kj) / dk, 0.0, 1.0);
    const double tv = std::clamp((b - kj) / dk, 0.0, 1.0);
    if (tv <= tu) continue;
    const double lin = tv - tu;
    const double quad = (tv * tv - tu * tu) / 2.0;
    acc[j - first] += dk * (lin - quad);
    acc[j + 1 - first] += dk * quad;
  }
  for (std::size_t n = 0; n < acc.size(); ++n) {
    if (acc[n] != 0.0) w.emplace_back(first + n, acc[n]);
  }
  return w;
}

ScanSpectrum singles_scan(const JointIntensity& joint, const DetectionGeometry& geom,
                          std::span<const double> scan_positions) {
  geom.validate();
  const std::vector<double> marginal =
      to_std(joint.density.rowwise().sum() * joint.grid_i.spacing());
  return scan_marginal(marginal, joint.grid_s, geom.signal_acceptance(), scan_positions);
}

ScanSpectrum singles_scan(const tpa::TpaKernel& kernel, const DetectionGeometry& geom,
                          std::span<const double> scan_positions) {
  return singles_scan(joint_intensity(kernel), geom, scan_positions);
}

ScanSpectrum idler_singles_scan(const JointIntensity& joint, const DetectionGeometry& geom,
                                std::span<const double> scan_positions) {
  geom.validate();
  const std::vector<double> marginal =
      to_std(joint.density.colwise().sum().transpose() * joint.grid_s.spacing());
  return scan_marginal(marginal, joint.grid_i, geom.idler_acceptance(), scan_positions);
}

ScanSpectrum coincidence_scan(const JointIntensity& joint, const DetectionGeometry& geom,
                              double idler_center, std::span<const double> scan_positions) {
  geom.validate();
  ScanSpectrum out;
  out.kind = ScanKind::coincidence;
  if (!joint.grid_i.contains(idler_center)) {
    out.warnings.emplace_back("idler slit centre lies outside the kernel grid");
  }
  const Weights wi = slit_weights(joint.grid_i, idler_center, geom.idler_acceptance());
  Eigen::VectorXd conditioned = Eigen::VectorXd::Zero(joint.density.rows());
  for (const auto& [j, wj] : wi) conditioned += wj * joint.density.col(static_cast<Eigen::Index>(j));
  const std::vector<double> cond = to_std(conditioned);

  out.positions = clip_positions(scan_positions, joint.grid_s, out.warnings);
  out.rates.reserve(out.positions.size());
  for (double p : out.positions) {
    out.rates.push_back(
        std::max(0.0, weigh(slit_weights(joint.grid_s, p, geom.signal_acceptance()), cond)));
  }
  return out;
}

ScanSpectrum coincidence_scan(const tpa::TpaKernel& kernel, const DetectionGeometry& geom,
                              double idler_center, std::span<const double> scan_positions) {
  return coincidence_scan(joint_intensity(kernel), geom, idler_center, scan_positions);
}

double fwhm_of(const ScanSpectrum& spectrum, FwhmMethod method) {
  const auto& x = spectrum.positions;
  const auto& y = spectrum.rates;
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("FWHM needs at least three samples");
  }
  const auto imax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double peak = y[imax];
  if (!(peak > 0.0)) throw std::domain_error("spectrum has no positive maximum");
  const double half = peak / 2.0;

  std::size_t lo = imax;
  while (lo > 0 && y[lo - 1] >= half) --lo;
  std::size_t hi = imax;
  while (hi + 1 < y.size() && y[hi + 1] >= half) ++hi;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((i < lo || i > hi) && y[i] >= half) {
      throw std::domain_error(
          "spectrum has several peaks above half maximum; analyze each peak in its own window");
    }
  }
  if (lo == 0 || hi + 1 == y.size()) {
    throw std::domain_error("spectrum does not fall to half maximum inside the scan range");
  }
  const auto cross = [&](std::size_t a, std::size_t b) {
    return x[a] + (half - y[a]) / (y[b] - y[a]) * (x[b] - x[a]);
  };
  const double width = cross(hi, hi + 1) - cross(lo - 1, lo);
  if (method == FwhmMethod::interpolate) return width;

  GaussianResidual functor{x, y};
  Eigen::VectorXd p(3);
  p << peak, x[imax], width / fwhm_factor;
  Eigen::LevenbergMarquardt<GaussianResidual> lm(functor);
  lm.minimize(p);
  return fwhm_factor * std::abs(p(2));
}

std::size_t argmax_central(std::span<const double> positions, std::span<const double> values) {
  if (positions.size() != values.size() || values.empty()) {
    throw std::invalid_argument("argmax needs matching, non-empty inputs");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best] ||
        (values[i] == values[best] && std::abs(positions[i]) < std::abs(positions[best]))) {
      best = i;
    }
  }
  return best;
}

FedorovResult fedorov_ratio(const JointIntensity& joint, const DetectionGeometry& geom) {
  std::vector<double> ks(joint.grid_s.size());
  for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = joint.grid_s[i];
  std::vector<double> ki(joint.grid_i.size());
  for (std::size_t i = 0; i < ki.size(); ++i) ki[i] = joint.grid_i[i];

  const ScanSpectrum idler = idler_singles_scan(joint, geom, ki);
  FedorovResult out;
  out.idler_center = idler.positions[argmax_central(idler.positions, idler.rates)];
  out.singles_fwhm = fwhm_of(singles_scan(joint, geom, ks));
  out.coincidence_fwhm = fwhm_of(coincidence_scan(joint, geom, out.idler_center, ks));
  out.ratio = out.singles_fwhm / out.coincidence_fwhm;
  return out;
}

FedorovResult fedorov_ratio(const tpa::TpaKernel& kernel, const DetectionGeometry& geom) {
  return fedorov_ratio(joint_intensity(kernel), geom);
}

}  // namespace spdc::detection
