#include "spdc/tpa_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spdc::tpa {

namespace {

double gauss(double x, double sigma) { return std::exp(-(x * x) / (2.0 * sigma * sigma)); }

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void check_resolution(const WavevectorGrid& gs, const WavevectorGrid& gi, const PumpWidths& w) {
  const double finest = std::min(w.sigma_k, w.sigma_k_prime) / 4.0;
  const double dk = std::max(gs.spacing(), gi.spacing());
  if (dk > finest) {
    std::ostringstream msg;
    msg << "grid too coarse: spacing " << dk << " rad/um exceeds min(sigma_k, sigma_k')/4 = "
        << finest << "; increase the number of grid points";
    throw std::invalid_argument(msg.str());
  }
}

void check_coverage(const WavevectorGrid& g, double lo, double hi, const char* axis,
                    std::vector<std::string>& warnings) {
  if (g.k_min() > lo || g.k_max() < hi) {
    std::ostringstream msg;
    msg << axis << " grid [" << g.k_min() << ", " << g.k_max() << "] does not cover [" << lo
        << ", " << hi << "]";
    warnings.push_back(msg.str());
  }
}

// Linear interpolation that returns node values exactly when the query
// lands on a node (up to rounding of the sum coordinate).
std::complex<double> lookup(const PumpSpectrum& pump, double q, bool& outside) {
  const auto& g = pump.grid;
  const double t = (q - g.k_min()) / g.spacing();
  const double last = static_cast<double>(g.size() - 1);
  constexpr double snap = 1e-9;
  if (t < -snap || t > last + snap) {
    outside = true;
    return {0.0, 0.0};
  }
  const double nearest = std::round(t);
  if (std::abs(t - nearest) < snap) {
    return pump.amplitude[static_cast<std::size_t>(std::clamp(nearest, 0.0, last))];
  }
  const auto j = static_cast<std::size_t>(std::floor(t));
  const double f = t - static_cast<double>(j);
  return (1.0 - f) * pump.amplitude[j] + f * pump.amplitude[j + 1];
}

}  // namespace

double TpaKernel::norm_squared() const {
  return amplitude.squaredNorm() * grid_s.spacing() * grid_i.spacing();
}

TpaKernel normalize(TpaKernel kernel) {
  const double n2 = kernel.norm_squared();
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw std::invalid_argument("cannot normalize a kernel with zero or non-finite energy");
  }
  kernel.amplitude *= 1.0 / std::sqrt(n2);
  kernel.normalized = true;
  return kernel;
}

void MultiPeakParams::validate() const {
  widths.validate();
  if (M < 1) throw std::invalid_argument("M must be at least 1");
  if (M > 1 && !(k0 > 0.0)) throw std::invalid_argument("k0 must be positive when M > 1");
  if (!std::isfinite(K)) throw std::invalid_argument("K must be finite");
  if (alpha) {
    if (!(*alpha > 0.0 && *alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (M != 3) throw std::invalid_argument("alpha weighting is defined for M = 3 only");
  }
}

std::vector<double> peak_centers(int M, double k0) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(M, 0)));
  for (int m = 0; m < M; ++m) out.push_back(static_cast<double>(M - 1 - 2 * m) * k0 / 2.0);
  return out;
}

std::vector<double> peak_weights(const MultiPeakParams& params) {
  if (params.alpha) return {*params.alpha / 2.0, 0.5, *params.alpha / 2.0};
  return std::vector<double>(static_cast<std::size_t>(params.M), 1.0);
}

void PumpSpectrum::normalize() {
  double e = 0.0;
  for (const auto& v : amplitude) e += std::norm(v);
  e *= grid.spacing();
  if (!(e > 0.0)) throw std::invalid_argument("pump spectrum has zero energy");
  const double s = 1.0 / std::sqrt(e);
  for (auto& v : amplitude) v *= s;
}

PhaseMatchProfile phase_match_profile(const optics::PhaseMatchConfig& config) {
  PhaseMatchProfile p;
  p.regime = config.regime;
  p.sigma_prime = optics::sigma_prime(config);
  p.K = config.regime == optics::Regime::noncollinear ? optics::transverse_K(config).K : 0.0;
  return p;
}

double phase_match_factor(const PhaseMatchProfile& profile, double d, PhaseMatchModel model,
                          Branches branches) {
  const double sp = profile.sigma_prime;
  const double K = profile.K;
  if (profile.regime == optics::Regime::collinear) {
    if (model == PhaseMatchModel::gaussian) return gauss(d, sp);
    // sinc(u) with u = x^2 and sinc(x^2) ~ exp(-gamma1 x^2) = exp(-d^2/(2 sp^2))
    return sinc(d * d / (2.0 * optics::PhaseMatchConfig::gamma1 * sp * sp));
  }
  if (model == PhaseMatchModel::gaussian) {
    const double plus = gauss(d - K, sp);
    return branches == Branches::both ? plus + gauss(d + K, sp) : plus;
  }
  if (!(K > 0.0)) throw std::invalid_argument("sinc phase matching needs K > 0 when noncollinear");
  if (branches == Branches::single && d <= 0.0) return 0.0;
  // (L/2) dk_z in the paraxial expansion, slope calibrated so that the
  // gamma2 Gaussian surrogate has width sigma'.
  const double x = (d * d - K * K) / (2.0 * K * sp * std::sqrt(2.0 * optics::PhaseMatchConfig::gamma2));
  return sinc(x);
}

TpaKernel build_double_gaussian(const PumpWidths& widths, const WavevectorGrid& grid_s,
                                const WavevectorGrid& grid_i) {
  widths.validate();
  check_resolution(grid_s, grid_i, widths);
  TpaKernel k{grid_s, grid_i, Eigen::MatrixXd(grid_s.size(), grid_i.size()), false, {}};
  const double reach = 4.0 * std::max(widths.sigma_k, widths.sigma_k_prime);
  check_coverage(grid_s, -reach, reach, "signal", k.warnings);
  check_coverage(grid_i, -reach, reach, "idler", k.warnings);

  for (std::size_t i = 0; i < grid_s.size(); ++i) {
    const double ks = grid_s[i];
    for (std::size_t j = 0; j < grid_i.size(); ++j) {
      const double ki = grid_i[j];
      k.amplitude(i, j) = gauss(ks + ki, widths.sigma_k) * gauss(ks - ki, widths.sigma_k_prime);
    }
  }
  return normalize(std::move(k));
}

TpaKernel build_multipeak(const MultiPeakParams& params, const WavevectorGrid& grid_s,
                          const WavevectorGrid& grid_i, Branches branches) {
  params.validate();
  check_resolution(grid_s, grid_i, params.widths);

  const auto centers = peak_centers(params.M, params.k0);
  const auto weights = peak_weights(params);
  const double sk = params.widths.sigma_k;
  const double sp = params.widths.sigma_k_prime;
  const double sigma_max = std::max(sk, sp);

  TpaKernel k{grid_s, grid_i, Eigen::MatrixXd(grid_s.size(), grid_i.size()), false, {}};
  if (params.M > 1 && params.k0 <= 4.0 * sigma_max) {
    k.warnings.emplace_back("modes overlap; factorization invalid");
  }
  const double reach = 4.0 * sigma_max;
  const double hi = centers.front() + reach;
  const double lo = centers.back() - reach;
  const double half = params.K / 2.0;
  if (branches == Branches::single) {
    check_coverage(grid_s, half + lo, half + hi, "signal", k.warnings);
    check_coverage(grid_i, -half + lo, -half + hi, "idler", k.warnings);
  } else {
    check_coverage(grid_s, -half + lo, half + hi, "signal", k.warnings);
    check_coverage(grid_i, -half + lo, half + hi, "idler", k.warnings);
  }

  std::vector<double> sums(grid_i.size());
  for (std::size_t i = 0; i < grid_s.size(); ++i) {
    const double ks = grid_s[i];
    for (std::size_t j = 0; j < grid_i.size(); ++j) {
      const double ki = grid_i[j];
      const double s = ks + ki;
      const double d = ks - ki;
      double pump = 0.0;
      for (std::size_t m = 0; m < centers.size(); ++m) {
        pump += weights[m] * gauss(s - 2.0 * centers[m], sk);
      }
      double pm = gauss(d - params.K, sp);
      if (branches == Branches::both) pm += gauss(d + params.K, sp);
      k.amplitude(i, j) = pump * pm;
    }
  }
  return normalize(std::move(k));
}

TpaKernel build_from_pump(const PumpSpectrum& pump, const PhaseMatchProfile& profile,
                          const WavevectorGrid& grid_s, const WavevectorGrid& grid_i,
                          PhaseMatchModel model, Branches branches) {
  if (pump.amplitude.size() != pump.grid.size()) {
    throw std::invalid_argument("pump spectrum size does not match its grid");
  }
  if (!(profile.sigma_prime > 0.0)) throw std::invalid_argument("sigma_prime must be positive");

  TpaKernel k{grid_s, grid_i, Eigen::MatrixXd(grid_s.size(), grid_i.size()), false, {}};
  double vmax = 0.0;
  for (const auto& v : pump.amplitude) vmax = std::max(vmax, std::abs(v));

  bool outside = false;
  double imag_max = 0.0;
  for (std::size_t i = 0; i < grid_s.size(); ++i) {
    const double ks = grid_s[i];
    for (std::size_t j = 0; j < grid_i.size(); ++j) {
      const double ki = grid_i[j];
      const std::complex<double> v = lookup(pump, ks + ki, outside);
      const double pm = phase_match_factor(profile, ks - ki, model, branches);
      imag_max = std::max(imag_max, std::abs(v.imag()));
      k.amplitude(i, j) = v.real() * pm;
    }
  }
  if (imag_max > 1e-9 * vmax) {
    throw std::invalid_argument("pump spectrum has a nontrivial phase; only real kernels are supported");
  }
  if (outside) {
    k.warnings.emplace_back("pump spectrum grid does not cover k_s + k_i; treated as zero outside");
  }
  return normalize(std::move(k));
}

TpaKernel build_from_pump(const PumpSpectrum& pump, const optics::PhaseMatchConfig& config,
                          const WavevectorGrid& grid_s, const WavevectorGrid& grid_i,
                          PhaseMatchModel model, Branches branches) {
  return build_from_pump(pump, phase_match_profile(config), grid_s, grid_i, model, branches);
}

std::vector<double> marginal_intensity(const TpaKernel& kernel, Axis which) {
  const Eigen::MatrixXd p = kernel.amplitude.array().square().matrix();
  std::vector<double> out;
  if (which == Axis::signal) {
    const Eigen::VectorXd m = p.rowwise().sum() * kernel.grid_i.spacing();
    out.assign(m.data(), m.data() + m.size());
  } else {
    const Eigen::VectorXd m = p.colwise().sum().transpose() * kernel.grid_s.spacing();
    out.assign(m.data(), m.data() + m.size());
  }
  return out;
}

std::pair<WavevectorGrid, WavevectorGrid> default_grids(const MultiPeakParams& params,
                                                        std::size_t n_points, double margin,
                                                        Branches branches) {
  params.validate();
  const double sigma_max = std::max(params.widths.sigma_k, params.widths.sigma_k_prime);
  const double reach =
      (params.M > 1 ? (params.M - 1) * params.k0 / 2.0 : 0.0) + margin * sigma_max;
  const double half = params.K / 2.0;
  if (branches == Branches::both) {
    return {WavevectorGrid::centered(0.0, half + reach, n_points),
            WavevectorGrid::centered(0.0, half + reach, n_points)};
  }
  return {WavevectorGrid::centered(half, reach, n_points),
          WavevectorGrid::centered(-half, reach, n_points)};
}

}  // namespace spdc::tpa
