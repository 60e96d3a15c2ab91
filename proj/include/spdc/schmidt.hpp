#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spdc/tpa_kernel.hpp"

namespace spdc::schmidt {

using optics::PumpWidths;
using optics::WavevectorGrid;

/// How many Schmidt modes to keep.
struct Truncation {
  std::optional<std::size_t> max_modes;  // fixed count, overrides the energy rule
  double energy_threshold = 1e-6;        // stop once the discarded weight is below this
  std::size_t cap = 64;
  bool full_rank = false;

  static Truncation count(std::size_t n) { return {n, 0.0, n, false}; }
  static Truncation energy(double discarded) { return {std::nullopt, discarded, 64, false}; }
  static Truncation full() { return {std::nullopt, 0.0, 0, true}; }
};

/// F(k_s, k_i) = sum_m c_m f_m(k_s) g_m(k_i). Columns of the mode matrices
/// are unit-norm under the dk-weighted inner product.
struct SchmidtDecomposition {
  std::vector<double> coefficients;  // c_m, descending
  Eigen::MatrixXd signal_modes;
  Eigen::MatrixXd idler_modes;
  WavevectorGrid grid_s;
  WavevectorGrid grid_i;
  double truncation_deficit = 0.0;  // 1 - sum c_m^2 over retained modes
  std::vector<std::string> warnings;

  std::size_t size() const { return coefficients.size(); }
};

/// SVD of the kernel scaled by sqrt(dk_s dk_i). Singular values below
/// 1e-12 c_1 are dropped. Modes whose coefficients agree to 1e-10 c_1 are
/// rotated within their degenerate subspace to diagonalize the signal
/// position operator, so separated peaks give localized modes ordered from
/// large to small k. Each signal mode's largest-magnitude sample is positive.
SchmidtDecomposition schmidt_decompose(const tpa::TpaKernel& kernel,
                                       const Truncation& truncation = {});

struct ModeMetrics {
  double schmidt_number = 1.0;
  double purity = 1.0;
};

/// K = 1 / sum c_m^4, purity = 1/K.
ModeMetrics schmidt_number(const SchmidtDecomposition& dec);
ModeMetrics schmidt_number(const std::vector<double>& coefficients);

/// sum_m c_m f_m(k_s) g_m(k_i) on the kernel grids.
Eigen::MatrixXd reconstruct(const SchmidtDecomposition& dec);

struct SampledMode {
  std::vector<double> values;
  std::vector<std::string> warnings;
};

/// Hermite-Gauss function H_n(x/w) exp(-x^2/(2 w^2)) centred at `center`,
/// scaled to unit norm on the grid. Warns when the grid holds less than
/// 1 - 1e-6 of the continuous mode energy.
SampledMode hermite_gauss(int n, double w, const WavevectorGrid& grid, double center = 0.0);

/// Closed-form Schmidt decomposition of the double-Gaussian kernel.
struct AnalyticSchmidt {
  double mu = 0.0;              // eigenvalue ratio ((s'-s)/(s'+s))^2
  double schmidt_number = 1.0;  // (s^2 + s'^2) / (2 s s')
  double mode_width = 0.0;      // w = sqrt(s s'/2)
  std::vector<double> eigenvalues;  // lambda_m = (1-mu) mu^m
  Eigen::MatrixXd signal_modes;
  Eigen::MatrixXd idler_modes;
};

AnalyticSchmidt analytic_double_gaussian(const PumpWidths& widths, std::size_t m_max,
                                         const WavevectorGrid& grid_s,
                                         const WavevectorGrid& grid_i);

/// Fraction of a mode's dk-weighted energy inside [lo, hi].
double energy_in_window(const Eigen::Ref<const Eigen::VectorXd>& mode, const WavevectorGrid& grid,
                        double lo, double hi);

}  // namespace spdc::schmidt
