#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spdc/detection.hpp"

namespace spdc::detection {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& a, const std::vector<double>& b) {
  double top = neg_inf;
  for (std::size_t j = 0; j < a.size(); ++j) top = std::max(top, a[j] + b[j]);
  if (top == neg_inf) return neg_inf;
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += std::exp(a[j] + b[j] - top);
  return top + std::log(acc);
}

double log_add_exp(double a, double b) {
  const double top = std::max(a, b);
  if (top == neg_inf) return neg_inf;
  return top + std::log(std::exp(a - top) + std::exp(b - top));
}

void check_profiles(const std::vector<std::vector<double>>& profiles) {
  if (profiles.size() < 2) throw std::invalid_argument("crosstalk needs at least two modes");
  for (const auto& p : profiles) {
    if (p.size() != profiles.front().size()) {
      throw std::invalid_argument("crosstalk profiles must share one grid");
    }
  }
}

CrosstalkMatrix from_log_overlaps(const Eigen::MatrixXd& lo) {
  const Eigen::Index n = lo.rows();
  for (Eigen::Index m = 0; m < n; ++m) {
    if (lo(m, m) == neg_inf) throw std::invalid_argument("crosstalk: mode has zero energy");
  }
  CrosstalkMatrix out{Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = m + 1; k < n; ++k) {
      const double lx = std::min(0.0, 2.0 * lo(m, k) - lo(m, m) - lo(k, k));
      out.log_values(m, k) = out.log_values(k, m) = lx;
      out.linear(m, k) = out.linear(k, m) = std::exp(lx);
    }
  }
  return out;
}

}  // namespace

double CrosstalkMatrix::log10(Eigen::Index m, Eigen::Index n) const {
  return log_values(m, n) / std::log(10.0);
}

CrosstalkMatrix crosstalk_from_log_intensities(const std::vector<std::vector<double>>& log_profiles) {
  check_profiles(log_profiles);
  const auto n = static_cast<Eigen::Index>(log_profiles.size());
  Eigen::MatrixXd lo(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = m; k < n; ++k) {
      lo(m, k) = lo(k, m) = log_sum_exp(log_profiles[static_cast<std::size_t>(m)],
                                        log_profiles[static_cast<std::size_t>(k)]);
    }
  }
  return from_log_overlaps(lo);
}

CrosstalkMatrix crosstalk_linear(const std::vector<std::vector<double>>& intensities) {
  check_profiles(intensities);
  const auto n = static_cast<Eigen::Index>(intensities.size());
  const auto len = static_cast<Eigen::Index>(intensities.front().size());
  Eigen::MatrixXd I(len, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    I.col(m) = Eigen::Map<const Eigen::VectorXd>(intensities[static_cast<std::size_t>(m)].data(), len);
  }
  const Eigen::MatrixXd G = I.transpose() * I;
  CrosstalkMatrix out{Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index m = 0; m < n; ++m) {
    if (!(G(m, m) > 0.0)) throw std::invalid_argument("crosstalk: mode has zero energy");
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = m + 1; k < n; ++k) {
      const double x = std::clamp(G(m, k) * G(m, k) / (G(m, m) * G(k, k)), 0.0, 1.0);
      out.linear(m, k) = out.linear(k, m) = x;
      out.log_values(m, k) = out.log_values(k, m) = std::log(x);
    }
  }
  return out;
}

CrosstalkMatrix crosstalk_matrix(const schmidt::SchmidtDecomposition& dec, OverlapKind kind) {
  const Eigen::Index n = dec.signal_modes.cols();
  if (n < 2) throw std::invalid_argument("crosstalk needs at least two modes");
  if (kind == OverlapKind::intensity) {
    std::vector<std::vector<double>> logs(static_cast<std::size_t>(n));
    for (Eigen::Index m = 0; m < n; ++m) {
      auto& l = logs[static_cast<std::size_t>(m)];
      l.resize(static_cast<std::size_t>(dec.signal_modes.rows()));
      for (Eigen::Index j = 0; j < dec.signal_modes.rows(); ++j) {
        l[static_cast<std::size_t>(j)] = 2.0 * std::log(std::abs(dec.signal_modes(j, m)));
      }
    }
    return crosstalk_from_log_intensities(logs);
  }
  const Eigen::MatrixXd G = dec.signal_modes.transpose() * dec.signal_modes;
  CrosstalkMatrix out{Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = m + 1; k < n; ++k) {
      const double x = std::clamp(G(m, k) * G(m, k) / (G(m, m) * G(k, k)), 0.0, 1.0);
      out.linear(m, k) = out.linear(k, m) = x;
      out.log_values(m, k) = out.log_values(k, m) = std::log(x);
    }
  }
  return out;
}

std::vector<std::vector<double>> multipeak_mode_log_intensities(const tpa::MultiPeakParams& params,
                                                                const WavevectorGrid& grid_s,
                                                                const WavevectorGrid& grid_i,
                                                                tpa::Branches branches) {
  params.validate();
  const auto centers = tpa::peak_centers(params.M, params.k0);
  const auto weights = tpa::peak_weights(params);
  const double sk = params.widths.sigma_k;
  const double sp = params.widths.sigma_k_prime;
  const double log_dk = std::log(grid_i.spacing());

  std::vector<std::vector<double>> out(centers.size(), std::vector<double>(grid_s.size()));
  std::vector<double> row(grid_i.size());
  const std::vector<double> zeros(grid_i.size(), 0.0);
  for (std::size_t m = 0; m < centers.size(); ++m) {
    const double log_w = std::log(weights[m]);
    for (std::size_t i = 0; i < grid_s.size(); ++i) {
      const double ks = grid_s[i];
      for (std::size_t j = 0; j < grid_i.size(); ++j) {
        const double ki = grid_i[j];
        const double u = ks + ki - 2.0 * centers[m];
        double log_pm = -(ks - ki - params.K) * (ks - ki - params.K) / (2.0 * sp * sp);
        if (branches == tpa::Branches::both) {
          log_pm = log_add_exp(log_pm, -(ks - ki + params.K) * (ks - ki + params.K) / (2.0 * sp * sp));
        }
        row[j] = 2.0 * (log_w - u * u / (2.0 * sk * sk) + log_pm);
      }
      out[m][i] = log_sum_exp(row, zeros) + log_dk;
    }
  }
  return out;
}

}  // namespace spdc::detection
