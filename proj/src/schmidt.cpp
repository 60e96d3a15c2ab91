#include "spdc/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace spdc::schmidt {

namespace {

constexpr double kZeroTolerance = 1e-12;
constexpr double kDegeneracyTolerance = 1e-10;

// Rotate each cluster of equal singular values so the signal modes
// diagonalize k_s. The product U S V^T is unchanged because S is a
// multiple of the identity on the cluster.
void localize_degenerate(const Eigen::VectorXd& s, Eigen::MatrixXd& U, Eigen::MatrixXd& V,
                        const WavevectorGrid& grid_s, Eigen::Index rank) {
  Eigen::VectorXd k(grid_s.size());
  for (std::size_t i = 0; i < grid_s.size(); ++i) k(static_cast<Eigen::Index>(i)) = grid_s[i];

  Eigen::Index start = 0;
  while (start < rank) {
    Eigen::Index end = start + 1;
    while (end < rank && s(end - 1) - s(end) <= kDegeneracyTolerance * s(0)) ++end;
    const Eigen::Index n = end - start;
    if (n > 1) {
      const Eigen::MatrixXd Uc = U.middleCols(start, n);
      const Eigen::MatrixXd X = Uc.transpose() * k.asDiagonal() * Uc;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X);
      // descending position
      const Eigen::MatrixXd R = eig.eigenvectors().rowwise().reverse();
      U.middleCols(start, n) = Uc * R;
      V.middleCols(start, n) = V.middleCols(start, n) * R;
    }
    start = end;
  }
}

struct Svd {
  Eigen::VectorXd s;
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
};

// BDCSVD in Eigen 3.4.0 occasionally returns NaNs or unsorted values on
// numerically low-rank kernels; check it and fall back to Jacobi.
bool trustworthy(const Svd& r, const Eigen::MatrixXd& A) {
  if (!r.s.allFinite() || !r.U.allFinite() || !r.V.allFinite()) return false;
  for (Eigen::Index i = 1; i < r.s.size(); ++i)
    if (r.s(i) > r.s(i - 1)) return false;
  Eigen::Index n = 0;
  while (n < r.s.size() && r.s(n) > 1e-15 * r.s(0)) ++n;
  const Eigen::MatrixXd back = r.U.leftCols(n) * r.s.head(n).asDiagonal() * r.V.leftCols(n).transpose();
  return (back - A).norm() <= 1e-10 * A.norm();
}

Svd thin_svd(const Eigen::MatrixXd& A) {
  Eigen::BDCSVD<Eigen::MatrixXd> bdc(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out{bdc.singularValues(), bdc.matrixU(), bdc.matrixV()};
  if (trustworthy(out, A)) return out;
  // Compress to the numerical rank with a pivoted QR so Jacobi stays cheap.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-15);
  const Eigen::Index r = std::max<Eigen::Index>(qr.rank(), 1);
  const Eigen::MatrixXd R = qr.matrixR().topRows(r).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd RP = R * qr.colsPermutation().transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> jac(RP, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), r);
  return {jac.singularValues(), Q * jac.matrixU(), jac.matrixV()};
}

}  // namespace

SchmidtDecomposition schmidt_decompose(const tpa::TpaKernel& kernel, const Truncation& truncation) {
  const double n2 = kernel.norm_squared();
  if (std::abs(n2 - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "kernel is not normalized (sum |F|^2 dk^2 = " << n2 << ")";
    throw std::invalid_argument(msg.str());
  }
  const double ds = kernel.grid_s.spacing();
  const double di = kernel.grid_i.spacing();

  const Eigen::MatrixXd A = kernel.amplitude * std::sqrt(ds * di);
  auto [s, U, V] = thin_svd(A);

  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > kZeroTolerance * s(0)) ++rank;
  localize_degenerate(s, U, V, kernel.grid_s, rank);

  const double total = s.head(rank).squaredNorm();
  Eigen::Index keep = rank;
  if (truncation.max_modes) {
    keep = std::min<Eigen::Index>(rank, static_cast<Eigen::Index>(*truncation.max_modes));
  } else if (!truncation.full_rank) {
    double acc = 0.0;
    keep = 0;
    while (keep < rank && acc < (1.0 - truncation.energy_threshold) * total) {
      acc += s(keep) * s(keep);
      ++keep;
    }
    keep = std::min<Eigen::Index>(keep, static_cast<Eigen::Index>(truncation.cap));
  }

  SchmidtDecomposition dec{{}, {}, {}, kernel.grid_s, kernel.grid_i, 0.0, kernel.warnings};
  dec.coefficients.assign(s.data(), s.data() + keep);
  dec.signal_modes = U.leftCols(keep) / std::sqrt(ds);
  dec.idler_modes = V.leftCols(keep) / std::sqrt(di);
  dec.truncation_deficit = s.tail(s.size() - keep).squaredNorm();

  for (Eigen::Index m = 0; m < keep; ++m) {
    Eigen::Index imax = 0;
    dec.signal_modes.col(m).cwiseAbs().maxCoeff(&imax);
    if (dec.signal_modes(imax, m) < 0.0) {
      dec.signal_modes.col(m) *= -1.0;
      dec.idler_modes.col(m) *= -1.0;
    }
  }
  if (dec.truncation_deficit > 1e-3) {
    std::ostringstream msg;
    msg << "truncation discards " << dec.truncation_deficit << " of the total weight";
    dec.warnings.push_back(msg.str());
  }
  return dec;
}

ModeMetrics schmidt_number(const std::vector<double>& coefficients) {
  double p = 0.0;
  for (double c : coefficients) p += c * c * c * c;
  if (!(p > 0.0)) throw std::invalid_argument("Schmidt number needs a nonzero coefficient");
  return {1.0 / p, p};
}

ModeMetrics schmidt_number(const SchmidtDecomposition& dec) {
  return schmidt_number(dec.coefficients);
}

Eigen::MatrixXd reconstruct(const SchmidtDecomposition& dec) {
  const Eigen::Map<const Eigen::VectorXd> c(dec.coefficients.data(),
                                            static_cast<Eigen::Index>(dec.coefficients.size()));
  return dec.signal_modes * c.asDiagonal() * dec.idler_modes.transpose();
}

double energy_in_window(const Eigen::Ref<const Eigen::VectorXd>& mode, const WavevectorGrid& grid,
                        double lo, double hi) {
  double inside = 0.0;
  double all = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = mode(static_cast<Eigen::Index>(i)) * mode(static_cast<Eigen::Index>(i));
    all += e;
    if (grid[i] >= lo && grid[i] <= hi) inside += e;
  }
  return all > 0.0 ? inside / all : 0.0;
}

}  // namespace spdc::schmidt
