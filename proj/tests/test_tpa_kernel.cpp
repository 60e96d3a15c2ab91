#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "spdc/slm.hpp"
#include "spdc/tpa_kernel.hpp"

using namespace spdc;
using namespace spdc::tpa;
using optics::WavevectorGrid;

namespace {

const double s250 = 0.009419280180123796;
const double s246 = 0.009572439207442883;

MultiPeakParams three_mode_params(double K = 0.0) {
  MultiPeakParams p;
  p.M = 3;
  p.k0 = 0.168;
  p.K = K;
  p.widths = {s246, s250};
  p.alpha = 0.63;
  return p;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& y, double floor_frac) {
  const double top = *std::max_element(y.begin(), y.end());
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j + 1 < y.size(); ++j) {
    if (y[j] >= y[j - 1] && y[j] > y[j + 1] && y[j] > floor_frac * top) out.push_back(j);
  }
  return out;
}

double fwhm_numeric(const std::function<double(double)>& f, double lo, double hi) {
  const int n = 200001;
  double top = 0.0;
  for (int j = 0; j < n; ++j) top = std::max(top, f(lo + (hi - lo) * j / (n - 1)));
  double first = hi;
  double last = lo;
  for (int j = 0; j < n; ++j) {
    const double x = lo + (hi - lo) * j / (n - 1);
    if (f(x) >= 0.5 * top) {
      first = std::min(first, x);
      last = std::max(last, x);
    }
  }
  return last - first;
}

}  // namespace

TEST_CASE("double-Gaussian kernel is normalized and matches the closed form") {
  const PumpWidths w{0.01, 0.02};
  const auto g = WavevectorGrid::centered(0.0, 0.12, 257);
  const auto k = build_double_gaussian(w, g, g);
  CHECK(k.normalized);
  CHECK(std::abs(k.norm_squared() - 1.0) < 1e-10);
  CHECK(k.warnings.empty());
  // ratio of two samples is independent of the normalization constant
  const auto at = [&](std::size_t i, std::size_t j) { return k.amplitude(i, j); };
  const double ks = g[140], ki = g[110];
  const double expect = std::exp(-(ks + ki) * (ks + ki) / (2e-4) - (ks - ki) * (ks - ki) / (8e-4));
  CHECK(at(140, 110) / at(128, 128) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("grid coarser than a quarter width is rejected") {
  const PumpWidths w{0.01, 0.02};
  const auto g = WavevectorGrid::centered(0.0, 1.0, 64);
  CHECK_THROWS_WITH_AS(build_double_gaussian(w, g, g), doctest::Contains("too coarse"),
                       std::invalid_argument);
}

TEST_CASE("narrow grid produces a coverage warning") {
  const PumpWidths w{0.01, 0.01};
  const auto g = WavevectorGrid::centered(0.0, 0.02, 64);
  const auto k = build_double_gaussian(w, g, g);
  CHECK_FALSE(k.warnings.empty());
}

TEST_CASE("peak centres and weights") {
  const auto c = peak_centers(3, 0.168);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == doctest::Approx(0.168));
  CHECK(c[1] == doctest::Approx(0.0));
  CHECK(c[2] == doctest::Approx(-0.168));
  CHECK(peak_centers(1, 0.5) == std::vector<double>{0.0});
  const auto w = peak_weights(three_mode_params());
  CHECK(w[0] == doctest::Approx(0.315));
  CHECK(w[1] == doctest::Approx(0.5));
  MultiPeakParams p = three_mode_params();
  p.alpha.reset();
  CHECK(peak_weights(p) == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("alpha requires three modes") {
  auto p = three_mode_params();
  p.M = 2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("overlapping modes warn that factorization is invalid") {
  auto p = three_mode_params();
  p.k0 = 0.02;
  const auto [gs, gi] = default_grids(p, 256, 5.0);
  const auto k = build_multipeak(p, gs, gi);
  CHECK(std::find(k.warnings.begin(), k.warnings.end(), "modes overlap; factorization invalid") !=
        k.warnings.end());
}

TEST_CASE("three-mode singles: spacing k0 and centre/side ratio 1/alpha^2") {
  const auto p = three_mode_params(8.68);
  const auto [gs, gi] = default_grids(p, 512, 5.0);
  CHECK(gs.contains(8.68 / 2));
  CHECK(gi.contains(-8.68 / 2));
  const auto k = build_multipeak(p, gs, gi);
  CHECK(k.warnings.empty());
  const auto m = marginal_intensity(k, Axis::signal);
  const auto pk = local_maxima(m, 0.01);
  REQUIRE(pk.size() == 3);
  CHECK(std::abs(gs[pk[1]] - gs[pk[0]] - 0.168) <= gs.spacing());
  CHECK(std::abs(gs[pk[2]] - gs[pk[1]] - 0.168) <= gs.spacing());
  CHECK(m[pk[1]] / m[pk[0]] == doctest::Approx(1.0 / (0.63 * 0.63)).epsilon(0.05));
}

TEST_CASE("both branches mirror the kernel") {
  auto p = three_mode_params(1.0);
  p.M = 1;
  p.alpha.reset();
  const auto [gs, gi] = default_grids(p, 1024, 5.0, Branches::both);
  const auto k = build_multipeak(p, gs, gi, Branches::both);
  const auto m = marginal_intensity(k, Axis::signal);
  const auto pk = local_maxima(m, 0.5);
  REQUIRE(pk.size() == 2);
  CHECK(gs[pk[0]] == doctest::Approx(-gs[pk[1]]).epsilon(1e-9));
  CHECK(m[pk[0]] == doctest::Approx(m[pk[1]]).epsilon(1e-9));
}

TEST_CASE("Gaussian and sinc phase matching widths agree in the noncollinear regime") {
  const PhaseMatchProfile prof{optics::Regime::noncollinear, 8.68, 0.00317};
  auto sq = [&](PhaseMatchModel m) {
    return [&prof, m](double d) {
      const double v = phase_match_factor(prof, d, m, Branches::single);
      return v * v;
    };
  };
  const double lo = 8.68 - 0.05, hi = 8.68 + 0.05;
  const double fg = fwhm_numeric(sq(PhaseMatchModel::gaussian), lo, hi);
  const double fs = fwhm_numeric(sq(PhaseMatchModel::sinc), lo, hi);
  CHECK(fs / fg == doctest::Approx(1.0).epsilon(0.05));
  CHECK(phase_match_factor(prof, 8.68, PhaseMatchModel::gaussian, Branches::single) == doctest::Approx(1.0));
  CHECK(phase_match_factor(prof, -8.68, PhaseMatchModel::sinc, Branches::single) == 0.0);
  CHECK(phase_match_factor(prof, -8.68, PhaseMatchModel::gaussian, Branches::both) == doctest::Approx(1.0));
}

TEST_CASE("kernel from the sampled pump field reproduces the multi-peak kernel") {
  const auto p = three_mode_params();
  const auto [gs, gi] = default_grids(p, 256, 5.0);
  const auto direct = build_multipeak(p, gs, gi);

  const slm::PumpProfileParams pp{3, 0.168, s246, 0.63};
  const auto field = slm::pump_field(pp, slm::pump_x_grid(pp, 4001, 9.0));
  const auto q = WavevectorGrid(gs.k_min() + gi.k_min(), gs.k_max() + gi.k_max(), 2 * 256 - 1);
  const auto spectrum = slm::angular_spectrum(field, q);
  const PhaseMatchProfile prof{optics::Regime::collinear, 0.0, s250};
  const auto from_pump = build_from_pump(spectrum, prof, gs, gi, PhaseMatchModel::gaussian);
  CHECK(from_pump.warnings.empty());
  const double overlap = (direct.amplitude.array() * from_pump.amplitude.array()).sum() *
                         gs.spacing() * gi.spacing();
  CHECK(overlap > 1.0 - 1e-6);
}

TEST_CASE("complex pump spectra are refused") {
  const auto g = WavevectorGrid::centered(0.0, 0.1, 101);
  PumpSpectrum pump{WavevectorGrid::centered(0.0, 0.2, 201), {}};
  for (std::size_t j = 0; j < pump.grid.size(); ++j) {
    pump.amplitude.emplace_back(std::exp(-pump.grid[j] * pump.grid[j] / 2e-4) * std::polar(1.0, 30.0 * pump.grid[j]));
  }
  const PhaseMatchProfile prof{optics::Regime::collinear, 0.0, 0.02};
  CHECK_THROWS_AS(build_from_pump(pump, prof, g, g, PhaseMatchModel::gaussian), std::invalid_argument);
}

TEST_CASE("normalizing a zero kernel fails") {
  const auto g = WavevectorGrid::centered(0.0, 0.1, 32);
  TpaKernel k{g, g, Eigen::MatrixXd::Zero(32, 32), false, {}};
  CHECK_THROWS_AS(normalize(k), std::invalid_argument);
}
