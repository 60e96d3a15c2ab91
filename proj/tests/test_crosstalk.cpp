#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spdc/detection.hpp"

using namespace spdc;
using namespace spdc::detection;
using optics::WavevectorGrid;

namespace {

const double s246 = 0.009572439207442883;
const double s250 = 0.009419280180123796;

std::vector<double> log_gaussian(const WavevectorGrid& g, double c, double s) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = -0.5 * std::pow((g[j] - c) / s, 2);
  return v;
}

std::vector<double> expd(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::exp(v[j]);
  return out;
}

tpa::MultiPeakParams three_mode() {
  tpa::MultiPeakParams p;
  p.M = 3;
  p.k0 = 0.168;
  p.K = 8.68;
  p.widths = {s246, s250};
  p.alpha = 0.63;
  return p;
}

}  // namespace

TEST_CASE("identical profiles give unit crosstalk") {
  const WavevectorGrid g(-1.0, 1.0, 401);
  const auto a = log_gaussian(g, 0.1, 0.05);
  const auto x = crosstalk_from_log_intensities({a, a});
  CHECK(x.linear(0, 1) == doctest::Approx(1.0));
  CHECK(std::abs(x.log_values(0, 1)) < 1e-12);
}

TEST_CASE("matrix structure") {
  const WavevectorGrid g(-1.0, 1.0, 801);
  const auto x = crosstalk_from_log_intensities(
      {log_gaussian(g, -0.2, 0.05), log_gaussian(g, 0.0, 0.07), log_gaussian(g, 0.15, 0.04)});
  for (Eigen::Index m = 0; m < 3; ++m) {
    CHECK(x.linear(m, m) == 1.0);
    for (Eigen::Index n = 0; n < 3; ++n) {
      CHECK(x.linear(m, n) == x.linear(n, m));
      CHECK(x.linear(m, n) >= 0.0);
      CHECK(x.linear(m, n) <= 1.0);
    }
  }
}

TEST_CASE("log and linear paths agree at 4 sigma") {
  const double s = 0.01;
  const WavevectorGrid g(-0.15, 0.15, 1201);
  const auto a = log_gaussian(g, -2.0 * s, s);
  const auto b = log_gaussian(g, 2.0 * s, s);
  const auto lx = crosstalk_from_log_intensities({a, b});
  const auto dx = crosstalk_linear({expd(a), expd(b)});
  CHECK(lx.linear(0, 1) == doctest::Approx(dx.linear(0, 1)).epsilon(1e-10));
  // equal-width Gaussians: X = exp(-Delta^2 / (2 s^2))
  CHECK(lx.log_values(0, 1) == doctest::Approx(-16.0 * s * s / (2.0 * s * s)).epsilon(1e-9));
}

TEST_CASE("log domain survives where the linear domain underflows") {
  const double s = 0.01;
  const WavevectorGrid g(-1.0, 1.0, 4001);
  const auto a = log_gaussian(g, -0.4, s);
  const auto b = log_gaussian(g, 0.4, s);
  const auto lx = crosstalk_from_log_intensities({a, b});
  CHECK(lx.log_values(0, 1) == doctest::Approx(-0.64 / (2.0 * s * s)).epsilon(1e-9));
  CHECK(lx.linear(0, 1) == 0.0);
}

TEST_CASE("shipped three-mode parameters: closed-form overlap exponent") {
  const auto p = three_mode();
  const auto [gs, gi] = tpa::default_grids(p, 1024, 6.0);
  const auto logs = multipeak_mode_log_intensities(p, gs, gi);
  const auto x = crosstalk_from_log_intensities(logs);
  // marginal variance (s^2 + s'^2)/8 gives log X = -4 Delta^2 / (s^2 + s'^2)
  const double adjacent = -4.0 * 0.168 * 0.168 / (s246 * s246 + s250 * s250);
  CHECK(x.log_values(0, 1) == doctest::Approx(adjacent).epsilon(1e-9));
  CHECK(x.log_values(1, 2) == doctest::Approx(adjacent).epsilon(1e-9));
  CHECK(x.log_values(0, 2) == doctest::Approx(4.0 * adjacent).epsilon(1e-9));
  CHECK(x.log10(0, 1) == doctest::Approx(-271.9).epsilon(1e-3));
  CHECK(x.log10(0, 1) < -41.0);
}

TEST_CASE("crosstalk from a Schmidt decomposition") {
  auto p = three_mode();
  p.K = 0.0;
  const auto [gs, gi] = tpa::default_grids(p, 512, 5.0);
  const auto dec = schmidt::schmidt_decompose(tpa::build_multipeak(p, gs, gi), schmidt::Truncation::count(3));
  const auto xi = crosstalk_matrix(dec, OverlapKind::intensity);
  const auto xa = crosstalk_matrix(dec, OverlapKind::amplitude);
  for (Eigen::Index m = 0; m < 3; ++m) {
    for (Eigen::Index n = 0; n < 3; ++n) {
      if (m == n) continue;
      CHECK(xi.log10(m, n) < -41.0);
      CHECK(xa.linear(m, n) < 1e-12);
    }
  }
}

TEST_CASE("invalid inputs") {
  const WavevectorGrid g(-1.0, 1.0, 101);
  const auto a = log_gaussian(g, 0.0, 0.1);
  CHECK_THROWS_AS(crosstalk_from_log_intensities({a}), std::invalid_argument);
  const std::vector<double> dead(g.size(), -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(crosstalk_from_log_intensities({a, dead}), std::invalid_argument);
  CHECK_THROWS_AS(crosstalk_linear({expd(a), std::vector<double>(g.size(), 0.0)}), std::invalid_argument);
}
