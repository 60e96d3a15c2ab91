#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "spdc/detection.hpp"

using namespace spdc;
using namespace spdc::detection;
using optics::WavevectorGrid;

namespace {

std::vector<double> nodes(const WavevectorGrid& g) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = g[j];
  return v;
}

DetectionGeometry point_slits() {
  DetectionGeometry g;
  g.slit_width_signal = Length::um(0.0);
  g.slit_width_idler = Length::um(0.0);
  return g;
}

tpa::TpaKernel gaussian_kernel(double s, double sp, std::size_t n = 512) {
  const optics::PumpWidths w{s, sp};
  const auto g = WavevectorGrid::centered(0.0, 6.0 * std::max(s, sp), n);
  return tpa::build_double_gaussian(w, g, g);
}

optics::PhaseMatchConfig bbo_like() {
  optics::PhaseMatchConfig c;
  c.crystal_length = Length::mm(3.0);
  c.pump_wavelength = Length::nm(405.0);
  c.signal_index = 1.6614;
  c.pump_index = 1.5672;
  return c;
}

}  // namespace

TEST_CASE("slit acceptance") {
  const DetectionGeometry g;
  CHECK(g.signal_acceptance() == doctest::Approx(two_pi / 0.81 * 200.0 / 100000.0));
  CHECK(g.idler_acceptance() == doctest::Approx(2.0 * g.signal_acceptance()));
  DetectionGeometry bad;
  bad.slit_width_idler = Length::mm(-1.0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("slit weights integrate linear functions exactly") {
  const WavevectorGrid g(-1.0, 1.0, 101);
  std::vector<double> f(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) f[j] = 2.0 + 3.0 * g[j];
  for (double c : {-0.503, 0.0, 0.1234, 0.7}) {
    for (double w : {0.005, 0.03, 0.2}) {
      double acc = 0.0;
      for (const auto& [j, wj] : slit_weights(g, c, w)) acc += wj * f[j];
      CHECK(acc == doctest::Approx(w * (2.0 + 3.0 * c)).epsilon(1e-12));
    }
    double point = 0.0;
    for (const auto& [j, wj] : slit_weights(g, c, 0.0)) point += wj * f[j];
    CHECK(point == doctest::Approx(2.0 + 3.0 * c).epsilon(1e-12));
  }
  CHECK(slit_weights(g, 5.0, 0.0).empty());
  CHECK_THROWS(slit_weights(g, 0.0, -1.0));
}

TEST_CASE("point-slit singles equal the kernel marginal") {
  const auto k = gaussian_kernel(0.01, 0.02, 256);
  const auto pos = nodes(k.grid_s);
  const auto s = singles_scan(k, point_slits(), pos);
  const auto m = tpa::marginal_intensity(k, tpa::Axis::signal);
  REQUIRE(s.rates.size() == m.size());
  for (std::size_t j = 0; j < m.size(); ++j) CHECK(s.rates[j] == doctest::Approx(m[j]).epsilon(1e-12));
}

TEST_CASE("coincidences never exceed singles") {
  const auto k = gaussian_kernel(0.01, 0.03, 256);
  const DetectionGeometry geom;
  const auto pos = nodes(k.grid_s);
  const auto s = singles_scan(k, geom, pos);
  for (double ic : {-0.02, 0.0, 0.013}) {
    const auto c = coincidence_scan(k, geom, ic, pos);
    for (std::size_t j = 0; j < pos.size(); ++j) {
      CHECK(c.rates[j] >= 0.0);
      CHECK(c.rates[j] <= s.rates[j] * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("widening a slit never lowers a rate or a width") {
  const auto k = gaussian_kernel(0.01, 0.03, 256);
  const auto pos = nodes(k.grid_s);
  DetectionGeometry narrow;
  narrow.slit_width_signal = Length::mm(0.05);
  narrow.slit_width_idler = Length::mm(0.1);
  DetectionGeometry wide = narrow;
  wide.slit_width_signal = Length::mm(0.2);
  wide.slit_width_idler = Length::mm(0.4);
  const auto sn = singles_scan(k, narrow, pos);
  const auto sw = singles_scan(k, wide, pos);
  const auto cn = coincidence_scan(k, narrow, 0.0, pos);
  const auto cw = coincidence_scan(k, wide, 0.0, pos);
  for (std::size_t j = 0; j < pos.size(); ++j) {
    CHECK(sw.rates[j] >= sn.rates[j]);
    CHECK(cw.rates[j] >= cn.rates[j]);
  }
  CHECK(fwhm_of(sw) >= fwhm_of(sn));
  CHECK(fwhm_of(cw) >= fwhm_of(cn));
}

TEST_CASE("FWHM of a sampled Gaussian") {
  ScanSpectrum s;
  for (int j = -200; j <= 200; ++j) {
    s.positions.push_back(j * 0.001);
    s.rates.push_back(std::exp(-0.5 * std::pow(j * 0.001 / 0.03, 2)));
  }
  const double expect = 2.0 * std::sqrt(2.0 * std::log(2.0)) * 0.03;
  CHECK(fwhm_of(s) == doctest::Approx(expect).epsilon(1e-3));
  CHECK(fwhm_of(s, FwhmMethod::gaussian_fit) == doctest::Approx(expect).epsilon(1e-8));

  ScanSpectrum two = s;
  for (std::size_t j = 0; j < two.rates.size(); ++j) {
    two.rates[j] = std::exp(-0.5 * std::pow((two.positions[j] - 0.1) / 0.01, 2)) +
                   std::exp(-0.5 * std::pow((two.positions[j] + 0.1) / 0.01, 2));
  }
  CHECK_THROWS_AS(fwhm_of(two), std::domain_error);
}

TEST_CASE("argmax tie goes to the smaller |k|") {
  const std::vector<double> x{-0.2, -0.1, 0.05, 0.3};
  const std::vector<double> y{1.0, 3.0, 3.0, 3.0};
  CHECK(argmax_central(x, y) == 2);
}

TEST_CASE("Fedorov ratio equals the Schmidt number for point slits") {
  for (double r : {1.0, 2.0, 4.0}) {
    const auto k = gaussian_kernel(0.01, 0.01 * r, 1024);
    const auto f = fedorov_ratio(k, point_slits());
    CHECK(f.ratio == doctest::Approx((1.0 + r * r) / (2.0 * r)).epsilon(2e-3));
    CHECK(std::abs(f.idler_center) <= k.grid_i.spacing());
  }
}

TEST_CASE("passband samples") {
  const auto c = bbo_like();
  const optics::IndexSource idx = optics::ConstantIndices{c.signal_index, c.pump_index};
  const DetectionGeometry geom;
  const auto s = passband_samples(c, idx, geom, 21);
  REQUIRE(s.size() == 21);
  double total = 0.0;
  for (const auto& x : s) total += x.weight;
  CHECK(total == doctest::Approx(1.0));
  CHECK(s[10].signal.in_nm() == doctest::Approx(810.0));
  CHECK(s[0].weight == doctest::Approx(s[20].weight));
  CHECK(s[10].K == doctest::Approx(optics::transverse_K(c).K).epsilon(1e-12));
  // +-3 sigma of a 10 nm FWHM filter
  CHECK(s[20].signal.in_nm() - 810.0 == doctest::Approx(3.0 * 10.0 / 2.3548200450309493));

  DetectionGeometry mono = geom;
  mono.filter_fwhm = Length::nm(0.0);
  CHECK(passband_samples(c, idx, mono, 21).size() == 1);
}

TEST_CASE("wavelength averaging") {
  const auto c = bbo_like();
  const optics::IndexSource idx = optics::ConstantIndices{c.signal_index, c.pump_index};
  const double s = 0.0094;
  tpa::MultiPeakParams p;
  p.widths = {s, s};
  p.K = optics::transverse_K(c).K;
  const auto [gs0, gi0] = tpa::default_grids(p, 512, 8.0);
  const KernelBuilder build = [&](double K, const WavevectorGrid& a, const WavevectorGrid& b) {
    auto q = p;
    q.K = K;
    return tpa::build_multipeak(q, a, b);
  };

  SUBCASE("a zero-width filter reproduces the degenerate intensity") {
    DetectionGeometry mono;
    mono.filter_fwhm = Length::nm(0.0);
    const auto avg = wavelength_average(c, idx, mono, build, gs0, gi0);
    const auto ref = joint_intensity(build(p.K, gs0, gi0));
    CHECK((avg.density - ref.density).cwiseAbs().maxCoeff() < 1e-12 * ref.density.maxCoeff());
  }
  SUBCASE("a symmetric passband keeps the peak and broadens it") {
    const DetectionGeometry geom;
    const auto avg = wavelength_average(c, idx, geom, build, gs0, gi0);
    const auto ref = joint_intensity(build(p.K, gs0, gi0));
    const auto pos = nodes(gs0);
    const auto sa = singles_scan(avg, point_slits(), pos);
    const auto sr = singles_scan(ref, point_slits(), pos);
    const auto ia = argmax_central(sa.positions, sa.rates);
    const auto ir = argmax_central(sr.positions, sr.rates);
    CHECK(std::abs(pos[ia] - pos[ir]) <= gs0.spacing());
    CHECK(fwhm_of(sa) > fwhm_of(sr));
  }
}
