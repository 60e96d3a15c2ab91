#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spdc/optics.hpp"

using namespace spdc;
using namespace spdc::optics;

namespace {

constexpr double deg = std::numbers::pi / 180.0;

PhaseMatchConfig example_config() {
  PhaseMatchConfig c;
  c.crystal_length = Length::mm(3.0);
  c.pump_wavelength = Length::nm(405.0);
  c.signal_index = 1.6614;
  c.pump_index = 1.5672;
  c.regime = Regime::noncollinear;
  return c;
}

SellmeierSource bbo(double cut_deg) {
  SellmeierSource s;
  s.crystal.ordinary = {2.7359, 0.01878, 0.01822, 0.01354};
  s.crystal.extraordinary = {2.3753, 0.01224, 0.01667, 0.01516};
  s.crystal.valid_min = Length::nm(189.0);
  s.crystal.valid_max = Length::nm(3500.0);
  s.cut_angle = cut_deg * deg;
  return s;
}

}  // namespace

TEST_CASE("length conversions") {
  CHECK(Length::mm(3.0).in_um() == doctest::Approx(3000.0));
  CHECK(Length::nm(405.0).in_um() == doctest::Approx(0.405));
  CHECK(Length::um(250.0).in_mm() == doctest::Approx(0.25));
}

TEST_CASE("sigma_k from envelope FWHM") {
  // 2 sqrt(2 ln 2) / FWHM, evaluated in numpy
  CHECK(fwhm_to_sigma_k(Length::um(250.0)) == doctest::Approx(0.009419280180123796).epsilon(1e-14));
  CHECK(fwhm_to_sigma_k(Length::um(246.0)) == doctest::Approx(0.009572439207442883).epsilon(1e-14));
  CHECK(sigma_k_to_fwhm(fwhm_to_sigma_k(Length::um(246.0))).in_um() == doctest::Approx(246.0));
  CHECK_THROWS_AS(fwhm_to_sigma_k(Length::um(0.0)), std::invalid_argument);
}

TEST_CASE("phase-matching width") {
  auto c = example_config();
  CHECK(sigma_prime(c) == doctest::Approx(0.0031701009425325415).epsilon(1e-12));
  c.regime = Regime::collinear;
  c.pump_index = 24.0 * 0.405 / two_pi;  // k_p = 24 rad/um
  CHECK(sigma_prime(c) == doctest::Approx(0.35848857195857664).epsilon(1e-12));
}

TEST_CASE("noncollinear offset") {
  const auto c = example_config();
  const auto off = transverse_K(c);
  CHECK(off.K == doctest::Approx(8.679653687096893).epsilon(1e-12));
  const double ks = two_pi * c.signal_index / 0.81;
  CHECK(std::sin(off.theta_s0) == doctest::Approx(off.K / (2.0 * ks)));
  // nondegenerate formula reduces to the degenerate one
  CHECK(transverse_K_at(c.signal_index, c.signal_index, c.pump_index, c.pump_wavelength,
                        Length::nm(810.0)) == doctest::Approx(off.K).epsilon(1e-12));
}

TEST_CASE("radicand constraint is named") {
  auto c = example_config();
  c.signal_index = 1.5;
  c.pump_index = 1.6;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("radicand"), std::invalid_argument);
  c.regime = Regime::collinear;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("idler wavelength from energy conservation") {
  CHECK(idler_wavelength(Length::nm(405.0), Length::nm(810.0)).in_nm() == doctest::Approx(810.0));
  CHECK(idler_wavelength(Length::nm(405.0), Length::nm(800.0)).in_nm() ==
        doctest::Approx(1.0 / (1.0 / 405.0 - 1.0 / 800.0)));
  CHECK_THROWS(idler_wavelength(Length::nm(405.0), Length::nm(400.0)));
}

TEST_CASE("BBO indices and the 10 degree external angle") {
  const auto src = bbo(33.3047);
  const auto n = indices_at(src, Length::nm(405.0), Length::nm(810.0));
  CHECK(n.signal == doctest::Approx(1.66026).epsilon(1e-5));
  CHECK(n.idler == doctest::Approx(n.signal));
  CHECK(n.pump == doctest::Approx(1.65118).epsilon(1e-5));

  PhaseMatchConfig c = example_config();
  c.signal_index = n.signal;
  c.pump_index = n.pump;
  const auto off = transverse_K(c);
  CHECK(off.theta_s0 / deg == doctest::Approx(6.0036).epsilon(1e-4));
  CHECK(external_angle(off.theta_s0, n.signal) / deg == doctest::Approx(10.0).epsilon(1e-4));
}

TEST_CASE("Sellmeier validity window") {
  CHECK_THROWS_AS(refractive_indices(bbo(30.0).crystal, Length::nm(150.0), 0.0), std::out_of_range);
  // along the optic axis the extraordinary ray sees n_o
  const auto p = refractive_indices(bbo(0.0).crystal, Length::nm(500.0), 0.0);
  CHECK(p.extraordinary == doctest::Approx(p.ordinary));
}

TEST_CASE("wavevector grid") {
  const WavevectorGrid g(-1.0, 1.0, 201);
  CHECK(g.spacing() == doctest::Approx(0.01));
  CHECK(g[0] == -1.0);
  CHECK(g[200] == doctest::Approx(1.0));
  CHECK(g.contains(0.5));
  CHECK_FALSE(g.contains(1.5));
  const auto s = g.scaled(2.0);
  CHECK(s.k_min() == -2.0);
  CHECK(s.size() == g.size());
  CHECK_THROWS(WavevectorGrid(1.0, 0.0, 100));
  CHECK_THROWS(WavevectorGrid(0.0, 1.0, 4));
}
