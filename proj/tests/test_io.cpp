#include <doctest.h>

#include <filesystem>

#include "spdc/io.hpp"

using namespace spdc;

namespace {

std::filesystem::path scratch() {
  auto d = std::filesystem::temp_directory_path() / "spdc_test_io";
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("number formatting has 17 significant digits") {
  CHECK(io::format_number(0.1) == "1.0000000000000001e-01");
  CHECK(io::format_number(-2.5) == "-2.5000000000000000e+00");
  CHECK(io::format_number(-0.0) == "0.0000000000000000e+00");
  CHECK(std::stod(io::format_number(0.009419280180123796)) == 0.009419280180123796);
}

TEST_CASE("atomic write creates directories and leaves no temp file") {
  const auto dir = scratch();
  const auto p = dir / "a" / "b.csv";
  io::write_atomic(p, "x\n1\n");
  CHECK(io::read_file(p) == "x\n1\n");
  CHECK_FALSE(std::filesystem::exists(p.string() + ".tmp"));
  io::write_atomic(p, "y\n");
  CHECK(io::read_file(p) == "y\n");
  CHECK_THROWS_AS(io::read_file(dir / "missing.csv"), io::IoError);
}

TEST_CASE("CSV tables") {
  const auto t = io::parse_csv("a,b\n1,2\n3.5,-4e-3\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.column("b") == std::vector<double>{2.0, -4e-3});
  CHECK_THROWS_AS(t.column("c"), io::IoError);
  CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), io::IoError);
  CHECK_THROWS_AS(io::parse_csv("a\nx\n"), io::IoError);
}

TEST_CASE("field profile round trip") {
  slm::FieldProfile1D f{{-1.0, 0.0, 2.0}, {{1.0, 0.5}, {0.25, -1.0}, {0.0, 0.0}}};
  const auto back = io::parse_field_csv(io::field_csv(f));
  CHECK(back.x == f.x);
  CHECK(back.amplitude == f.amplitude);
}

TEST_CASE("kernel and scan CSV layouts") {
  const optics::WavevectorGrid g(-0.1, 0.1, 17);
  const auto k = tpa::build_double_gaussian({0.05, 0.05}, g, g);
  const auto csv = io::kernel_csv(k);
  CHECK(csv.rfind("ks,ki,amplitude\n", 0) == 0);
  const auto t = io::parse_csv(csv);
  CHECK(t.rows.size() == 289);
  CHECK(t.rows[18][2] == k.amplitude(1, 1));

  detection::ScanSpectrum s{{0.0, 0.1}, {1.0, 2.0}, detection::ScanKind::singles, {}};
  CHECK(io::scan_csv(s).rfind("position_um_inv,rate\n", 0) == 0);

  detection::CrosstalkMatrix x{Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2)};
  x.linear(0, 1) = x.linear(1, 0) = 1e-5;
  x.log_values(0, 1) = x.log_values(1, 0) = std::log(1e-5);
  const auto xt = io::parse_csv(io::crosstalk_csv(x));
  CHECK(xt.header == std::vector<std::string>{"m", "n", "linear", "log10"});
  CHECK(xt.rows[1][3] == doctest::Approx(-5.0));
}
