#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/FFT>

#include "spdc/io.hpp"
#include "spdc/slm.hpp"

namespace spdc::slm {

namespace {

constexpr double pi = std::numbers::pi;

double wrap_turn(double phase) {
  double r = std::fmod(phase, two_pi);
  if (r < 0.0) r += two_pi;
  return r;
}

std::uint8_t quantize(double phase) {
  const auto level = std::llround(phase / two_pi * 256.0);
  return static_cast<std::uint8_t>(((level % 256) + 256) % 256);
}

// Exact carrier phase of column c: the grating repeats every `period` pixels.
double carrier(int c, int period) {
  return two_pi * static_cast<double>(c % period) / static_cast<double>(period);
}

}  // namespace

void HologramImage::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("hologram: empty image");
  if (!(pixel_pitch_um > 0.0)) throw std::invalid_argument("hologram: pixel pitch must be positive");
  if (grating_period_px < 2) throw std::invalid_argument("hologram: grating period must be >= 2 pixels");
  if (levels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("hologram: raster size does not match width x height");
  }
}

void SlmGeometry::validate() const {
  if (width < 2 || height < 1) throw std::invalid_argument("slm: raster too small");
  if (!(pixel_pitch_um > 0.0)) throw std::invalid_argument("slm: pixel pitch must be positive");
  if (grating_period_px < 2) throw std::invalid_argument("slm: grating period must be >= 2 pixels");
  if (!(magnification > 0.0)) throw std::invalid_argument("slm: magnification must be positive");
}

std::vector<double> SlmGeometry::slm_coordinates() const {
  std::vector<double> x(static_cast<std::size_t>(width));
  const double mid = 0.5 * (width - 1);
  for (int c = 0; c < width; ++c) x[static_cast<std::size_t>(c)] = (c - mid) * pixel_pitch_um;
  return x;
}

std::vector<double> SlmGeometry::crystal_coordinates() const {
  auto x = slm_coordinates();
  for (auto& v : x) v /= magnification;
  return x;
}

std::vector<cplx> resample_to_columns(const FieldProfile1D& target, const SlmGeometry& geom) {
  target.validate();
  geom.validate();
  const auto xs = geom.crystal_coordinates();
  std::vector<cplx> out(xs.size());
  for (std::size_t c = 0; c < xs.size(); ++c) {
    const double x = xs[c];
    if (x < target.x.front() || x > target.x.back()) continue;
    auto hi = std::upper_bound(target.x.begin(), target.x.end(), x);
    if (hi == target.x.end()) {
      out[c] = target.amplitude.back();
      continue;
    }
    const auto j = static_cast<std::size_t>(hi - target.x.begin());
    const double t = (x - target.x[j - 1]) / (target.x[j] - target.x[j - 1]);
    out[c] = (1.0 - t) * target.amplitude[j - 1] + t * target.amplitude[j];
  }
  return out;
}

double inverse_sinc(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("inverse_sinc: argument outside [0, 1]");
  if (a == 1.0) return 0.0;
  if (a == 0.0) return -pi;
  auto f = [a](double x) { return (x == 0.0 ? 1.0 : std::sin(x) / x) - a; };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, -pi, 0.0, -a, 1.0 - a,
                                                   boost::math::tools::eps_tolerance<double>(50),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

std::vector<double> hologram_phase_row(const std::vector<cplx>& target_columns,
                                       const SlmGeometry& geom) {
  geom.validate();
  if (target_columns.size() != static_cast<std::size_t>(geom.width)) {
    throw std::invalid_argument("hologram: target row length differs from SLM width");
  }
  double peak = 0.0;
  for (const auto& t : target_columns) peak = std::max(peak, std::abs(t));
  std::vector<double> phase(target_columns.size(), 0.0);
  if (peak == 0.0) return phase;

  for (int c = 0; c < geom.width; ++c) {
    const cplx t = target_columns[static_cast<std::size_t>(c)];
    const double a = std::abs(t) / peak;
    if (a > 1.0 + 1e-12) throw std::logic_error("hologram: normalized amplitude exceeds 1");
    const double depth = 1.0 + inverse_sinc(std::min(a, 1.0)) / pi;
    // The -pi*depth offset makes the first order carry exactly -A exp(i phi).
    const double inner = wrap_turn(carrier(c, geom.grating_period_px) + std::arg(t) - pi * depth);
    phase[static_cast<std::size_t>(c)] = depth * inner;
  }
  return phase;
}

HologramImage encode_hologram(const FieldProfile1D& target, const SlmGeometry& geom) {
  const auto row = hologram_phase_row(resample_to_columns(target, geom), geom);
  HologramImage img{geom.width, geom.height, geom.pixel_pitch_um, geom.grating_period_px, {}};
  img.levels.resize(static_cast<std::size_t>(geom.width) * static_cast<std::size_t>(geom.height));
  std::vector<std::uint8_t> q(row.size());
  std::transform(row.begin(), row.end(), q.begin(), quantize);
  for (int r = 0; r < geom.height; ++r) {
    std::copy(q.begin(), q.end(), img.levels.begin() + static_cast<std::ptrdiff_t>(r) * geom.width);
  }
  return img;
}

FieldProfile1D simulate_order(const std::vector<double>& phase, const std::vector<cplx>& input_beam,
                              const SlmGeometry& geom, DiffractionOrder order) {
  geom.validate();
  if (geom.grating_period_px < 3) {
    throw std::invalid_argument("first diffraction order aliased: grating period below 3 pixels");
  }
  const auto n = static_cast<std::size_t>(geom.width);
  if (phase.size() != n || input_beam.size() != n) {
    throw std::invalid_argument("simulate: input beam must be sampled on the hologram columns");
  }
  std::vector<cplx> u(n);
  for (std::size_t c = 0; c < n; ++c) u[c] = input_beam[c] * std::polar(1.0, phase[c]);

  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, u);
  const double fg = 1.0 / geom.grating_period_px;
  const double center = order == DiffractionOrder::first ? fg : 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double f = static_cast<double>(k) / static_cast<double>(n);
    if (f > 0.5) f -= 1.0;
    if (!(std::abs(f - center) < 0.5 * fg)) spec[k] = 0.0;
  }
  std::vector<cplx> back;
  fft.inv(back, spec);

  FieldProfile1D out{geom.crystal_coordinates(), std::move(back)};
  if (order == DiffractionOrder::first) {
    for (int c = 0; c < geom.width; ++c) {
      out.amplitude[static_cast<std::size_t>(c)] *=
          -std::polar(1.0, -carrier(c, geom.grating_period_px));
    }
  }
  return out;
}

FieldProfile1D simulate_first_order(const HologramImage& holo, const FieldProfile1D& input_beam,
                                    double magnification, DiffractionOrder order) {
  holo.validate();
  const SlmGeometry geom{holo.width, holo.height, holo.pixel_pitch_um, holo.grating_period_px,
                         magnification};
  std::vector<double> phase(static_cast<std::size_t>(holo.width));
  const int row = holo.height / 2;
  for (int c = 0; c < holo.width; ++c) {
    phase[static_cast<std::size_t>(c)] = two_pi * holo.at(c, row) / 256.0;
  }
  return simulate_order(phase, input_beam.amplitude, geom, order);
}

FieldProfile1D input_beam(const SlmGeometry& geom, std::optional<Length> intensity_fwhm) {
  geom.validate();
  FieldProfile1D out{geom.slm_coordinates(), {}};
  out.amplitude.assign(out.x.size(), 1.0);
  if (intensity_fwhm) {
    const double w = intensity_fwhm->in_um();
    if (!(w > 0.0)) throw std::invalid_argument("input beam FWHM must be positive");
    for (std::size_t c = 0; c < out.x.size(); ++c) {
      out.amplitude[c] = std::exp(-2.0 * std::log(2.0) * out.x[c] * out.x[c] / (w * w));
    }
  }
  return out;
}

double field_overlap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("overlap: sample counts differ");
  cplx ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    ab += std::conj(a[j]) * b[j];
    aa += std::norm(a[j]);
    bb += std::norm(b[j]);
  }
  if (aa == 0.0 || bb == 0.0) throw std::invalid_argument("overlap: zero field");
  return std::abs(ab) / std::sqrt(aa * bb);
}

double amplitude_overlap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> ma(a.size());
  std::vector<cplx> mb(b.size());
  std::transform(a.begin(), a.end(), ma.begin(), [](cplx v) { return cplx(std::abs(v)); });
  std::transform(b.begin(), b.end(), mb.begin(), [](cplx v) { return cplx(std::abs(v)); });
  return field_overlap(ma, mb);
}

double center_side_ratio(const FieldProfile1D& field) {
  field.validate();
  std::vector<double> I(field.size());
  for (std::size_t j = 0; j < I.size(); ++j) I[j] = std::norm(field.amplitude[j]);
  const double top = *std::max_element(I.begin(), I.end());
  std::vector<std::size_t> peaks;
  for (std::size_t j = 1; j + 1 < I.size(); ++j) {
    if (I[j] >= I[j - 1] && I[j] > I[j + 1] && I[j] > 0.05 * top) peaks.push_back(j);
  }
  if (peaks.size() < 3) throw std::domain_error("center/side ratio needs three intensity maxima");
  std::size_t mid = 0;
  for (std::size_t p = 1; p < peaks.size(); ++p) {
    if (std::abs(field.x[peaks[p]]) < std::abs(field.x[peaks[mid]])) mid = p;
  }
  if (mid == 0 || mid + 1 == peaks.size()) {
    throw std::domain_error("center/side ratio: central maximum has no neighbour on one side");
  }
  return I[peaks[mid]] / (0.5 * (I[peaks[mid - 1]] + I[peaks[mid + 1]]));
}

double envelope_fwhm(const FieldProfile1D& field, const PumpProfileParams& params) {
  field.validate();
  params.validate();
  std::vector<double> m(field.size());
  double mmax = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    m[j] = pump_modulation(params, field.x[j]);
    mmax = std::max(mmax, std::abs(m[j]));
  }
  const double emax = field.peak();
  std::vector<std::size_t> use;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (std::abs(m[j]) >= 0.5 * mmax && std::abs(field.amplitude[j]) > 0.05 * emax) use.push_back(j);
  }
  if (use.size() < 3) throw std::domain_error("envelope fit: too few usable samples");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(use.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(use.size()));
  for (std::size_t r = 0; r < use.size(); ++r) {
    // amplitude weights keep the noisy low-signal samples from dominating the log fit
    const double x = field.x[use[r]];
    const double w = std::abs(field.amplitude[use[r]]);
    const auto i = static_cast<Eigen::Index>(r);
    A(i, 0) = w;
    A(i, 1) = w * x;
    A(i, 2) = w * x * x;
    y(i) = w * std::log(w / std::abs(m[use[r]]));
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  if (!(c(2) < 0.0)) throw std::domain_error("envelope fit: no decaying envelope");
  const double sigma = std::sqrt(-2.0 * c(2));
  return 2.0 * std::sqrt(2.0 * std::log(2.0)) / sigma;
}

void export_pgm(const HologramImage& holo, const std::filesystem::path& path) {
  holo.validate();
  std::string data = "P5 " + std::to_string(holo.width) + " " + std::to_string(holo.height) + " 255\n";
  data.append(reinterpret_cast<const char*>(holo.levels.data()), holo.levels.size());
  io::write_atomic(path, data);
}

HologramImage import_pgm(const std::filesystem::path& path, double pixel_pitch_um,
                         int grating_period_px) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::IoError("cannot open " + path.string());
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P5" || maxval != 255 || w < 1 || h < 1) {
    throw io::IoError("not an 8-bit binary PGM: " + path.string());
  }
  in.get();
  HologramImage img{w, h, pixel_pitch_um, grating_period_px, {}};
  img.levels.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  in.read(reinterpret_cast<char*>(img.levels.data()), static_cast<std::streamsize>(img.levels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.levels.size())) {
    throw io::IoError("truncated PGM payload: " + path.string());
  }
  img.validate();
  return img;
}

}  // namespace spdc::slm
