#include "spdc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "spdc/detection.hpp"
#include "spdc/io.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/slm.hpp"
#include "spdc/tpa_kernel.hpp"

namespace spdc::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Context {
  const config::RunConfig& cfg;
  const RunOptions& opts;
  fs::path dir;
  RunResult result;
  std::ostringstream log;

  tpa::Branches branches() const {
    return opts.both_branches ? tpa::Branches::both : tpa::Branches::single;
  }
  std::size_t points() const { return opts.grid_points.value_or(cfg.grid.points); }

  void write(const std::string& name, const std::string& data) {
    const fs::path p = dir / name;
    io::write_atomic(p, data);
    result.files.push_back(p);
  }
  void warn(const std::vector<std::string>& ws) {
    for (const auto& w : ws) {
      if (std::find(result.warnings.begin(), result.warnings.end(), w) == result.warnings.end()) {
        result.warnings.push_back(w);
      }
    }
  }
  void say(const std::string& line) { result.summary += line + "\n"; }
};

std::string num(double v) { return io::format_number(v); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json grid_json(const optics::WavevectorGrid& g) {
  return {{"k_min", g.k_min()}, {"k_max", g.k_max()}, {"points", g.size()}};
}

std::pair<optics::WavevectorGrid, optics::WavevectorGrid> grids(const Context& cx) {
  return tpa::default_grids(cx.cfg.multipeak(), cx.points(), cx.cfg.grid.margin_sigma, cx.branches());
}

tpa::TpaKernel kernel(const Context& cx) {
  const auto [gs, gi] = grids(cx);
  return tpa::build_multipeak(cx.cfg.multipeak(), gs, gi, cx.branches());
}

detection::DetectionGeometry geometry(const Context& cx) {
  auto g = cx.cfg.detection;
  if (cx.opts.point_slits) {
    g.slit_width_signal = Length::um(0.0);
    g.slit_width_idler = Length::um(0.0);
  }
  return g;
}

// Joint intensity in detector coordinates, optionally averaged over the filter.
detection::JointIntensity joint(Context& cx) {
  const auto params = cx.cfg.multipeak();
  if (!cx.opts.wavelength_avg) {
    const auto k = kernel(cx);
    cx.warn(k.warnings);
    return detection::joint_intensity(k);
  }
  const auto& cfg = cx.cfg;
  const auto samples = detection::passband_samples(cfg.phase_match, cfg.indices, cfg.detection,
                                                   cfg.wavelength_samples);
  // widen the grids so every sample's peaks stay inside
  const double lambda0 = 2.0 * cfg.phase_match.pump_wavelength.in_um();
  const double outer = params.M > 1 ? (params.M - 1) * params.k0 / 2.0 : 0.0;
  double extra = 0.0;
  for (const auto& s : samples) {
    for (Length l : {s.signal, s.idler}) {
      const double r = l.in_um() / lambda0;
      extra = std::max(extra, std::abs(0.5 * s.K * r - 0.5 * params.K) + outer * std::abs(r - 1.0));
    }
  }
  const auto [gs0, gi0] = grids(cx);
  const optics::WavevectorGrid gs = optics::WavevectorGrid(gs0.k_min() - extra, gs0.k_max() + extra, gs0.size());
  const optics::WavevectorGrid gi = optics::WavevectorGrid(gi0.k_min() - extra, gi0.k_max() + extra, gi0.size());
  const auto br = cx.branches();
  std::vector<std::string> ws;
  const detection::KernelBuilder build = [&](double K, const optics::WavevectorGrid& a,
                                             const optics::WavevectorGrid& b) {
    auto p = params;
    p.K = K;
    auto k = tpa::build_multipeak(p, a, b, br);
    ws.insert(ws.end(), k.warnings.begin(), k.warnings.end());
    return k;
  };
  auto out = detection::wavelength_average(cfg.phase_match, cfg.indices, cfg.detection, build, gs, gi,
                                           cfg.wavelength_samples);
  cx.warn(ws);
  cx.log << "wavelength samples: " << samples.size() << "\n";
  return out;
}

std::vector<double> nodes(const optics::WavevectorGrid& g) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = g[j];
  return v;
}

void run_tpa(Context& cx) {
  const auto k = kernel(cx);
  cx.warn(k.warnings);
  cx.write("kernel.csv", io::kernel_csv(k));
  cx.write("marginal_signal.csv", io::profile_csv("k_um_inv", "intensity", nodes(k.grid_s),
                                                  tpa::marginal_intensity(k, tpa::Axis::signal)));
  cx.write("marginal_idler.csv", io::profile_csv("k_um_inv", "intensity", nodes(k.grid_i),
                                                 tpa::marginal_intensity(k, tpa::Axis::idler)));
  const auto w = cx.cfg.widths();
  ordered_json meta = {{"grid_signal", grid_json(k.grid_s)},
                       {"grid_idler", grid_json(k.grid_i)},
                       {"sigma_k", w.sigma_k},
                       {"sigma_k_prime", w.sigma_k_prime},
                       {"K", cx.cfg.offset_K()},
                       {"norm_squared", k.norm_squared()},
                       {"warnings", k.warnings}};
  cx.write("kernel.meta.json", dump(meta));
  cx.say("kernel " + std::to_string(k.grid_s.size()) + "x" + std::to_string(k.grid_i.size()) +
         " written, norm " + num(k.norm_squared()));
}

void run_schmidt(Context& cx) {
  const auto k = kernel(cx);
  cx.warn(k.warnings);
  const auto dec = schmidt::schmidt_decompose(k);
  cx.warn(dec.warnings);
  const auto m = schmidt::schmidt_number(dec);
  cx.write("coefficients.csv", io::coefficients_csv(dec));
  cx.write("signal_modes.csv", io::modes_csv(dec, tpa::Axis::signal));
  cx.write("idler_modes.csv", io::modes_csv(dec, tpa::Axis::idler));
  ordered_json meta = {{"modes", dec.size()},
                       {"schmidt_number", m.schmidt_number},
                       {"purity", m.purity},
                       {"truncation_deficit", dec.truncation_deficit},
                       {"warnings", dec.warnings}};
  cx.write("schmidt.meta.json", dump(meta));
  cx.say("c1^2 = " + num(dec.coefficients.front() * dec.coefficients.front()));
  cx.say("schmidt_number = " + num(m.schmidt_number));
  cx.say("purity = " + num(m.purity));
}

void run_scan(Context& cx) {
  const auto j = joint(cx);
  const auto geom = geometry(cx);
  const auto pos = nodes(j.grid_s);
  detection::ScanSpectrum s;
  std::string name;
  if (cx.opts.idler_center) {
    s = detection::coincidence_scan(j, geom, *cx.opts.idler_center, pos);
    name = "coincidence.csv";
  } else {
    s = detection::singles_scan(j, geom, pos);
    name = "singles.csv";
  }
  cx.warn(s.warnings);
  cx.write(name, io::scan_csv(s));
  try {
    cx.say("fwhm = " + num(detection::fwhm_of(s)));
  } catch (const std::domain_error&) {
    cx.say("fwhm = n/a (multiple peaks)");
  }
}

void run_fedorov(Context& cx) {
  const auto j = joint(cx);
  const auto r = detection::fedorov_ratio(j, geometry(cx));
  cx.say("fedorov_ratio = " + num(r.ratio));
  cx.say("singles_fwhm = " + num(r.singles_fwhm));
  cx.say("coincidence_fwhm = " + num(r.coincidence_fwhm));
  cx.say("idler_center = " + num(r.idler_center));
}

void run_crosstalk(Context& cx) {
  const auto params = cx.cfg.multipeak();
  if (params.M < 2) throw std::invalid_argument("crosstalk needs pump.modes >= 2");
  const auto [gs, gi] = grids(cx);
  const auto logs = detection::multipeak_mode_log_intensities(params, gs, gi, cx.branches());
  const auto x = detection::crosstalk_from_log_intensities(logs);
  cx.write("crosstalk.csv", io::crosstalk_csv(x));
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      if (m != n) worst = std::max(worst, x.log10(m, n));
    }
  }
  cx.say("max_offdiag_log10 = " + num(worst));
}

void run_pump(Context& cx) {
  const auto p = cx.cfg.pump_profile();
  const auto field = slm::pump_field(p, slm::pump_x_grid(p, 2 * cx.points() + 1));
  cx.write("pump_field.csv", io::field_csv(field));
  const auto [gs, gi] = grids(cx);
  (void)gi;
  const double half = gs.k_max() - gs.k_min();
  const auto spec = slm::angular_spectrum(field, optics::WavevectorGrid::centered(0.0, half, cx.points()));
  std::vector<double> q = nodes(spec.grid);
  std::vector<double> power(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) power[j] = std::norm(spec.amplitude[j]);
  cx.write("pump_spectrum.csv", io::profile_csv("q_um_inv", "intensity", q, power));
  cx.say("envelope_fwhm_um = " + num(slm::envelope_fwhm(field, p)));
}

void run_hologram(Context& cx) {
  const auto p = cx.cfg.pump_profile();
  const auto& geom = cx.cfg.slm;
  const auto target = slm::pump_field(p, geom.crystal_coordinates());
  const auto img = slm::encode_hologram(target, geom);
  slm::export_pgm(img, cx.dir / "hologram.pgm");
  cx.result.files.push_back(cx.dir / "hologram.pgm");

  const auto beam = slm::input_beam(geom, cx.cfg.input_beam_fwhm);
  const auto rec = slm::simulate_first_order(img, beam, geom.magnification);
  const auto zero = slm::simulate_first_order(img, beam, geom.magnification, slm::DiffractionOrder::zero);
  std::vector<slm::cplx> expected(target.size());
  for (std::size_t c = 0; c < expected.size(); ++c) expected[c] = target.amplitude[c] * beam.amplitude[c];

  ordered_json rep = {{"grating_period_px", img.grating_period_px},
                      {"amplitude_overlap_first_order", slm::amplitude_overlap(expected, rec.amplitude)},
                      {"field_overlap_first_order", slm::field_overlap(expected, rec.amplitude)},
                      {"amplitude_overlap_zero_order", slm::amplitude_overlap(expected, zero.amplitude)},
                      {"target_envelope_fwhm_um", cx.cfg.pump.fwhm.in_um()},
                      {"recovered_envelope_fwhm_um", slm::envelope_fwhm(rec, p)}};
  if (p.M > 1) {
    rep["target_center_side_ratio"] = slm::center_side_ratio(target);
    rep["recovered_center_side_ratio"] = slm::center_side_ratio(rec);
  }
  cx.write("hologram_report.json", dump(rep));
  cx.write("target_field.csv", io::field_csv(target));
  cx.write("recovered_field.csv", io::field_csv(rec));
  cx.say("amplitude_overlap_first_order = " + num(rep["amplitude_overlap_first_order"].get<double>()));
  cx.say("recovered_envelope_fwhm_um = " + num(rep["recovered_envelope_fwhm_um"].get<double>()));
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"tpa",       "schmidt", "scan",    "fedorov",
                                                 "crosstalk", "pump",    "hologram"};
  return names;
}

RunResult run(const std::string& subcommand, const config::RunConfig& cfg, const RunOptions& opts) {
  Context cx{cfg, opts, opts.out_dir.value_or(cfg.output_directory), {}, {}};
  if (opts.grid_points && *opts.grid_points < 16) {
    throw std::invalid_argument("--grid-points must be at least 16");
  }
  if (subcommand == "tpa") {
    run_tpa(cx);
  } else if (subcommand == "schmidt") {
    run_schmidt(cx);
  } else if (subcommand == "scan") {
    run_scan(cx);
  } else if (subcommand == "fedorov") {
    run_fedorov(cx);
  } else if (subcommand == "crosstalk") {
    run_crosstalk(cx);
  } else if (subcommand == "pump") {
    run_pump(cx);
  } else if (subcommand == "hologram") {
    run_hologram(cx);
  } else {
    throw UsageError("unknown subcommand '" + subcommand + "'");
  }

  std::string log = "subcommand: " + subcommand + "\n";
  log += "grid_points: " + std::to_string(cx.points()) + (opts.grid_points ? "  [flag]\n" : "  [config]\n");
  log += "wavelength_avg: " + std::string(opts.wavelength_avg ? "on" : "off") + "\n";
  log += "both_branches: " + std::string(opts.both_branches ? "on" : "off") + "\n";
  log += "point_slits: " + std::string(opts.point_slits ? "on" : "off") + "\n";
  if (opts.idler_center) log += "idler_center: " + num(*opts.idler_center) + "\n";
  log += "\n[parameters]\n" + config::provenance_log(cfg);
  log += "\n[normalized config]\n" + config::emit_normalized(cfg);
  log += cx.log.str();
  log += "\n[warnings]\n";
  for (const auto& w : cx.result.warnings) log += w + "\n";
  log += "\n[result]\n" + cx.result.summary;
  io::write_atomic(cx.dir / (subcommand + ".log"), log);
  cx.result.files.push_back(cx.dir / (subcommand + ".log"));
  return std::move(cx.result);
}

}  // namespace spdc::pipeline
