#include "spdc/config.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "spdc/io.hpp"

namespace spdc::config {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// A mapping section whose keys are checked off as they are read.
class Section {
public:
  Section(YAML::Node node, std::string name, std::vector<ProvenanceEntry>& prov)
      : node_(std::move(node)), name_(std::move(name)), prov_(prov) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(line_of(node_), name_, "expected a mapping");
    }
  }

  bool present() const { return node_ && node_.IsMap(); }
  int line() const { return node_ ? line_of(node_) : 0; }

  bool has(const std::string& key) const { return present() && node_[key]; }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    const YAML::Node& cn = node_;
    return present() ? cn[key] : YAML::Node(YAML::NodeType::Undefined);
  }

  double number(const std::string& key, std::optional<double> fallback) {
    const auto n = raw(key);
    if (!n) return use_default(key, fallback);
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) throw ConfigError(line_of(n), path(key), "must be finite");
      record(key, fmt(v), true);
      return v;
    } catch (const YAML::BadConversion&) {
      throw ConfigError(line_of(n), path(key), "expected a number");
    }
  }

  long long integer(const std::string& key, std::optional<long long> fallback) {
    const auto n = raw(key);
    if (!n) {
      if (!fallback) throw ConfigError(line(), path(key), "missing required key");
      record(key, std::to_string(*fallback), false);
      return *fallback;
    }
    try {
      const long long v = n.as<long long>();
      record(key, std::to_string(v), true);
      return v;
    } catch (const YAML::BadConversion&) {
      throw ConfigError(line_of(n), path(key), "expected an integer");
    }
  }

  std::string text(const std::string& key, std::optional<std::string> fallback) {
    const auto n = raw(key);
    if (!n) {
      if (!fallback) throw ConfigError(line(), path(key), "missing required key");
      record(key, *fallback, false);
      return *fallback;
    }
    if (!n.IsScalar()) throw ConfigError(line_of(n), path(key), "expected a scalar");
    record(key, n.Scalar(), true);
    return n.Scalar();
  }

  std::vector<double> numbers(const std::string& key, std::size_t count) {
    const auto n = raw(key);
    if (!n) throw ConfigError(line(), path(key), "missing required key");
    if (!n.IsSequence() || n.size() != count) {
      throw ConfigError(line_of(n), path(key), "expected a list of " + std::to_string(count) + " numbers");
    }
    std::vector<double> out;
    std::string shown;
    for (const auto& e : n) {
      try {
        out.push_back(e.as<double>());
      } catch (const YAML::BadConversion&) {
        throw ConfigError(line_of(e), path(key), "expected a number");
      }
      shown += (shown.empty() ? "" : ", ") + fmt(out.back());
    }
    record(key, "[" + shown + "]", true);
    return out;
  }

  Section child(const std::string& key) { return Section(raw(key), path(key), prov_); }

  void record(const std::string& key, const std::string& value, bool user) {
    prov_.push_back({path(key), value, user});
  }

  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  /// Reject anything that was never read.
  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(line_of(kv.first), path(key), "unknown key");
    }
  }

private:
  double use_default(const std::string& key, std::optional<double> fallback) {
    if (!fallback) throw ConfigError(line(), path(key), "missing required key");
    record(key, fmt(*fallback), false);
    return *fallback;
  }

  YAML::Node node_;
  std::string name_;
  std::vector<ProvenanceEntry>& prov_;
  std::set<std::string> seen_;
};

template <class F>
void check(int line, const std::string& field, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, field, e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(line, field, e.what());
  }
}

optics::SellmeierAxis axis_from(const std::vector<double>& v) { return {v[0], v[1], v[2], v[3]}; }

void parse_phase_matching(Section s, RunConfig& c) {
  auto& pm = c.phase_match;
  pm.crystal_length = Length::mm(s.number("crystal_length_mm", std::nullopt));
  pm.pump_wavelength = Length::nm(s.number("pump_wavelength_nm", std::nullopt));
  const auto regime = s.text("regime", std::string("noncollinear"));
  if (regime == "noncollinear") {
    pm.regime = optics::Regime::noncollinear;
  } else if (regime == "collinear") {
    pm.regime = optics::Regime::collinear;
  } else {
    throw ConfigError(line_of(s.raw("regime")), s.path("regime"), "expected collinear or noncollinear");
  }

  const bool fixed = s.has("indices");
  const bool sell = s.has("sellmeier");
  if (fixed == sell) {
    throw ConfigError(s.line(), s.path("indices"), "give exactly one of 'indices' or 'sellmeier'");
  }
  if (fixed) {
    auto ix = s.child("indices");
    optics::ConstantIndices ci;
    ci.signal = ix.number("signal", std::nullopt);
    ci.pump = ix.number("pump", std::nullopt);
    ix.finish();
    c.indices = ci;
    s.raw("sellmeier");
  } else {
    auto sm = s.child("sellmeier");
    optics::SellmeierSource src;
    src.crystal.ordinary = axis_from(sm.numbers("ordinary", 4));
    src.crystal.extraordinary = axis_from(sm.numbers("extraordinary", 4));
    const auto window = sm.numbers("valid_nm", 2);
    src.crystal.valid_min = Length::nm(window[0]);
    src.crystal.valid_max = Length::nm(window[1]);
    src.cut_angle = sm.number("cut_angle_deg", std::nullopt) * deg;
    sm.finish();
    c.indices = src;
    s.raw("indices");
  }
  const int line = s.line();
  check(line, s.path("indices"), [&] {
    const auto n = optics::indices_at(c.indices, pm.pump_wavelength,
                                      Length::um(2.0 * pm.pump_wavelength.in_um()));
    pm.signal_index = n.signal;
    pm.pump_index = n.pump;
  });
  check(line, "phase_matching", [&] { pm.validate(); });
  s.finish();
}

void parse_pump(Section s, RunConfig& c) {
  auto& p = c.pump;
  p.fwhm = Length::um(s.number("fwhm_um", std::nullopt));
  if (!(p.fwhm.in_um() > 0.0)) throw ConfigError(s.line(), s.path("fwhm_um"), "must be positive");

  const auto sp = s.raw("sigma_k_prime");
  if (!sp) {
    s.record("sigma_k_prime", "auto", false);
  } else if (sp.IsScalar() && (sp.Scalar() == "auto" || sp.Scalar() == "match")) {
    p.sigma_prime_mode = sp.Scalar() == "auto" ? SigmaPrimeMode::automatic : SigmaPrimeMode::match;
    s.record("sigma_k_prime", sp.Scalar(), true);
  } else {
    try {
      p.sigma_prime_mode = SigmaPrimeMode::value;
      p.sigma_prime_value = sp.as<double>();
    } catch (const YAML::BadConversion&) {
      throw ConfigError(line_of(sp), s.path("sigma_k_prime"), "expected auto, match or a number");
    }
    if (!(p.sigma_prime_value > 0.0) || !std::isfinite(p.sigma_prime_value)) {
      throw ConfigError(line_of(sp), s.path("sigma_k_prime"), "must be positive");
    }
    s.record("sigma_k_prime", fmt(p.sigma_prime_value), true);
  }

  const long long modes = s.integer("modes", 1);
  if (modes < 1 || modes > 64) throw ConfigError(s.line(), s.path("modes"), "must be in [1, 64]");
  p.modes = static_cast<int>(modes);
  p.k0 = s.number("k0_um_inv", modes > 1 ? std::nullopt : std::optional<double>(0.0));
  if (s.has("alpha")) {
    p.alpha = s.number("alpha", std::nullopt);
  } else {
    s.raw("alpha");
  }
  const int line = s.line();
  check(line, "pump", [&] { c.multipeak().validate(); });
  check(line, "pump", [&] { c.pump_profile().validate(); });
  s.finish();
}

void parse_grid(Section s, RunConfig& c) {
  const long long n = s.integer("points", 512);
  if (n < 16 || n > 8192) throw ConfigError(s.line(), s.path("points"), "must be in [16, 8192]");
  c.grid.points = static_cast<std::size_t>(n);
  c.grid.margin_sigma = s.number("margin_sigma", 5.0);
  if (!(c.grid.margin_sigma > 0.0)) throw ConfigError(s.line(), s.path("margin_sigma"), "must be positive");
  s.finish();
}

void parse_detection(Section s, RunConfig& c) {
  auto& d = c.detection;
  d.focal_length = Length::mm(s.number("focal_length_mm", 100.0));
  d.slit_width_signal = Length::mm(s.number("slit_signal_mm", 0.2));
  d.slit_width_idler = Length::mm(s.number("slit_idler_mm", 0.4));
  d.central_wavelength = Length::nm(s.number("central_wavelength_nm", 810.0));
  d.filter_fwhm = Length::nm(s.number("filter_fwhm_nm", 10.0));
  const long long n = s.integer("wavelength_samples", 21);
  if (n < 1 || n > 1001) throw ConfigError(s.line(), s.path("wavelength_samples"), "must be in [1, 1001]");
  c.wavelength_samples = static_cast<std::size_t>(n);
  const int line = s.line();
  check(line, "detection", [&] { d.validate(); });
  // the whole passband has to be inside the dispersion data
  check(line, "detection", [&] {
    for (const auto& w : detection::passband_samples(c.phase_match, c.indices, d, c.wavelength_samples)) {
      (void)optics::indices_at(c.indices, c.phase_match.pump_wavelength, w.signal);
    }
  });
  s.finish();
}

void parse_hologram(Section s, RunConfig& c) {
  auto& g = c.slm;
  g.width = static_cast<int>(s.integer("width_px", 1920));
  g.height = static_cast<int>(s.integer("height_px", 1080));
  g.pixel_pitch_um = s.number("pixel_pitch_um", 8.0);
  g.grating_period_px = static_cast<int>(s.integer("grating_period_px", 6));
  g.magnification = s.number("magnification", 16.0);
  if (s.has("input_beam_fwhm_mm")) {
    c.input_beam_fwhm = Length::mm(s.number("input_beam_fwhm_mm", std::nullopt));
    if (!(c.input_beam_fwhm->in_um() > 0.0)) {
      throw ConfigError(s.line(), s.path("input_beam_fwhm_mm"), "must be positive");
    }
  } else {
    s.raw("input_beam_fwhm_mm");
    s.record("input_beam_fwhm_mm", "flat", false);
  }
  check(s.line(), "hologram", [&] { g.validate(); });
  s.finish();
}

}  // namespace

ConfigError::ConfigError(int line_no, const std::string& field_name, const std::string& what)
    : std::runtime_error((line_no > 0 ? "line " + std::to_string(line_no) + ": " : std::string()) +
                         field_name + ": " + what),
      line(line_no),
      field(field_name) {}

optics::PumpWidths RunConfig::widths() const {
  optics::PumpWidths w;
  w.sigma_k = optics::fwhm_to_sigma_k(pump.fwhm);
  switch (pump.sigma_prime_mode) {
    case SigmaPrimeMode::automatic: w.sigma_k_prime = optics::sigma_prime(phase_match); break;
    case SigmaPrimeMode::match: w.sigma_k_prime = w.sigma_k; break;
    case SigmaPrimeMode::value: w.sigma_k_prime = pump.sigma_prime_value; break;
  }
  return w;
}

double RunConfig::offset_K() const {
  if (phase_match.regime == optics::Regime::collinear) return 0.0;
  return optics::transverse_K(phase_match).K;
}

tpa::MultiPeakParams RunConfig::multipeak() const {
  tpa::MultiPeakParams p;
  p.M = pump.modes;
  p.k0 = pump.k0;
  p.K = offset_K();
  p.widths = widths();
  p.alpha = pump.alpha;
  return p;
}

slm::PumpProfileParams RunConfig::pump_profile() const {
  return {pump.modes, pump.k0, optics::fwhm_to_sigma_k(pump.fwhm), pump.alpha};
}

RunConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, "yaml", e.msg);
  }
  if (!root.IsMap()) throw ConfigError(0, "root", "expected a mapping of sections");

  RunConfig c;
  Section top(root, "", c.provenance);
  parse_phase_matching(top.child("phase_matching"), c);
  parse_pump(top.child("pump"), c);
  parse_grid(top.child("grid"), c);
  parse_detection(top.child("detection"), c);
  parse_hologram(top.child("hologram"), c);
  {
    auto out = top.child("output");
    c.output_directory = out.text("directory", std::string("out"));
    out.finish();
  }
  top.finish();
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  return parse_config_text(io::read_file(path));
}

std::string emit_normalized(const RunConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(15);  // hides unit-conversion noise so re-emission is stable
  const auto& pm = c.phase_match;
  e << YAML::BeginMap;
  e << YAML::Key << "phase_matching" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "crystal_length_mm" << YAML::Value << pm.crystal_length.in_mm();
  e << YAML::Key << "pump_wavelength_nm" << YAML::Value << pm.pump_wavelength.in_nm();
  e << YAML::Key << "regime" << YAML::Value
    << (pm.regime == optics::Regime::collinear ? "collinear" : "noncollinear");
  if (const auto* ci = std::get_if<optics::ConstantIndices>(&c.indices)) {
    e << YAML::Key << "indices" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "signal" << YAML::Value << ci->signal;
    e << YAML::Key << "pump" << YAML::Value << ci->pump;
    e << YAML::EndMap;
  } else {
    const auto& sm = std::get<optics::SellmeierSource>(c.indices);
    auto axis = [&](const char* key, const optics::SellmeierAxis& a) {
      e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << a.A << a.B << a.C << a.D
        << YAML::EndSeq;
    };
    e << YAML::Key << "sellmeier" << YAML::Value << YAML::BeginMap;
    axis("ordinary", sm.crystal.ordinary);
    axis("extraordinary", sm.crystal.extraordinary);
    e << YAML::Key << "valid_nm" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << sm.crystal.valid_min.in_nm() << sm.crystal.valid_max.in_nm() << YAML::EndSeq;
    e << YAML::Key << "cut_angle_deg" << YAML::Value << sm.cut_angle / deg;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;

  e << YAML::Key << "pump" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "fwhm_um" << YAML::Value << c.pump.fwhm.in_um();
  e << YAML::Key << "sigma_k_prime" << YAML::Value;
  switch (c.pump.sigma_prime_mode) {
    case SigmaPrimeMode::automatic: e << "auto"; break;
    case SigmaPrimeMode::match: e << "match"; break;
    case SigmaPrimeMode::value: e << c.pump.sigma_prime_value; break;
  }
  e << YAML::Key << "modes" << YAML::Value << c.pump.modes;
  e << YAML::Key << "k0_um_inv" << YAML::Value << c.pump.k0;
  if (c.pump.alpha) e << YAML::Key << "alpha" << YAML::Value << *c.pump.alpha;
  e << YAML::EndMap;

  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "points" << YAML::Value << c.grid.points;
  e << YAML::Key << "margin_sigma" << YAML::Value << c.grid.margin_sigma;
  e << YAML::EndMap;

  const auto& d = c.detection;
  e << YAML::Key << "detection" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "focal_length_mm" << YAML::Value << d.focal_length.in_mm();
  e << YAML::Key << "slit_signal_mm" << YAML::Value << d.slit_width_signal.in_mm();
  e << YAML::Key << "slit_idler_mm" << YAML::Value << d.slit_width_idler.in_mm();
  e << YAML::Key << "central_wavelength_nm" << YAML::Value << d.central_wavelength.in_nm();
  e << YAML::Key << "filter_fwhm_nm" << YAML::Value << d.filter_fwhm.in_nm();
  e << YAML::Key << "wavelength_samples" << YAML::Value << c.wavelength_samples;
  e << YAML::EndMap;

  const auto& g = c.slm;
  e << YAML::Key << "hologram" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "width_px" << YAML::Value << g.width;
  e << YAML::Key << "height_px" << YAML::Value << g.height;
  e << YAML::Key << "pixel_pitch_um" << YAML::Value << g.pixel_pitch_um;
  e << YAML::Key << "grating_period_px" << YAML::Value << g.grating_period_px;
  e << YAML::Key << "magnification" << YAML::Value << g.magnification;
  if (c.input_beam_fwhm) e << YAML::Key << "input_beam_fwhm_mm" << YAML::Value << c.input_beam_fwhm->in_mm();
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "directory" << YAML::Value << c.output_directory.string();
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string provenance_log(const RunConfig& c) {
  std::string out;
  for (const auto& p : c.provenance) {
    out += p.key + " = " + p.value + (p.from_user ? "  [user]\n" : "  [default]\n");
  }
  return out;
}

}  // namespace spdc::config
