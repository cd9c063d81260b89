#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "phasent/errors.hpp"

namespace phasent::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out))
    fail(key, "expected a number, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    fail(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

std::optional<Roi> to_roi(const std::string& key, std::string_view v) {
  if (v == "auto") return std::nullopt;
  std::size_t parts[4];
  for (int k = 0; k < 4; ++k) {
    const auto comma = v.find(',');
    if ((comma == std::string_view::npos) != (k == 3)) fail(key, "expected 'auto' or x,y,w,h");
    parts[k] = to_uint(key, trim(v.substr(0, comma)));
    if (k < 3) v = v.substr(comma + 1);
  }
  return Roi{parts[0], parts[1], parts[2], parts[3]};
}

using Setter = std::function<void(RunConfig&, const std::string&, std::string_view)>;

Setter real(double RunConfig::*field, double scale) {
  return [=](RunConfig& c, const std::string& k, std::string_view v) { c.*field = to_double(k, v) * scale; };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"source.sigma_plus_um", real(&RunConfig::sigma_plus, 1e-6)},
      {"source.sigma_minus_um", real(&RunConfig::sigma_minus, 1e-6)},
      {"source.lambda_nm", real(&RunConfig::lambda, 1e-9)},
      {"lens.u_mm", real(&RunConfig::u, 1e-3)},
      {"lens.f_mm", real(&RunConfig::f, 1e-3)},
      {"camera.width", [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.width = to_uint(k, v); }},
      {"camera.height", [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.height = to_uint(k, v); }},
      {"camera.pitch_um",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.pitch = to_double(k, v) * 1e-6; }},
      {"camera.eta", [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.eta = to_double(k, v); }},
      {"camera.mu", [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.mu = to_double(k, v); }},
      {"camera.bloom_prob",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.bloom_prob = to_double(k, v); }},
      {"camera.bloom_sigma_px",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.bloom_sigma = to_double(k, v); }},
      {"camera.bg_rate", [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.bg_rate = to_double(k, v); }},
      {"camera.seed", [](RunConfig& c, const std::string& k, std::string_view v) { c.camera.seed = to_uint(k, v); }},
      {"camera.target_occupancy", real(&RunConfig::target_occupancy, 1.0)},
      {"slit.d_um", [](RunConfig& c, const std::string& k, std::string_view v) { c.slit.d = to_double(k, v) * 1e-6; }},
      {"slit.a_um", [](RunConfig& c, const std::string& k, std::string_view v) { c.slit.a = to_double(k, v) * 1e-6; }},
      {"slit.f3_mm", real(&RunConfig::f3, 1e-3)},
      {"slit.relay_f1_mm", real(&RunConfig::relay_f1, 1e-3)},
      {"slit.relay_f2_mm", real(&RunConfig::relay_f2, 1e-3)},
      {"run.frames", [](RunConfig& c, const std::string& k, std::string_view v) { c.frames = to_uint(k, v); }},
      {"run.roi", [](RunConfig& c, const std::string& k, std::string_view v) { c.roi = to_roi(k, v); }},
      {"run.output", [](RunConfig& c, const std::string&, std::string_view v) { c.output = std::string(v); }},
      {"run.grid", [](RunConfig& c, const std::string& k, std::string_view v) { c.grid = to_uint(k, v); }},
  };
  return table;
}

void positive(double v, const char* key) {
  if (!(v > 0.0)) fail(key, "must be positive");
}

}  // namespace

Roi RunConfig::effective_roi() const {
  if (roi) return *roi;
  const std::size_t w = std::min<std::size_t>(camera.width, 64), h = std::min<std::size_t>(camera.height, 64);
  return {(camera.width - w) / 2, (camera.height - h) / 2, w, h};
}

void validate(const RunConfig& c) {
  positive(c.sigma_plus, "source.sigma_plus_um");
  positive(c.sigma_minus, "source.sigma_minus_um");
  positive(c.lambda, "source.lambda_nm");
  positive(c.f, "lens.f_mm");
  if (!(c.u > c.f)) fail("lens.u_mm", "must exceed lens.f_mm so the lens forms a real image");
  if (c.camera.width < 1) fail("camera.width", "must be >= 1");
  if (c.camera.height < 1) fail("camera.height", "must be >= 1");
  positive(c.camera.pitch, "camera.pitch_um");
  if (!(c.camera.eta > 0.0 && c.camera.eta <= 1.0)) fail("camera.eta", "must lie in (0, 1]");
  if (!(c.camera.mu >= 0.0)) fail("camera.mu", "must be >= 0 (0 = from target_occupancy)");
  if (!(c.camera.bloom_prob >= 0.0 && c.camera.bloom_prob < 1.0)) fail("camera.bloom_prob", "must lie in [0, 1)");
  positive(c.camera.bloom_sigma, "camera.bloom_sigma_px");
  if (!(c.camera.bg_rate >= 0.0)) fail("camera.bg_rate", "must be >= 0");
  if (!(c.target_occupancy > 0.0 && c.target_occupancy <= kMaxOccupancy))
    fail("camera.target_occupancy", "must lie in (0, 0.1]");
  positive(c.slit.a, "slit.a_um");
  if (!(c.slit.d > c.slit.a)) fail("slit.d_um", "must exceed slit.a_um (slits may not overlap)");
  positive(c.f3, "slit.f3_mm");
  positive(c.relay_f1, "slit.relay_f1_mm");
  positive(c.relay_f2, "slit.relay_f2_mm");
  if (c.frames < 2) fail("run.frames", "must be >= 2");
  if (c.grid < 16) fail("run.grid", "must be >= 16");
  if (c.output.empty()) fail("run.output", "must not be empty");
  if (c.roi) {
    const Roi& r = *c.roi;
    if (r.w < 2 || r.h < 1 || r.x + r.w > c.camera.width || r.y + r.h > c.camera.height)
      fail("run.roi", "must be a rectangle inside the sensor at least 2 pixels wide");
    if (r.pixels() > kMaxRoiPixels) fail("run.roi", "exceeds " + std::to_string(kMaxRoiPixels) + " pixels");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::string section;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto hash = line.find_first_of("#;");
    line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known = {"source", "lens", "camera", "slit", "run"};
      if (!known.count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + ": " + key + ": unknown key");
    if (!seen.insert(key).second) throw ConfigError(where + ": " + key + ": given twice");
    try {
      it->second(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o.precision(15);
  o << "[source]\nsigma_plus_um = " << c.sigma_plus * 1e6 << "\nsigma_minus_um = " << c.sigma_minus * 1e6
    << "\nlambda_nm = " << c.lambda * 1e9 << "\n\n[lens]\nu_mm = " << c.u * 1e3 << "\nf_mm = " << c.f * 1e3
    << "\n\n[camera]\nwidth = " << c.camera.width << "\nheight = " << c.camera.height
    << "\npitch_um = " << c.camera.pitch * 1e6 << "\neta = " << c.camera.eta << "\nmu = " << c.camera.mu
    << "\nbloom_prob = " << c.camera.bloom_prob << "\nbloom_sigma_px = " << c.camera.bloom_sigma
    << "\nbg_rate = " << c.camera.bg_rate << "\nseed = " << c.camera.seed
    << "\ntarget_occupancy = " << c.target_occupancy << "\n\n[slit]\nd_um = " << c.slit.d * 1e6
    << "\na_um = " << c.slit.a * 1e6 << "\nf3_mm = " << c.f3 * 1e3 << "\nrelay_f1_mm = " << c.relay_f1 * 1e3
    << "\nrelay_f2_mm = " << c.relay_f2 * 1e3 << "\n\n[run]\nframes = " << c.frames << "\nroi = ";
  if (c.roi) o << c.roi->x << "," << c.roi->y << "," << c.roi->w << "," << c.roi->h;
  else o << "auto";
  o << "\noutput = " << c.output.string() << "\ngrid = " << c.grid << "\n";
  return o.str();
}

}  // namespace phasent::cli
