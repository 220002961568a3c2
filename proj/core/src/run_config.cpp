#include "screenwave/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "screenwave/errors.hpp"

namespace screenwave::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  int line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }
  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(key, line(key), what);
  }

  double number(const std::string& key) {
    const auto& s = raw(key);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
      fail(key, "expected a finite number, got '" + s + "'");
    return v;
  }

  int integer(const std::string& key) {
    const auto& s = raw(key);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno == ERANGE || v < -(1L << 30) || v > (1L << 30))
      fail(key, "expected an integer, got '" + s + "'");
    return int(v);
  }

  void opt(const std::string& key, double& out) {
    if (has(key)) out = number(key);
  }
  void opt(const std::string& key, int& out) {
    if (has(key)) out = integer(key);
  }
  void opt(const std::string& key, std::string& out) {
    if (has(key)) out = raw(key);
  }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(key, 0, "required key is missing");
  }

  void check(bool ok, const std::string& key, const std::string& what) const {
    if (!ok) fail(key, what);
  }

 private:
  std::map<std::string, Entry> entries_;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "problem.kappa",          "problem.epsilon",         "problem.L",
      "problem.q",              "geometry.holes_left",     "geometry.holes_right",
      "mesh.h",                 "mesh.tip_grading",        "mesh.tip_layers",
      "dtn.n_modes",            "dtn.Z_offset",            "sweep.L_min",
      "sweep.L_max",            "sweep.n_steps",           "sweep.workers",
      "resonance.bracket_lo",   "resonance.bracket_hi",    "resonance.tol",
      "output.csv",             "output.locus",            "output.field",
      "output.field_grid",      "asymptotic.capacities_left",
      "asymptotic.capacities_right",                       "asymptotic.area_left",
      "asymptotic.area_right",  "asymptotic.resonator_area",
      "asymptotic.beta_min",    "asymptotic.beta_max",     "asymptotic.n_beta",
      "capacity.shape",         "capacity.radius",         "capacity.width",
      "capacity.height",        "capacity.n_panels",
  };
  return keys;
}

std::vector<HoleSpec> parse_holes(Reader& r, const std::string& key) {
  std::vector<HoleSpec> holes;
  const auto text = r.raw(key);
  if (text == "none") return holes;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    char* e1 = nullptr;
    char* e2 = nullptr;
    HoleSpec h;
    bool ok = parts.size() == 2;
    if (ok) {
      h.center = std::strtod(parts[0].c_str(), &e1);
      h.width = std::strtod(parts[1].c_str(), &e2);
      ok = !parts[0].empty() && !parts[1].empty() && *e1 == '\0' && *e2 == '\0';
    }
    if (!ok) r.fail(key, "expected 'center:width' pairs separated by ';', got '" + item + "'");
    if (!(h.width > 0.0)) r.fail(key, "aperture width must be positive");
    holes.push_back(h);
  }
  if (holes.empty()) r.fail(key, "no apertures given (use 'none' for a closed screen)");
  return holes;
}

std::vector<double> parse_list(Reader& r, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(r.raw(key), ';')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
      r.fail(key, "expected positive numbers separated by ';'");
    out.push_back(v);
  }
  if (out.empty()) r.fail(key, "list is empty");
  return out;
}

}  // namespace

double RunConfig::truncation() const {
  double far = L.value_or(0.0);
  if (has_sweep) far = std::max(far, L_max);
  if (bracket_hi) far = std::max(far, *bracket_hi);
  return far + Z_offset;
}

mesh::WaveguideGeometry2D RunConfig::geometry(double length) const {
  mesh::WaveguideGeometry2D g;
  g.L = length;
  g.Z = std::max(truncation(), length + Z_offset);
  auto screen = [this](const std::vector<HoleSpec>& holes) {
    if (holes.empty()) return mesh::Screen::closed();
    std::vector<mesh::Interval> iv;
    for (const auto& h : holes) iv.push_back(mesh::Interval::centered(h.center, h.width * epsilon));
    return mesh::Screen::with_holes(std::move(iv));
  };
  g.left = screen(holes_left);
  g.right = screen(holes_right);
  return g;
}

int RunConfig::line_of(const std::string& key) const {
  const auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

Override parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw ConfigError(trim(text), 0, "override must look like section.key=value");
  auto key = trim(text.substr(0, eq));
  if (key.find('.') == std::string::npos)
    throw ConfigError(key, 0, "override key must be qualified as section.key");
  return {key, trim(text.substr(eq + 1))};
}

RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides) {
  const auto& known = known_keys();
  std::map<std::string, Entry> entries;
  std::string section;
  std::istringstream is(text);
  std::string raw_line;
  int lineno = 0;
  while (std::getline(is, raw_line)) {
    ++lineno;
    auto line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", lineno, "expected 'key = value'");
    const auto name = trim(line.substr(0, eq));
    const auto key = section.empty() ? name : section + "." + name;
    if (section.empty()) throw ConfigError(key, lineno, "key outside of any section");
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(key, lineno, "unknown key");
    if (entries.count(key)) throw ConfigError(key, lineno, "duplicate key");
    const auto value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(key, lineno, "empty value");
    entries[key] = {value, lineno};
  }
  for (const auto& [key, value] : overrides) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(key, 0, "unknown key");
    entries[key] = {value, 0};
  }

  RunConfig c;
  for (const auto& [k, e] : entries) c.lines[k] = e.line;
  Reader r(std::move(entries));

  r.require("problem.kappa");
  r.require("problem.epsilon");
  c.kappa = r.number("problem.kappa");
  r.check(c.kappa > 0.0, "problem.kappa", "must be positive");
  c.epsilon = r.number("problem.epsilon");
  r.check(c.epsilon > 0.0, "problem.epsilon", "must be positive");
  if (r.has("problem.L")) {
    c.L = r.number("problem.L");
    r.check(*c.L > 0.0, "problem.L", "must be positive");
  }
  r.opt("problem.q", c.q);
  r.check(c.q >= 1, "problem.q", "must be at least 1");

  if (r.has("geometry.holes_left")) c.holes_left = parse_holes(r, "geometry.holes_left");
  if (r.has("geometry.holes_right")) c.holes_right = parse_holes(r, "geometry.holes_right");
  auto check_screen = [&](const char* key, const std::vector<HoleSpec>& holes) {
    mesh::WaveguideGeometry2D g;
    g.L = 1.0;
    g.Z = 2.0;
    for (const auto& h : holes)
      g.left.holes.push_back(mesh::Interval::centered(h.center, h.width * c.epsilon));
    try {
      g.validate();
    } catch (const InvalidArgument& e) {
      r.fail(key, e.what());
    }
  };
  check_screen("geometry.holes_left", c.holes_left);
  check_screen("geometry.holes_right", c.holes_right);

  r.opt("mesh.h", c.mesh.h);
  r.check(c.mesh.h > 0.0, "mesh.h", "must be positive");
  r.opt("mesh.tip_grading", c.mesh.tip_grading);
  r.check(c.mesh.tip_grading > 0.0 && c.mesh.tip_grading <= 1.0, "mesh.tip_grading",
          "must lie in (0, 1]");
  r.opt("mesh.tip_layers", c.mesh.tip_layers);
  r.check(c.mesh.tip_layers >= 0 && c.mesh.tip_layers <= 20, "mesh.tip_layers",
          "must lie in [0, 20]");

  r.opt("dtn.n_modes", c.n_modes);
  r.check(c.n_modes >= 1, "dtn.n_modes", "must be at least 1");
  r.opt("dtn.Z_offset", c.Z_offset);
  r.check(c.Z_offset > 0.0, "dtn.Z_offset", "must be positive");

  c.has_sweep = r.has("sweep.L_min") || r.has("sweep.L_max") || r.has("sweep.n_steps");
  if (c.has_sweep) {
    r.require("sweep.L_min");
    r.require("sweep.L_max");
    r.require("sweep.n_steps");
    c.L_min = r.number("sweep.L_min");
    c.L_max = r.number("sweep.L_max");
    c.n_steps = r.integer("sweep.n_steps");
    r.check(c.L_min > 0.0, "sweep.L_min", "must be positive");
    r.check(c.L_min < c.L_max, "sweep.L_min", "must be smaller than sweep.L_max");
    r.check(c.n_steps >= 2, "sweep.n_steps", "must be at least 2");
  }
  r.opt("sweep.workers", c.workers);
  r.check(c.workers >= 0, "sweep.workers", "must be non-negative");

  if (r.has("resonance.bracket_lo") != r.has("resonance.bracket_hi"))
    r.require(r.has("resonance.bracket_lo") ? "resonance.bracket_hi" : "resonance.bracket_lo");
  if (r.has("resonance.bracket_lo")) {
    c.bracket_lo = r.number("resonance.bracket_lo");
    c.bracket_hi = r.number("resonance.bracket_hi");
    r.check(*c.bracket_lo > 0.0, "resonance.bracket_lo", "must be positive");
    r.check(*c.bracket_lo < *c.bracket_hi, "resonance.bracket_lo",
            "must be smaller than resonance.bracket_hi");
  }
  r.opt("resonance.tol", c.tol);
  r.check(c.tol > 0.0, "resonance.tol", "must be positive");

  r.opt("output.csv", c.csv);
  r.opt("output.locus", c.locus);
  r.opt("output.field", c.field);
  if (r.has("output.field_grid")) {
    const auto g = r.raw("output.field_grid");
    const auto x = g.find('x');
    int nz = 0, ny = 0;
    if (x != std::string::npos) {
      nz = std::atoi(g.substr(0, x).c_str());
      ny = std::atoi(g.substr(x + 1).c_str());
    }
    r.check(nz >= 2 && ny >= 2, "output.field_grid", "expected 'NZxNY' with both at least 2");
    c.field_nz = nz;
    c.field_ny = ny;
  }

  if (r.has("asymptotic.capacities_left"))
    c.capacities_left = parse_list(r, "asymptotic.capacities_left");
  if (r.has("asymptotic.capacities_right"))
    c.capacities_right = parse_list(r, "asymptotic.capacities_right");
  const std::pair<const char*, double*> areas[] = {
      {"asymptotic.area_left", &c.area_left},
      {"asymptotic.area_right", &c.area_right},
      {"asymptotic.resonator_area", &c.resonator_area}};
  for (const auto& [key, v] : areas) {
    r.opt(key, *v);
    r.check(*v > 0.0, key, "must be positive");
  }
  r.opt("asymptotic.beta_min", c.beta_min);
  r.opt("asymptotic.beta_max", c.beta_max);
  r.check(c.beta_min < c.beta_max, "asymptotic.beta_min", "must be smaller than asymptotic.beta_max");
  r.opt("asymptotic.n_beta", c.n_beta);
  r.check(c.n_beta >= 2, "asymptotic.n_beta", "must be at least 2");

  if (r.has("capacity.shape")) {
    const auto s = r.raw("capacity.shape");
    if (s == "disk")
      c.crack = CrackKind::disk;
    else if (s == "rectangle")
      c.crack = CrackKind::rectangle;
    else
      r.fail("capacity.shape", "expected 'disk' or 'rectangle'");
  }
  r.opt("capacity.radius", c.crack_radius);
  r.check(c.crack_radius > 0.0, "capacity.radius", "must be positive");
  r.opt("capacity.width", c.crack_width);
  r.check(c.crack_width > 0.0, "capacity.width", "must be positive");
  r.opt("capacity.height", c.crack_height);
  r.check(c.crack_height > 0.0, "capacity.height", "must be positive");
  r.opt("capacity.n_panels", c.n_panels);
  r.check(c.n_panels >= 4, "capacity.n_panels", "must be at least 4");

  return c;
}

RunConfig load_config(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace screenwave::config
