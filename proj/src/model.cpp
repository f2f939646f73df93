#include "corrint/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace corrint {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string describe(const std::string& field, const std::string& what, int line) {
  std::string msg;
  if (line > 0) msg += "line " + std::to_string(line) + ": ";
  msg += field.empty() ? what : field + ": " + what;
  return msg;
}

double parse_number(std::string_view text, const std::string& key, int line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last)
    throw ConfigError(key, "expected a number, got '" + t + "'", line);
  return v;
}

const char* body_prefix(int i) {
  static const char* names[3] = {"particle1", "mirror", "particle2"};
  return names[i];
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& what, int line)
    : std::runtime_error(describe(field, what, line)),
      field_(std::move(field)),
      detail_(what),
      line_(line) {}

std::string_view path_name(PathId p) {
  switch (p) {
    case PathId::P1_incident: return "P1_incident";
    case PathId::P2_refl1: return "P2_refl1";
    case PathId::P3_refl2: return "P3_refl2";
    case PathId::P4_refl1_then_2: return "P4_refl1_then_2";
    case PathId::P5_refl2_then_1: return "P5_refl2_then_1";
  }
  return "?";
}

PathId parse_path(std::string_view s) {
  for (PathId p : kAllPaths) {
    const auto n = path_name(p);
    if (s == n || s == n.substr(0, 2)) return p;
  }
  throw ConfigError("path", "unknown path '" + std::string(s) + "'");
}

std::string_view coord_name(Coord c) {
  switch (c) {
    case Coord::x1: return "x1";
    case Coord::X: return "X";
    case Coord::x2: return "x2";
  }
  return "?";
}

Coord parse_coord(std::string_view s) {
  if (s == "x1") return Coord::x1;
  if (s == "X") return Coord::X;
  if (s == "x2") return Coord::x2;
  throw ConfigError("axis", "unknown coordinate '" + std::string(s) + "'");
}

const Body& SystemConfig::body(int i) const {
  return i == 0 ? particle1 : (i == 1 ? mirror : particle2);
}

Body& SystemConfig::body(int i) {
  return i == 0 ? particle1 : (i == 1 ? mirror : particle2);
}

bool in_domain(const SystemConfig& c, const std::array<double, 3>& x) {
  if (c.bodies == 2) return x[0] <= x[1];
  return x[0] <= x[1] && x[1] <= x[2];
}

std::vector<std::string> validate(const SystemConfig& c) {
  std::vector<std::string> warnings;
  if (c.bodies != 2 && c.bodies != 3) throw ConfigError("bodies", "must be 2 or 3");
  if (!(c.hbar > 0.0) || !std::isfinite(c.hbar)) throw ConfigError("hbar", "must be positive");
  for (int i = 0; i < c.bodies; ++i) {
    const Body& b = c.body(i);
    const std::string p = body_prefix(i);
    if (!std::isfinite(b.mass) || !(b.mass > 0.0))
      throw ConfigError(p + ".mass", "mass must be positive and finite");
    if (!std::isfinite(b.sigma_x) || !(b.sigma_x > 0.0))
      throw ConfigError(p + ".sigma_x", "sigma_x must be positive and finite");
    if (!std::isfinite(b.v0)) throw ConfigError(p + ".v0", "velocity must be finite");
    if (!std::isfinite(b.x0)) throw ConfigError(p + ".x0", "position must be finite");
    if (!std::isfinite(b.kbar(c.hbar)))
      throw ConfigError(p + ".v0", "central wavevector not representable");
  }
  for (double a : c.amplitudes)
    if (!std::isfinite(a)) throw ConfigError("amplitudes", "must be finite");
  if (!(c.particle1.x0 < c.mirror.x0))
    throw ConfigError("particle1.x0", "initial ordering requires particle1.x0 < mirror.x0");
  if (!(c.particle1.v0 > c.mirror.v0))
    warnings.push_back("particle 1 does not approach the mirror");
  if (c.bodies == 3) {
    if (!(c.mirror.x0 < c.particle2.x0))
      throw ConfigError("particle2.x0", "initial ordering requires mirror.x0 < particle2.x0");
    if (!(c.particle2.v0 < c.mirror.v0))
      warnings.push_back("particle 2 does not approach the mirror");
  } else {
    for (std::size_t p = 2; p < 5; ++p)
      if (c.amplitudes[p] != 0.0)
        throw ConfigError("amplitudes", "two-body mode admits only P1 and P2");
  }
  return warnings;
}

SystemConfig to_natural_units(const SystemConfig& c) {
  validate(c);
  if (c.units.mode == UnitMode::natural) return c;
  const double mu = c.particle1.mass;
  const double lu = c.particle1.sigma_x;
  const double tu = mu * lu * lu / c.hbar;
  const double vu = lu / tu;
  SystemConfig n = c;
  for (int i = 0; i < 3; ++i) {
    const Body& b = c.body(i);
    n.body(i) = Body{b.mass / mu, b.v0 / vu, b.x0 / lu, b.sigma_x / lu};
  }
  n.hbar = 1.0;
  n.units = UnitSystem{UnitMode::natural, mu, lu, tu, true};
  return n;
}

SystemConfig to_si_units(const SystemConfig& n) {
  if (n.units.mode == UnitMode::si) return n;
  if (!n.units.has_si_scale)
    throw ConfigError("units", "config has no SI scale to convert back to");
  const UnitSystem& u = n.units;
  const double vu = u.velocity_mps();
  SystemConfig s = n;
  for (int i = 0; i < 3; ++i) {
    const Body& b = n.body(i);
    s.body(i) = Body{b.mass * u.mass_kg, b.v0 * vu, b.x0 * u.length_m, b.sigma_x * u.length_m};
  }
  s.hbar = kHbar;
  s.units = UnitSystem{UnitMode::si, 1.0, 1.0, 1.0, true};
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string canonical_text(const SystemConfig& c) {
  std::ostringstream os;
  os << "units = " << (c.units.mode == UnitMode::si ? "si" : "natural") << '\n';
  os << "bodies = " << c.bodies << '\n';
  for (int i = 0; i < c.bodies; ++i) {
    const Body& b = c.body(i);
    const std::string p = body_prefix(i);
    os << p << ".mass = " << format_double(b.mass) << '\n';
    os << p << ".v0 = " << format_double(b.v0) << '\n';
    os << p << ".x0 = " << format_double(b.x0) << '\n';
    os << p << ".sigma_x = " << format_double(b.sigma_x) << '\n';
  }
  os << "amplitudes = ";
  for (std::size_t i = 0; i < 5; ++i) os << (i ? "," : "") << format_double(c.amplitudes[i]);
  os << '\n';
  return os.str();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t canonical_hash(const SystemConfig& c) { return fnv1a(canonical_text(c)); }

// ---- key/value files ----

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile kv;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(s, "expected 'key = value'", line);
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError("", "empty key", line);
    if (kv.entries_.count(key)) throw ConfigError(key, "duplicate key", line);
    kv.entries_[key] = Entry{value, line, false};
  }
  return kv;
}

KeyValueFile KeyValueFile::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  return parse(in);
}

bool KeyValueFile::has(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& KeyValueFile::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key, "missing key");
  it->second.used = true;
  return it->second.value;
}

int KeyValueFile::line(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

double KeyValueFile::number(const std::string& key) const {
  return parse_number(get(key), key, line(key));
}

double KeyValueFile::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::vector<double> KeyValueFile::numbers(const std::string& key) const {
  std::vector<double> out;
  const std::string& v = get(key);
  std::size_t pos = 0;
  while (pos <= v.size()) {
    auto comma = v.find(',', pos);
    if (comma == std::string::npos) comma = v.size();
    out.push_back(parse_number(std::string_view(v).substr(pos, comma - pos), key, line(key)));
    pos = comma + 1;
  }
  return out;
}

std::string KeyValueFile::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  auto it = entries_.find(key);
  if (it == entries_.end())
    entries_[key] = Entry{value, 0, false};
  else
    it->second.value = value;
}

std::vector<std::string> KeyValueFile::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_)
    if (k.compare(0, prefix.size(), prefix) == 0) out.push_back(k);
  return out;
}

void KeyValueFile::reject_unused() const {
  for (const auto& [k, e] : entries_)
    if (!e.used) throw ConfigError(k, "unknown key", e.line);
}

SystemConfig config_from_keys(const KeyValueFile& kv) {
  SystemConfig c;
  const std::string units = kv.string_or("units", "natural");
  if (units == "natural") {
    c.units.mode = UnitMode::natural;
    c.hbar = 1.0;
  } else if (units == "si") {
    c.units.mode = UnitMode::si;
    c.units.has_si_scale = true;
    c.hbar = kHbar;
  } else {
    throw ConfigError("units", "expected 'natural' or 'si'", kv.line("units"));
  }
  const double bodies = kv.number_or("bodies", 3.0);
  if (bodies != 2.0 && bodies != 3.0) throw ConfigError("bodies", "must be 2 or 3", kv.line("bodies"));
  c.bodies = static_cast<int>(bodies);

  for (int i = 0; i < c.bodies; ++i) {
    const std::string p = body_prefix(i);
    c.body(i) = Body{kv.number(p + ".mass"), kv.number(p + ".v0"), kv.number(p + ".x0"),
                     kv.number(p + ".sigma_x")};
  }
  if (c.bodies == 2) {
    // Inert placeholder; never evaluated.
    c.particle2 = Body{c.particle1.mass, c.mirror.v0, c.mirror.x0 + 1.0, c.particle1.sigma_x};
    c.amplitudes = {1.0, -1.0, 0.0, 0.0, 0.0};
  }
  if (kv.has("amplitudes")) {
    const auto a = kv.numbers("amplitudes");
    if (a.size() != 5)
      throw ConfigError("amplitudes", "expected five comma-separated values", kv.line("amplitudes"));
    for (std::size_t i = 0; i < 5; ++i) c.amplitudes[i] = a[i];
  }
  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), e.detail(), kv.line(e.field()));
  }
  return c;
}

SystemConfig load_config(const std::string& path) {
  const auto kv = KeyValueFile::load(path);
  SystemConfig c = config_from_keys(kv);
  kv.reject_unused();
  return c;
}

}  // namespace corrint
