#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corrint {

// Rejected input; carries the offending key and, for file input, its line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what, int line = 0);
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string field_;
  std::string detail_;
  int line_;
};

// Quadrature or solver could not reach the requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double estimate = 0.0)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

// CODATA 2018 exact values.
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kHbar = kPlanck / (2.0 * 3.14159265358979323846);  // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K

enum class UnitMode { natural, si };

// Size of one internal unit in SI. A config that was natural from the start
// keeps all factors at 1 and cannot be mapped back to SI.
struct UnitSystem {
  UnitMode mode = UnitMode::natural;
  double mass_kg = 1.0;
  double length_m = 1.0;
  double time_s = 1.0;
  bool has_si_scale = false;

  double velocity_mps() const { return length_m / time_s; }
};

struct Body {
  double mass = 1.0;
  double v0 = 0.0;
  double x0 = 0.0;
  double sigma_x = 1.0;

  double kbar(double hbar) const { return mass * v0 / hbar; }
  // l_c = 2 sigma_x, sigma_k = 1/(2 sigma_x)
  double coherence_length() const { return 2.0 * sigma_x; }
  double sigma_k() const { return 0.5 / sigma_x; }
};

enum class PathId : int {
  P1_incident = 0,
  P2_refl1,
  P3_refl2,
  P4_refl1_then_2,
  P5_refl2_then_1,
};

inline constexpr std::array<PathId, 5> kAllPaths{
    PathId::P1_incident, PathId::P2_refl1, PathId::P3_refl2,
    PathId::P4_refl1_then_2, PathId::P5_refl2_then_1};

constexpr std::size_t index(PathId p) { return static_cast<std::size_t>(p); }
std::string_view path_name(PathId p);
PathId parse_path(std::string_view s);

using PathAmplitudes = std::array<double, 5>;
inline constexpr PathAmplitudes kDefaultAmplitudes{1.0, -1.0, -1.0, 1.0, 1.0};

enum class Coord : int { x1 = 0, X = 1, x2 = 2 };
std::string_view coord_name(Coord c);
Coord parse_coord(std::string_view s);

struct SystemConfig {
  Body particle1;
  Body mirror;
  Body particle2;
  double hbar = 1.0;
  PathAmplitudes amplitudes = kDefaultAmplitudes;
  // 2: particle 1 + mirror only (particle 2 and paths P3..P5 dropped).
  int bodies = 3;
  UnitSystem units;

  const Body& body(int i) const;
  Body& body(int i);
};

// Ordering constraint x1 < X < x2 (x1 < X for two bodies).
bool in_domain(const SystemConfig& c, const std::array<double, 3>& x);

// Throws ConfigError on hard violations; returns warnings.
std::vector<std::string> validate(const SystemConfig& c);

// hbar = 1, m1 = 1, length unit = particle 1's sigma_x.
SystemConfig to_natural_units(const SystemConfig& c);
SystemConfig to_si_units(const SystemConfig& natural);

// Canonical text: fixed key order, 17 significant digits.
std::string canonical_text(const SystemConfig& c);
std::uint64_t canonical_hash(const SystemConfig& c);
std::uint64_t fnv1a(std::string_view s);
std::string format_double(double v);

// Flat key = value file; '#' starts a comment.
class KeyValueFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };

  static KeyValueFile parse(std::istream& in);
  static KeyValueFile parse_string(const std::string& text);
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  int line(const std::string& key) const;
  // Override or add a key (line 0).
  void set(const std::string& key, const std::string& value);
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  // Throws on the first key never read.
  void reject_unused() const;

 private:
  mutable std::map<std::string, Entry> entries_;
};

SystemConfig config_from_keys(const KeyValueFile& kv);
SystemConfig load_config(const std::string& path);

}  // namespace corrint
