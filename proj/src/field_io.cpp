#include "corrint/field_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "corrint/model.hpp"

namespace corrint::io {

namespace {

constexpr char kMagic[8] = {'C', 'O', 'R', 'R', 'F', 'L', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "field files are written little endian");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("field", "truncated binary field");
  return v;
}

std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  if (n > 4096) throw ConfigError("field", "implausible name length in binary field");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw ConfigError("field", "truncated binary field");
  return s;
}

std::string num(double v) { return format_double(v); }

double parse_num(const std::string& s) {
  double v = 0.0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  while (b < e && *b == ' ') ++b;
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc()) throw ConfigError("field", "bad number '" + s + "' in CSV field");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "bin" || s == "binary") return Format::binary;
  if (s == "csv") return Format::csv;
  if (s == "pgm") return Format::pgm;
  throw ConfigError("format", "unknown format '" + s + "' (bin, csv, pgm)");
}

const char* format_extension(Format f) {
  switch (f) {
    case Format::binary: return ".cfld";
    case Format::csv: return ".csv";
    case Format::pgm: return ".pgm";
  }
  return "";
}

void write_binary(std::ostream& out, const Field& f) {
  if (f.values.size() != f.cells()) throw ConfigError("field", "payload does not match the axes");
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.rank()));
  for (const auto& a : f.axes) {
    put_string(out, a.name);
    put<double>(out, a.min);
    put<double>(out, a.max);
    put<std::uint64_t>(out, a.n);
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.fixed.size()));
  for (const auto& [k, v] : f.fixed) {
    put_string(out, k);
    put<double>(out, v);
  }
  put<double>(out, f.t);
  put<std::uint64_t>(out, f.config_hash);
  put<std::uint64_t>(out, f.values.size());
  out.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

Field read_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw ConfigError("field", "not a binary field file");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw ConfigError("field", "unsupported field version " + std::to_string(version));
  Field f;
  const auto rank = get<std::uint32_t>(in);
  if (rank == 0 || rank > 3) throw ConfigError("field", "rank must be 1-3");
  for (std::uint32_t i = 0; i < rank; ++i) {
    Axis a;
    a.name = get_string(in);
    a.min = get<double>(in);
    a.max = get<double>(in);
    a.n = get<std::uint64_t>(in);
    f.axes.push_back(a);
  }
  const auto nfixed = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < nfixed; ++i) {
    auto k = get_string(in);
    f.fixed.emplace_back(std::move(k), get<double>(in));
  }
  f.t = get<double>(in);
  f.config_hash = get<std::uint64_t>(in);
  const auto cells = get<std::uint64_t>(in);
  if (cells != f.cells()) throw ConfigError("field", "header cell count does not match the axes");
  f.values.resize(cells);
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(cells * sizeof(double)));
  if (!in) throw ConfigError("field", "payload shorter than the declared cell count");
  if (in.peek() != std::char_traits<char>::eof()) throw ConfigError("field", "trailing bytes after payload");
  return f;
}

void write_csv(std::ostream& out, const Field& f) {
  if (f.values.size() != f.cells()) throw ConfigError("field", "payload does not match the axes");
  out << "# corrint field v" << kVersion << "\n";
  out << "# t " << num(f.t) << "\n";
  out << "# config_hash " << f.config_hash << "\n";
  for (const auto& a : f.axes) out << "# axis " << a.name << ' ' << num(a.min) << ' ' << num(a.max) << ' ' << a.n << "\n";
  for (const auto& [k, v] : f.fixed) out << "# fixed " << k << ' ' << num(v) << "\n";
  for (std::size_t i = 0; i < f.axes.size(); ++i) out << f.axes[i].name << ',';
  out << "pdf\n";
  const std::size_t r = f.rank();
  std::vector<std::size_t> idx(r, 0);
  for (std::size_t c = 0; c < f.values.size(); ++c) {
    std::size_t rem = c;
    for (std::size_t d = r; d-- > 0;) {
      idx[d] = rem % f.axes[d].n;
      rem /= f.axes[d].n;
    }
    for (std::size_t d = 0; d < r; ++d) out << num(f.axes[d].at(idx[d])) << ',';
    out << num(f.values[c]) << "\n";
  }
}

Field read_csv(std::istream& in) {
  Field f;
  std::string line;
  bool header_row = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string tag;
      is >> tag;
      if (tag == "t") {
        std::string v;
        is >> v;
        f.t = parse_num(v);
      } else if (tag == "config_hash") {
        is >> f.config_hash;
      } else if (tag == "axis") {
        Axis a;
        std::string lo, hi;
        is >> a.name >> lo >> hi >> a.n;
        a.min = parse_num(lo);
        a.max = parse_num(hi);
        f.axes.push_back(a);
      } else if (tag == "fixed") {
        std::string k, v;
        is >> k >> v;
        f.fixed.emplace_back(k, parse_num(v));
      }
      continue;
    }
    if (!header_row) {
      header_row = true;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != f.rank() + 1) throw ConfigError("field", "CSV row with wrong column count");
    f.values.push_back(parse_num(cols.back()));
  }
  if (f.axes.empty()) throw ConfigError("field", "CSV field without axis header");
  if (f.values.size() != f.cells()) throw ConfigError("field", "CSV row count does not match the axes");
  return f;
}

void write_pgm(std::ostream& out, const Field& f) {
  if (f.rank() != 2) throw ConfigError("format", "PGM output needs a 2D field");
  const double mx = f.values.empty() ? 0.0 : *std::max_element(f.values.begin(), f.values.end());
  const std::size_t rows = f.axes[0].n, cols = f.axes[1].n;
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  std::vector<unsigned char> px(f.values.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = mx > 0.0 ? std::clamp(f.values[i] / mx, 0.0, 1.0) : 0.0;
    px[i] = static_cast<unsigned char>(std::lround(255.0 * v));
  }
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

void save(const std::string& path, const Field& f, Format fmt) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("out", "cannot write " + tmp.string());
    switch (fmt) {
      case Format::binary: write_binary(out, f); break;
      case Format::csv: write_csv(out, f); break;
      case Format::pgm: write_pgm(out, f); break;
    }
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw ConfigError("out", "write failed for " + path);
    }
  }
  fs::rename(tmp, target);
}

Field load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("field", "cannot open " + path);
  char first = static_cast<char>(in.peek());
  if (first == 'C') return read_binary(in);
  return read_csv(in);
}

}  // namespace corrint::io
