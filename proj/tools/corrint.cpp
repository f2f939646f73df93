// corrint: command-line front end for the correlated-interference library.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "corrint/analysis.hpp"
#include "corrint/eigenstate.hpp"
#include "corrint/field_io.hpp"
#include "corrint/marginals.hpp"
#include "corrint/oracle.hpp"
#include "corrint/parallel.hpp"
#include "corrint/scenario.hpp"
#include "corrint/simd.hpp"
#include "corrint/wavegroup.hpp"

using namespace corrint;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kManifestFail = 3 };

struct Globals {
  std::string config;
  std::string out;
  std::string format = "bin";
  int threads = 0;
};

// Inputs in the config's own units; the library works in natural units.
struct Scale {
  double length = 1.0;
  double time = 1.0;
};

SystemConfig load_natural(const std::string& path, Scale& scale) {
  if (path.empty()) throw ConfigError("config", "--config is required");
  const SystemConfig c = load_config(path);
  if (c.units.mode == UnitMode::si) {
    const SystemConfig n = to_natural_units(c);
    scale = {n.units.length_m, n.units.time_s};
    return n;
  }
  return c;
}

std::vector<double> parse_list(const std::string& s, std::size_t want, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw ConfigError(what, "bad number '" + item + "'");
    }
  }
  if (want && v.size() != want) throw ConfigError(what, "expected " + std::to_string(want) + " comma-separated values");
  return v;
}

// "x1:min:max:n"
GridAxisSpec parse_axis(const std::string& s, const Scale& sc) {
  std::stringstream ss(s);
  std::string name, lo, hi, n;
  if (!std::getline(ss, name, ':') || !std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') || !std::getline(ss, n))
    throw ConfigError("axis", "expected name:min:max:n, got '" + s + "'");
  try {
    return GridAxisSpec{parse_coord(name), std::stod(lo) / sc.length, std::stod(hi) / sc.length,
                        static_cast<std::size_t>(std::stoul(n))};
  } catch (const std::invalid_argument&) {
    throw ConfigError("axis", "bad number in '" + s + "'");
  }
}

Vec3 parse_fixed(const std::vector<std::string>& items, const Scale& sc) {
  Vec3 v = Vec3::Zero();
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos) throw ConfigError("fixed", "expected coord=value, got '" + it + "'");
    v[static_cast<int>(parse_coord(it.substr(0, eq)))] = parse_list(it.substr(eq + 1), 1, "fixed")[0] / sc.length;
  }
  return v;
}

void emit_field(const Globals& g, const Field& f, const std::string& default_name) {
  for (const auto& w : f.warnings) std::cerr << "warning: " << w << "\n";
  if (g.out.empty()) {
    std::cout << "field " << default_name << ": " << f.cells() << " cells, t = " << format_double(f.t)
              << " (use --out to write it)\n";
    return;
  }
  io::save(g.out, f, io::parse_format(g.format));
  std::cout << "wrote " << g.out << "\n";
}

std::string out_path(const std::string& dir, const std::string& stem, const std::string& fmt) {
  return (std::filesystem::path(dir) / (stem + io::format_extension(io::parse_format(fmt)))).string();
}

void print_vec(std::ostream& os, const Vec3& v, int n) {
  for (int i = 0; i < n; ++i) os << (i ? ", " : "") << format_double(v[i]);
}

int cmd_kinematics(const Globals& g) {
  Scale sc;
  const SystemConfig c = load_natural(g.config, sc);
  const int n = c.bodies;
  std::cout << "config_hash " << canonical_hash(c) << "\n";
  const WavegroupState s(c);
  for (PathId p : s.active_paths()) {
    const auto pk = path_kinematics(c, p);
    std::cout << path_name(p) << ": velocities (";
    print_vec(std::cout, pk.final_velocities, n);
    std::cout << ") momentum " << format_double(pk.conserved_p) << " energy " << format_double(pk.conserved_E);
    if (p != PathId::P1_incident) std::cout << " R " << format_double(ratio_R(c, p));
    std::cout << "\n";
  }
  for (Coord a : {Coord::x1, Coord::X, Coord::x2}) {
    if (a == Coord::x2 && n == 2) continue;
    std::cout << "fringe_spacing " << coord_name(a) << " " << format_double(axis_fringe_spacing(c, a)) << "\n";
  }
  return kOk;
}

int cmd_eigenstate(const Globals& g, const std::string& kappa, const std::string& x, double t) {
  Scale sc;
  const SystemConfig c = load_natural(g.config, sc);
  const auto kv = parse_list(kappa, 3, "kappa");
  const auto xv = parse_list(x, 3, "x");
  const Vec3 k(kv[0] * sc.length, kv[1] * sc.length, kv[2] * sc.length);
  const Vec3 pos(xv[0] / sc.length, xv[1] / sc.length, xv[2] / sc.length);
  const auto a = eigenstate_amplitude(c, k, pos, t / sc.time);
  std::cout << "amplitude " << format_double(a.value.real()) << " " << format_double(a.value.imag())
            << (a.in_domain ? "" : " (outside domain)") << "\n";
  const auto ph = alpha_beta(c, pos);
  std::cout << "alpha " << format_double(ph.alpha) << " beta " << format_double(ph.beta) << "\n";
  std::cout << "eq1 " << format_double(pdf_closed_form(ClosedForm::eq1, ph)) << "\n";
  std::cout << "eq2 " << format_double(pdf_closed_form(ClosedForm::eq2_classical, ph)) << "\n";
  std::cout << "one_body " << format_double(pdf_closed_form(ClosedForm::one_body, ph)) << "\n";
  return kOk;
}

int cmd_wavegroup(const Globals& g, const std::vector<std::string>& axes, const std::vector<std::string>& fixed,
                  double t, bool no_mask) {
  Scale sc;
  const SystemConfig c = load_natural(g.config, sc);
  GridSpec spec;
  for (const auto& a : axes) spec.axes.push_back(parse_axis(a, sc));
  spec.fixed = parse_fixed(fixed, sc);
  spec.mask_outside_domain = !no_mask;
  const WavegroupState s(c);
  emit_field(g, sample_grid(s, spec, t / sc.time, g.threads), "wavegroup");
  return kOk;
}

int cmd_marginal(const Globals& g, const std::vector<std::string>& axes, const std::vector<std::string>& fixed,
                 double t, double tol, const std::string& over, const std::string& order) {
  Scale sc;
  const SystemConfig c = load_natural(g.config, sc);
  const WavegroupState s(c);
  const Quadrature q{tol, 40};
  MarginalResult r;
  if (over == "mirror") {
    GridSpec spec;
    for (const auto& a : axes) spec.axes.push_back(parse_axis(a, sc));
    spec.fixed = parse_fixed(fixed, sc);
    r = marginal_over_mirror(s, t / sc.time, spec, q, g.threads);
  } else if (over == "mirror+p2") {
    if (axes.size() != 1) throw ConfigError("axis", "mirror+p2 marginal takes one x1 axis");
    const auto a = parse_axis(axes[0], sc);
    if (a.coord != Coord::x1) throw ConfigError("axis", "mirror+p2 marginal is a function of x1");
    const auto ord = order == "particle2-first" ? IntegrationOrder::particle2_first : IntegrationOrder::mirror_first;
    if (order != "mirror-first" && order != "particle2-first")
      throw ConfigError("order", "expected mirror-first or particle2-first");
    r = marginal_over_mirror_and_p2(s, t / sc.time, a, q, ord, g.threads);
  } else {
    throw ConfigError("over", "expected mirror or mirror+p2");
  }
  std::cout << "max_error " << format_double(r.max_error) << " flagged " << r.flagged.size() << "\n";
  emit_field(g, r.field, "marginal");
  return r.flagged.empty() ? kOk : kNumerical;
}

int cmd_analyze(const std::string& path, const std::string& slice, double threshold) {
  const Field f = io::load(path);
  std::cout << "rank " << f.rank() << " cells " << f.cells() << " t " << format_double(f.t) << " config_hash "
            << f.config_hash << "\n";
  std::vector<double> v;
  double ds = f.axes[0].step();
  if (f.rank() == 1) {
    v = f.values;
  } else if (f.rank() == 2) {
    if (slice == "antidiag") {
      v = antidiagonal(f);
      ds = std::hypot(f.axes[0].step(), f.axes[1].step());
    } else if (slice.rfind("row:", 0) == 0) {
      v = row(f, std::stoul(slice.substr(4)));
      ds = f.axes[1].step();
    } else if (slice.rfind("col:", 0) == 0) {
      v = column(f, std::stoul(slice.substr(4)));
    } else {
      throw ConfigError("slice", "expected antidiag, row:i or col:j");
    }
    std::cout << "ridges " << ridge_count(f, threshold) << " (threshold " << format_double(threshold) << ")\n";
  } else {
    throw ConfigError("field", "analyze handles 1D and 2D fields");
  }
  const auto [b, e] = positive_run(v);
  const std::span<const double> run(v.data() + b, e - b);
  const auto fp = fringe_period(run, ds);
  std::cout << "slice " << (f.rank() == 1 ? "full" : slice) << " samples " << run.size() << "\n";
  std::cout << "period " << (fp.found ? format_double(fp.period) : "none") << "\n";
  std::cout << "visibility " << format_double(run.size() > 2 ? visibility(run, ds) : 0.0) << "\n";
  return kOk;
}

struct OracleArgs {
  std::size_t n = 512;
  double dx = 0.0;
  double dt = 0.0;
  double t_start = 0.0;
  std::string snapshots;
  std::string origin;  // comma list of axis minima
  double V0 = -1.0;
  double w = -1.0;
  bool absorbing = false;
  bool compare = false;
};

int cmd_oracle(const Globals& g, const std::string& mode, const OracleArgs& a) {
  Scale sc;
  const SystemConfig c = load_natural(g.config, sc);
  if (sc.length != 1.0 || sc.time != 1.0) throw ConfigError("units", "the oracle takes natural-unit configs");
  if (!(a.dx > 0.0)) throw ConfigError("dx", "--dx is required");
  const int rank = mode == "2body" ? 2 : 3;
  if (mode != "2body" && mode != "3body") throw ConfigError("mode", "expected 2body or 3body");
  std::vector<double> lo;
  if (!a.origin.empty()) {
    lo = parse_list(a.origin, static_cast<std::size_t>(rank), "origin");
  } else {
    for (int d = 0; d < rank; ++d) lo.push_back(c.mirror.x0 - 0.5 * a.dx * static_cast<double>(a.n));
  }
  auto axis = [&](int d) {
    return oracle::GridAxis{lo[d], lo[d] + a.dx * static_cast<double>(a.n), a.n};
  };
  oracle::BarrierModel b = oracle::default_barrier(c, a.dx);
  if (a.V0 >= 0.0) b.V0 = a.V0;
  if (a.w >= 0.0) b.w = a.w;
  oracle::Options o;
  o.t_start = a.t_start;
  o.snapshot_times = parse_list(a.snapshots, 0, "snapshots");
  o.absorbing = a.absorbing;
  o.threads = g.threads;
  std::vector<oracle::Snapshot> snaps;
  if (rank == 2) {
    const oracle::GridSpec2D grid{axis(0), axis(1), a.dt, 0};
    snaps = oracle::evolve_2body(c, grid, b, o);
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      const auto& s = snaps[i];
      std::cout << "t " << format_double(s.t) << " norm " << format_double(s.norm) << " energy "
                << format_double(s.energy()) << " v1 " << format_double(s.mean_velocity[0]) << " V "
                << format_double(s.mean_velocity[1]);
      if (a.compare) {
        const auto cmp = oracle::compare_fields(oracle::analytic_on_grid(c, grid, s.t), s.pdf);
        std::cout << " l2_rel " << format_double(cmp.l2_rel) << " period_rel "
                  << (cmp.period_found ? format_double(cmp.period_rel) : "none");
      }
      std::cout << "\n";
      if (!g.out.empty()) io::save(out_path(g.out, "oracle_t" + std::to_string(i), g.format), s.pdf, io::parse_format(g.format));
    }
  } else {
    const oracle::GridSpec3D grid{axis(0), axis(1), axis(2), a.dt, 0};
    snaps = oracle::evolve_3body(c, grid, b, o);
    for (const auto& s : snaps)
      std::cout << "t " << format_double(s.t) << " norm " << format_double(s.norm) << " energy "
                << format_double(s.energy()) << "\n";
    if (!g.out.empty()) std::cout << "3-body snapshots are reported, not written\n";
  }
  const auto [v1, V] = collide(c.particle1.mass, c.mirror.mass, c.particle1.v0, c.mirror.v0);
  std::cout << "collide v1' " << format_double(v1) << " V' " << format_double(V) << "\n";
  return kOk;
}

int cmd_scenario(const Globals& g, const std::string& name, const std::vector<std::string>& sets) {
  if (name == "list") {
    for (const auto& n : preset_names()) std::cout << n << "\n";
    return kOk;
  }
  if (name.rfind("show:", 0) == 0) {
    std::cout << preset_text(name.substr(5));
    return kOk;
  }
  const auto r = run_scenario(name, sets, g.threads);
  const std::string report = r.report();
  std::cout << report;
  if (!g.out.empty()) {
    for (const auto& [tag, f] : r.fields)
      io::save(out_path(g.out, name + "_" + tag, g.format), f, io::parse_format(g.format));
    const auto path = std::filesystem::path(g.out) / (name + "_report.txt");
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << report;
    }
    std::filesystem::rename(tmp, path);
  }
  return r.pass() ? kOk : kManifestFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrint: closed-form wavegroups for a particle-mirror-particle system"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "system config (key = value file)");
  app.add_option("--out", g.out, "output file (or directory for scenario/oracle)");
  app.add_option("--threads", g.threads, "worker threads (default: CORRINT_THREADS or all cores)");
  app.add_option("--format", g.format, "field format: bin, csv, pgm")->check(CLI::IsMember({"bin", "csv", "pgm"}));

  auto* kin = app.add_subcommand("kinematics", "path velocities, conservation, R and fringe spacings");
  kin->fallthrough();

  std::string kappa = "0,0,0", xs = "0,0,0";
  double t = 0.0;
  auto* eig = app.add_subcommand("eigenstate", "five-path eigenstate amplitude and closed forms at one point");
  eig->fallthrough();
  eig->add_option("--kappa", kappa, "k1,K,k2");
  eig->add_option("--x", xs, "x1,X,x2");
  eig->add_option("--t", t, "time");

  std::vector<std::string> axes, fixed;
  bool no_mask = false;
  auto* wg = app.add_subcommand("wavegroup", "sample the wavegroup PDF on a grid");
  wg->fallthrough();
  wg->add_option("--axis", axes, "coord:min:max:n (repeatable, first varies slowest)")->required();
  wg->add_option("--fixed", fixed, "coord=value for unswept coordinates");
  wg->add_option("--t", t, "time");
  wg->add_flag("--no-mask", no_mask, "keep values outside the ordered domain");

  double tol = 1e-10;
  std::string over = "mirror", order = "mirror-first";
  auto* mg = app.add_subcommand("marginal", "integrate the PDF over unmeasured coordinates");
  mg->fallthrough();
  mg->add_option("--axis", axes, "coord:min:max:n")->required();
  mg->add_option("--fixed", fixed, "coord=value");
  mg->add_option("--t", t, "time");
  mg->add_option("--tol", tol, "absolute quadrature tolerance per cell");
  mg->add_option("--over", over, "mirror or mirror+p2");
  mg->add_option("--order", order, "mirror-first or particle2-first (mirror+p2 only)");

  std::string field_path, slice = "antidiag";
  double threshold = 0.1;
  auto* an = app.add_subcommand("analyze", "fringe period, visibility and ridge count of a field file");
  an->fallthrough();
  an->add_option("field", field_path, "field file (binary or csv)")->required();
  an->add_option("--slice", slice, "antidiag, row:i or col:j");
  an->add_option("--threshold", threshold, "ridge threshold as a fraction of the maximum");

  std::string mode;
  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "split-step evolution for comparison with the closed form");
  orc->fallthrough();
  orc->add_option("mode", mode, "2body or 3body")->required();
  orc->add_option("config", g.config, "config file (same as --config)");
  orc->add_option("--grid", oa.n, "points per axis (power of two)");
  orc->add_option("--dx", oa.dx, "grid spacing, equal on all axes")->required();
  orc->add_option("--dt", oa.dt, "time step")->required();
  orc->add_option("--t-start", oa.t_start, "time of the initial product state");
  orc->add_option("--snapshots", oa.snapshots, "t0,t1,...")->required();
  orc->add_option("--origin", oa.origin, "axis minima, comma-separated (default: centred on the mirror)");
  orc->add_option("--V0", oa.V0, "barrier height (default 1000 x incident kinetic energy)");
  orc->add_option("--w", oa.w, "barrier width (default dx/4)");
  orc->add_flag("--absorbing", oa.absorbing, "absorbing edges instead of periodic");
  orc->add_flag("--compare", oa.compare, "compare each snapshot with the closed form");

  std::string preset;
  std::vector<std::string> sets;
  auto* sc = app.add_subcommand("scenario", "run a preset and check its manifest");
  sc->fallthrough();
  sc->add_option("name", preset, "preset name, 'list', or 'show:<name>'")->required();
  sc->add_option("--set", sets, "key=value override (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  if (g.threads > 0) set_default_threads(g.threads);

  try {
    if (*kin) return cmd_kinematics(g);
    if (*eig) return cmd_eigenstate(g, kappa, xs, t);
    if (*wg) return cmd_wavegroup(g, axes, fixed, t, no_mask);
    if (*mg) return cmd_marginal(g, axes, fixed, t, tol, over, order);
    if (*an) return cmd_analyze(field_path, slice, threshold);
    if (*orc) return cmd_oracle(g, mode, oa);
    if (*sc) return cmd_scenario(g, preset, sets);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
