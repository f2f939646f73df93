#include "corrint/scenario.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "corrint/analysis.hpp"
#include "corrint/marginals.hpp"
#include "corrint/wavegroup.hpp"

namespace corrint {

// Generated at build time from presets/*.cfg.
const std::map<std::string, std::string>& embedded_presets();

namespace {

std::string fmt(double v) { return format_double(v); }

struct Context {
  std::string name;
  KeyValueFile kv;
  SystemConfig config;
  int threads = 0;
  ScenarioResult out;

  void metric(const std::string& n, double v) { out.metrics.push_back({n, v, "", false, true}); }
  void check_max(const std::string& n, double v, double bound) {
    out.metrics.push_back({n, v, "< " + fmt(bound), true, v < bound});
  }
  void check_min(const std::string& n, double v, double bound) {
    out.metrics.push_back({n, v, "> " + fmt(bound), true, v > bound});
  }
  void check_eq(const std::string& n, double v, double want) {
    out.metrics.push_back({n, v, "== " + fmt(want), true, v == want});
  }
};

// "min, max, n" triple.
GridAxisSpec axis_from(const KeyValueFile& kv, const std::string& key, Coord coord) {
  const auto v = kv.numbers(key);
  if (v.size() != 3 || !(v[2] >= 1.0) || v[2] != std::floor(v[2]))
    throw ConfigError(key, "expected 'min, max, n'", kv.line(key));
  return GridAxisSpec{coord, v[0], v[1], static_cast<std::size_t>(v[2])};
}

// Presets must sample every fringe at least 8 times.
void require_resolution(const SystemConfig& c, const GridSpec& g, const std::string& what) {
  const auto w = sampling_warnings(c, g);
  if (!w.empty()) throw ConfigError(what, "resolution below the fringe-sampling floor: " + w.front());
}

double overlap_period(const SystemConfig& c) {
  return fringe_spacing(c.particle1.mass, c.particle1.v0, c.mirror.v0, c.hbar);
}

// Mean of the active path centres that lie in the ordered domain.
Vec3 blob_center(const WavegroupState& s, double t) {
  Vec3 sum = Vec3::Zero();
  int n = 0;
  for (PathId p : s.active_paths()) {
    const Vec3 c = s.path_center(p, t);
    if (in_domain(s.config(), {c[0], c[1], c[2]})) {
      sum += c;
      ++n;
    }
  }
  if (n == 0) throw NumericalError("no path centre inside the ordered domain at t = " + fmt(t));
  return sum / n;
}

// ---- fig2: sequential two-body snapshots ----
void run_snapshots(Context& ctx) {
  const WavegroupState s(ctx.config);
  const auto times = ctx.kv.numbers("snapshot.t");
  const double t_overlap = ctx.kv.number_or("snapshot.t_overlap", 0.0);
  const double h = ctx.kv.number("grid.half_width");
  const auto n = static_cast<std::size_t>(ctx.kv.number("grid.n"));
  const double vis_sep = ctx.kv.number("expect.visibility_separated_max");
  const double vis_ovl = ctx.kv.number("expect.visibility_overlap_min");
  const double period_rel = ctx.kv.number("expect.period_rel");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const Vec3 c = blob_center(s, t);
    GridSpec g;
    g.axes = {GridAxisSpec{Coord::x1, c[0] - h, c[0] + h, n}, GridAxisSpec{Coord::X, c[1] - h, c[1] + h, n}};
    require_resolution(ctx.config, g, "grid");
    Field f = sample_grid(s, g, t, ctx.threads);
    const std::string tag = "t" + std::to_string(i);
    // Anti-diagonal cells step x1 - X by two grid steps.
    const double du = 2.0 * f.axes[0].step();
    const auto slice = antidiagonal(f);
    const auto [b, e] = positive_run(slice);
    const std::span<const double> run(slice.data() + b, e - b);
    const double vis = run.size() > 2 ? visibility(run, du) : 0.0;
    ctx.metric(tag + ".time", t);
    if (t == t_overlap) {
      ctx.check_min(tag + ".visibility", vis, vis_ovl);
      const auto fp = fringe_period(run, du);
      const double want = overlap_period(ctx.config);
      ctx.metric(tag + ".period", fp.found ? fp.period : 0.0);
      ctx.metric(tag + ".period_expected", want);
      ctx.check_max(tag + ".period_rel_error", fp.found ? std::abs(fp.period - want) / want : 1.0, period_rel);
    } else {
      ctx.check_max(tag + ".visibility", vis, vis_sep);
    }
    ctx.out.fields.emplace_back(tag, std::move(f));
  }
}

// ---- fig3: phase of diagonal fringes against x2 ----
double fig3_x2(const SystemConfig& c, const KeyValueFile& kv, double half_periods) {
  const auto pk = path_kinematics(c, PathId::P4_refl1_then_2);
  const Vec3 k = wavevectors(c);
  const double dk2 = (pk.wavevector_map * k)[2] - k[2];
  return kv.number("grid.fixed.x2") + half_periods * M_PI / std::abs(dk2);
}

// The line is anchored at x2_anchor so that slices for different x2 share it.
Field ridge_slice(const WavegroupState& s, double x2, double x2_anchor, double span, std::size_t n) {
  // Follow the line on which the singly reflected term keeps a fixed phase in X.
  const Mat3& m = s.coordinate_map(PathId::P2_refl1);
  const double slope = -m(1, 0) / m(1, 1);
  const double xc = x2_anchor / slope;  // where the line meets X = x2_anchor
  const double lo = slope < 0.0 ? xc : xc - span;
  const double hi = slope < 0.0 ? xc + span : xc;
  return sample_line(s, Vec3(0.0, 0.0, x2), Vec3(1.0, slope, 0.0), Axis{"x1", lo, hi, n}, 0.0);
}

void run_ridge_slice(Context& ctx) {
  const WavegroupState s(ctx.config);
  const double span = ctx.kv.number("slice.span");
  const auto n = static_cast<std::size_t>(ctx.kv.number("slice.n"));
  const double own = ctx.kv.number("scenario.x2_half_periods");
  const double partner = ctx.kv.number("scenario.partner_half_periods");
  const double x2 = fig3_x2(ctx.config, ctx.kv, own);
  ctx.metric("x2", x2);

  const double anchor = fig3_x2(ctx.config, ctx.kv, 0.0);
  Field a = ridge_slice(s, x2, anchor, span, n);
  Field b = ridge_slice(s, fig3_x2(ctx.config, ctx.kv, partner), anchor, span, n);
  const double ds = a.axes[0].step();
  const auto fp = fringe_period(a.values, ds);
  ctx.metric("slice.period", fp.found ? fp.period : 0.0);
  double shift = 0.0;
  try {
    shift = std::abs(phase_shift(a.values, b.values, ds)) / M_PI;
  } catch (const NumericalError& e) {
    ctx.out.notes.push_back(std::string("phase shift unavailable: ") + e.what());
  }
  const double want = ctx.kv.number("expect.phase_shift_pi");
  const double tol = ctx.kv.number("expect.phase_shift_rel");
  ctx.metric("phase_shift_over_pi", shift);
  ctx.check_max("phase_shift_rel_error", std::abs(shift - want) / want, tol);

  GridSpec g;
  g.axes = {axis_from(ctx.kv, "grid.x1", Coord::x1), axis_from(ctx.kv, "grid.X", Coord::X)};
  g.fixed = Vec3(0.0, 0.0, x2);
  require_resolution(ctx.config, g, "grid");
  ctx.out.fields.emplace_back("window", sample_grid(s, g, 0.0, ctx.threads));
  ctx.out.fields.emplace_back("slice", std::move(a));
}

// ---- fig4: separated single-path ridges ----
void run_ridges(Context& ctx) {
  const WavegroupState s(ctx.config);
  GridSpec g;
  g.axes = {axis_from(ctx.kv, "grid.x1", Coord::x1), axis_from(ctx.kv, "grid.X", Coord::X)};
  const double x2 = ctx.kv.number("grid.fixed.x2");
  const double t = ctx.kv.number_or("snapshot.t", 0.0);
  g.fixed = Vec3(0.0, 0.0, x2);
  require_resolution(ctx.config, g, "grid");
  Field f = sample_grid(s, g, t, ctx.threads);
  const double thr = ctx.kv.number("expect.ridge_threshold");
  const auto labels = label_ridges(f, thr);
  ctx.check_eq("ridge_count", labels.count, ctx.kv.number("expect.ridges"));

  // Each component should be one path term alone.
  const std::size_t n1 = f.axes[1].n;
  double worst = 0.0;
  for (int comp = 1; comp <= labels.count; ++comp) {
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < labels.labels.size(); ++i)
      if (labels.labels[i] == comp) cells.push_back(i);
    PathId best = PathId::P1_incident;
    double best_mass = -1.0;
    std::vector<double> best_terms;
    for (PathId p : s.active_paths()) {
      std::vector<double> terms(cells.size());
      double mass = 0.0;
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const Vec3 x(f.axes[0].at(cells[k] / n1), f.axes[1].at(cells[k] % n1), x2);
        terms[k] = std::norm(s.amplitude_weight(p) * s.path_term(p, x, t));
        mass += terms[k];
      }
      if (mass > best_mass) {
        best_mass = mass;
        best = p;
        best_terms = std::move(terms);
      }
    }
    double rel = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k)
      rel = std::max(rel, std::abs(f.values[cells[k]] - best_terms[k]) / best_terms[k]);
    ctx.metric("ridge" + std::to_string(comp) + ".path", static_cast<double>(index(best) + 1));
    ctx.metric("ridge" + std::to_string(comp) + ".max_rel_deviation", rel);
    worst = std::max(worst, rel);
  }
  ctx.check_max("single_path_max_rel_deviation", worst, ctx.kv.number("expect.single_path_rel"));
  ctx.out.fields.emplace_back("joint", std::move(f));
}

// ---- fig5: mirror coherence sweep ----
double eq3_visibility(double beta) {
  // eq3 = 3/2 - cos b - cos a + cos(a + b)/2, viewed as a fringe in a.
  const double amp = std::abs(std::complex<double>(-1.0, 0.0) + 0.5 * std::polar(1.0, beta));
  return amp / (1.5 - std::cos(beta));
}

Field coherence_marginal(const SystemConfig& c, const KeyValueFile& kv, const Quadrature& q, int threads,
                         std::vector<std::string>& notes) {
  const WavegroupState s(c);
  GridSpec g;
  g.axes = {axis_from(kv, "marginal.x1", Coord::x1)};
  g.fixed = Vec3(0.0, 0.0, kv.number("grid.fixed.x2"));
  require_resolution(c, g, "marginal.x1");
  auto r = marginal_over_mirror(s, 0.0, g, q, threads);
  if (!r.flagged.empty())
    notes.push_back(std::to_string(r.flagged.size()) + " marginal cells hit the quadrature depth cap");
  return std::move(r.field);
}

void run_coherence(Context& ctx) {
  const Quadrature q{ctx.kv.number("quad.abs_tol"), 40};
  const double x2 = ctx.kv.number("grid.fixed.x2");
  Field m = coherence_marginal(ctx.config, ctx.kv, q, ctx.threads, ctx.out.notes);
  const double ds = m.axes[0].step();
  const double vis = visibility(m.values, ds);
  const auto fp = fringe_period(m.values, ds);
  const double want_period = overlap_period(ctx.config);
  const double beta = alpha_beta(ctx.config, Vec3(m.axes[0].at(0), ctx.config.mirror.x0, x2)).beta;
  const double vis_eq3 = eq3_visibility(beta);
  ctx.metric("marginal.visibility", vis);
  ctx.metric("marginal.period", fp.found ? fp.period : 0.0);
  ctx.metric("beta", beta);
  ctx.metric("eq3.visibility", vis_eq3);
  ctx.metric("eq3.period", want_period);
  if (ctx.kv.has("expect.visibility_eq3_rel"))
    ctx.check_max("visibility_rel_error_vs_eq3", std::abs(vis - vis_eq3) / vis_eq3,
                  ctx.kv.number("expect.visibility_eq3_rel"));
  if (ctx.kv.has("expect.period_rel"))
    ctx.check_max("period_rel_error_vs_eq3", fp.found ? std::abs(fp.period - want_period) / want_period : 1.0,
                  ctx.kv.number("expect.period_rel"));
  if (ctx.kv.has("expect.partner_mirror_sigma_x")) {
    SystemConfig partner = ctx.config;
    partner.mirror.sigma_x = ctx.kv.number("expect.partner_mirror_sigma_x");
    const Field pm = coherence_marginal(partner, ctx.kv, q, ctx.threads, ctx.out.notes);
    const double pvis = visibility(pm.values, pm.axes[0].step());
    ctx.metric("partner.visibility", pvis);
    ctx.check_max("visibility_ratio_vs_partner", pvis > 0.0 ? vis / pvis : 1e300,
                  ctx.kv.number("expect.visibility_ratio_max"));
  }

  const WavegroupState s(ctx.config);
  GridSpec g;
  g.axes = {axis_from(ctx.kv, "grid.x1", Coord::x1), axis_from(ctx.kv, "grid.X", Coord::X)};
  g.fixed = Vec3(0.0, 0.0, x2);
  ctx.out.fields.emplace_back("joint", sample_grid(s, g, 0.0, ctx.threads));
  ctx.out.fields.emplace_back("marginal", std::move(m));
}

// ---- fig5d: two-particle marginal and its phase decomposition ----
void run_marginal2d(Context& ctx) {
  const Quadrature q{ctx.kv.number("quad.abs_tol"), 40};
  const WavegroupState s(ctx.config);
  GridSpec g;
  g.axes = {axis_from(ctx.kv, "grid.x1", Coord::x1), axis_from(ctx.kv, "grid.x2", Coord::x2)};
  require_resolution(ctx.config, g, "grid");
  auto r = marginal_over_mirror(s, 0.0, g, q, ctx.threads);
  if (!r.flagged.empty())
    ctx.out.notes.push_back(std::to_string(r.flagged.size()) + " marginal cells hit the quadrature depth cap");
  ctx.metric("quadrature.max_error", r.max_error);

  const auto samples = phase_samples(ctx.config, r.field, ctx.config.mirror.x0);
  const auto fit = coefficient_fit(samples, FitBasis::full);
  for (std::size_t i = 0; i < fit.names.size(); ++i) ctx.metric("fit." + fit.names[i], fit.coefficients[i]);
  ctx.metric("fit.relative_residual", fit.relative_residual);
  // The correlation term's weight relative to the constant, as in eq1 (1/2 : 3/2).
  const double ratio = fit.coefficients[3] / fit.coefficients[0];
  ctx.check_min("fit.correlation_over_constant", ratio, ctx.kv.number("expect.correlation_ratio_min"));
  ctx.out.notes.push_back(fit_report(fit));
  ctx.out.fields.emplace_back("marginal", std::move(r.field));
}

}  // namespace

bool ScenarioResult::pass() const {
  for (const auto& m : metrics)
    if (m.checked && !m.pass) return false;
  return true;
}

const Metric* ScenarioResult::metric(const std::string& n) const {
  for (const auto& m : metrics)
    if (m.name == n) return &m;
  return nullptr;
}

std::string ScenarioResult::report() const {
  std::ostringstream os;
  os << "scenario " << name << " (" << kind << ")\n";
  os << "config_hash " << canonical_hash(config) << "\n";
  for (const auto& m : metrics) {
    os << m.name << " = " << format_double(m.value);
    if (m.checked) os << "  [" << m.bound << "] " << (m.pass ? "PASS" : "FAIL");
    os << "\n";
  }
  for (const auto& n : notes) os << n << (n.empty() || n.back() != '\n' ? "\n" : "");
  os << "verdict " << (pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : embedded_presets()) out.push_back(k);
  return out;
}

const std::string& preset_text(const std::string& name) {
  const auto& p = embedded_presets();
  const auto it = p.find(name);
  if (it == p.end()) {
    std::string known;
    for (const auto& [k, v] : p) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("scenario", "unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

ScenarioResult run_scenario(const std::string& name, const std::vector<std::string>& overrides, int threads) {
  return run_scenario_text(name, preset_text(name), overrides, threads);
}

ScenarioResult run_scenario_text(const std::string& name, const std::string& text,
                                 const std::vector<std::string>& overrides, int threads) {
  Context ctx;
  ctx.name = name;
  ctx.threads = threads;
  ctx.kv = KeyValueFile::parse_string(text);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override", "expected key=value, got '" + o + "'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    ctx.kv.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  ctx.config = config_from_keys(ctx.kv);
  ctx.out.name = name;
  ctx.out.config = ctx.config;
  const std::string kind = ctx.kv.string_or("scenario.kind", "");
  ctx.out.kind = kind;

  // The closed form describes a clean incident state only if one exists.
  const double t0 = ctx.kv.number("scenario.t_initial");
  const WavegroupState s(ctx.config);
  ctx.check_max("incident_leakage", s.incident_leakage(t0), ctx.kv.number_or("expect.leakage_max", 1e-3));

  if (kind == "snapshots") run_snapshots(ctx);
  else if (kind == "ridge_slice") run_ridge_slice(ctx);
  else if (kind == "ridges") run_ridges(ctx);
  else if (kind == "coherence") run_coherence(ctx);
  else if (kind == "marginal2d") run_marginal2d(ctx);
  else throw ConfigError("scenario.kind", "unknown kind '" + kind + "'", ctx.kv.line("scenario.kind"));

  ctx.kv.reject_unused();
  return std::move(ctx.out);
}

}  // namespace corrint
