// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corrint/analysis.hpp"
#include "corrint/eigenstate.hpp"
#include "corrint/field_io.hpp"
#include "corrint/marginals.hpp"
#include "corrint/oracle.hpp"
#include "corrint/scenario.hpp"
#include "corrint/wavegroup.hpp"

using namespace corrint;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;
std::vector<int> only;  // criterion ids from the command line; empty runs all

void criterion(int id, const char* name, double time_limit_s, const std::function<Outcome()>& body) {
  if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return;
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = time_limit_s <= 0.0 || secs < time_limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  char limit[32] = "none";
  if (time_limit_s > 0.0) std::snprintf(limit, sizeof limit, "%.3g s", time_limit_s);
  std::printf("%s [%d] %s: %s (runtime %.3f s, limit %s%s)\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              secs, limit, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double metric(const ScenarioResult& r, const std::string& name) {
  const Metric* m = r.metric(name);
  if (!m) throw std::runtime_error("scenario " + r.name + " has no metric " + name);
  return m->value;
}

// ---- 1 ----
Outcome conservation() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> lm(-3.0, 6.0), uv(0.1, 3.0), uV(-0.05, 0.05);
  double worst_p = 0.0, worst_e = 0.0, worst_det = 0.0;
  for (int k = 0; k < 1000; ++k) {
    SystemConfig c;
    c.particle1 = Body{std::pow(10.0, lm(rng)), uv(rng), -10.0, 1.0};
    c.mirror = Body{std::pow(10.0, lm(rng)), uV(rng), 0.0, 1.0};
    c.particle2 = Body{std::pow(10.0, lm(rng)), -uv(rng), 10.0, 1.0};
    const Vec3 m = masses(c), v = velocities(c);
    const double p0 = total_momentum(m, v), e0 = kinetic_energy(m, v);
    const double pscale = (m.array() * v.array().abs()).sum();
    for (PathId p : kAllPaths) {
      const PathKinematics pk = path_kinematics(c, p);
      worst_p = std::max(worst_p, std::abs(total_momentum(m, pk.final_velocities) - p0) / pscale);
      worst_e = std::max(worst_e, std::abs(kinetic_energy(m, pk.final_velocities) - e0) / e0);
      worst_det = std::max(worst_det, std::abs(std::abs(pk.velocity_map.determinant()) - 1.0));
    }
  }
  const double tol = 1e-12;
  return {worst_p < tol && worst_e < tol && worst_det < tol,
          fmt("1000 configs x 5 paths: max rel dp %.2e, dE %.2e, ||det|-1| %.2e (tol %.0e)", worst_p, worst_e,
              worst_det, tol)};
}

// ---- 2 ----
Outcome contact_nullity() {
  SystemConfig two;
  two.bodies = 2;
  two.amplitudes = {1.0, -1.0, 0.0, 0.0, 0.0};
  two.particle1 = Body{1.0, 1.0, -0.01, 3.0};
  two.mirror = Body{100.0, 0.0, 0.0, 1.0};
  const WavegroupState s2(two);

  SystemConfig three;
  three.particle1 = Body{1.0, 1.0, -0.01, 2.0};
  three.mirror = Body{20.0, 0.05, 0.0, 1.0};
  three.particle2 = Body{2.0, -0.5, 0.01, 2.0};
  const WavegroupState s3(three);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(-5.0, 5.0), ud(0.5, 4.0);
  double worst2 = 0.0, worst4 = 0.0, worst5 = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double X = ux(rng), t = ut(rng), d = ud(rng);
    worst2 = std::max(worst2, std::abs(s2.amplitude(Vec3(X, X, 0.0), t).value));
    const Vec3 a(X, X, X + d), b(X - d, X, X);
    const double r4 = std::abs(s3.amplitude(a, t).value);
    const double g4 = std::abs(three.amplitudes[3] * s3.path_term(PathId::P4_refl1_then_2, a, t));
    worst4 = std::max(worst4, std::abs(r4 - g4));
    const double r5 = std::abs(s3.amplitude(b, t).value);
    const double g5 = std::abs(three.amplitudes[4] * s3.path_term(PathId::P5_refl2_then_1, b, t));
    worst5 = std::max(worst5, std::abs(r5 - g5));
  }
  const double tol = 1e-12;
  return {worst2 < tol && worst4 < tol && worst5 < tol,
          fmt("100 random (X,t): two-body max |psi| %.2e; three-body max ||psi|-|a4 G4|| %.2e, ||psi|-|a5 G5|| %.2e "
              "(tol %.0e)",
              worst2, worst4, worst5, tol)};
}

// ---- 3 ----
Outcome identity() {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const PhasePair f{-M_PI + 2 * M_PI * i / 99.0, -M_PI + 2 * M_PI * j / 99.0};
      const double lhs =
          2 * pdf_closed_form(ClosedForm::eq1, f) - (2 * pdf_closed_form(ClosedForm::eq2_classical, f) - 1);
      worst = std::max(worst, std::abs(lhs - std::cos(f.alpha + f.beta)));
    }
  return {worst < 1e-12, fmt("100x100 grid: max |2 eq1 - (2 eq2 - 1) - cos(a+b)| = %.2e (tol 1e-12)", worst)};
}

// ---- 4 ----
// Fringe period of the two-body PDF along x1 at X = mirror centre, t = 0.
double x1_period(const SystemConfig& c, double span) {
  const WavegroupState s(c);
  const double X = s.config().mirror.x0;
  const double step = fringe_spacing(s.config().particle1.mass, s.config().particle1.v0, s.config().mirror.v0,
                                     s.config().hbar) / 32.0;
  const std::size_t n = static_cast<std::size_t>(span / step);
  const Axis ax{"s", 0.0, step * static_cast<double>(n - 1), n};
  const Field f = sample_line(s, Vec3(X - ax.max - step, X, 0.0), Vec3(1, 0, 0), ax, 0.0);
  const FringeEstimate e = fringe_period(f.values, step);
  if (!e.found) throw std::runtime_error("no fringe found along x1");
  return e.period;
}

Outcome fringe_spacing_check() {
  std::string detail;
  bool ok = true;
  for (double ratio : {1e3, 1e6}) {
    SystemConfig c;
    c.bodies = 2;
    c.amplitudes = {1.0, -1.0, 0.0, 0.0, 0.0};
    c.particle1 = Body{1.0, 1.0, -0.01, 200.0};
    c.mirror = Body{ratio, 0.0, 0.0, 200.0};
    const double want = fringe_spacing(1.0, 1.0, 0.0);
    const double got = x1_period(c, 60.0);
    const double rel = std::abs(got - want) / want;
    ok &= rel < 0.01;
    detail += fmt("M/m1=%.0e period %.6f vs %.6f (rel %.1e); ", ratio, got, want, rel);
  }
  // SI: atom with lambda_dB = 1 um against a static mirror
  SystemConfig si;
  si.units.mode = UnitMode::si;
  si.units.has_si_scale = true;
  si.hbar = kHbar;
  si.bodies = 2;
  si.amplitudes = {1.0, -1.0, 0.0, 0.0, 0.0};
  const double m = 1.443e-25, lambda = 1e-6;
  si.particle1 = Body{m, kPlanck / (m * lambda), -1e-9, 50e-6};
  si.mirror = Body{1e3 * m, 0.0, 0.0, 50e-6};
  const SystemConfig nat = to_natural_units(si);
  const double got_si = x1_period(si, 15.0 * fringe_spacing(nat.particle1.mass, nat.particle1.v0, 0.0)) *
                        nat.units.length_m;
  const double rel = std::abs(got_si - 0.5e-6) / 0.5e-6;
  ok &= rel < 0.01;
  detail += fmt("SI lambda_dB=1 um: spacing %.6e m vs 5e-07 (rel %.1e); tol 1%%", got_si, rel);
  return {ok, detail};
}

// ---- 5 ----
Outcome oracle_run() {
  SystemConfig c;
  c.bodies = 2;
  c.amplitudes = {1.0, -1.0, 0.0, 0.0, 0.0};
  // sigma 4: the overlap fringes decay fast away from the contact line, and
  // narrower packets leave fewer than two periods to measure
  c.particle1 = Body{1.0, 1.0, -0.01, 4.0};
  // slow mirror so that |V - v1| stays 1 after the kick direction flips
  c.mirror = Body{1000.0, -0.001, 0.0, 4.0};
  oracle::GridSpec2D g;
  g.x1 = {-76.0, 26.4, 512};
  g.X = {-51.2, 51.2, 512};
  g.dt = 0.005;
  const oracle::BarrierModel b = oracle::default_barrier(c, g.x1.dx());
  oracle::Options o;
  o.t_start = -35.0;
  o.snapshot_times = {-35.0, 0.0, 35.0};
  const auto snaps = oracle::evolve_2body(c, g, b, o);
  const auto& start = snaps[0];
  const auto& overlap = snaps[1];
  const auto& after = snaps[2];

  const Field analytic = oracle::analytic_on_grid(c, g, 0.0);
  const oracle::Comparison cmp = oracle::compare_fields(analytic, overlap.pdf);
  const auto [v1, V] = collide(c.particle1.mass, c.mirror.mass, c.particle1.v0, c.mirror.v0);
  const double dv1 = std::abs(after.mean_velocity[0] - v1) / std::abs(v1);
  const double dV = std::abs(after.mean_velocity[1] - V) / std::abs(V);

  // transmitted mass: x1 > X after the collision
  double wrong_side = 0.0, total = 0.0;
  const Field& p = after.pdf;
  for (std::size_t i = 0; i < p.axes[0].n; ++i)
    for (std::size_t j = 0; j < p.axes[1].n; ++j) {
      total += p.at(i, j);
      if (p.axes[0].at(i) > p.axes[1].at(j)) wrong_side += p.at(i, j);
    }
  const double steps_k = (35.0 + 35.0) / g.dt / 1000.0;
  const double norm_drift = std::abs(after.norm - start.norm) / steps_k;
  const double energy_drift = std::abs(after.energy() / start.energy() - 1.0);

  const bool ok = cmp.period_found && cmp.l2_rel < 0.05 && cmp.period_rel < 0.02 && dv1 < 0.02 && dV < 0.02;
  return {ok, fmt("512^2, V0=%.1f w=%.3f: L2 %.4f (<0.05), period %s rel %.2e (<0.02), <v1> %.6f vs %.6f (rel %.1e), "
                  "<V> %.7f vs %.7f (rel %.1e) (<0.02); diagnostics: reflection %.6f, norm drift %.1e per 1e3 steps, "
                  "<H> drift %.1e, <V>(t_start) %.1e",
                  b.V0, b.w, cmp.l2_rel, cmp.period_found ? "found" : "NOT found", cmp.period_rel, after.mean_velocity[0], v1, dv1, after.mean_velocity[1], V,
                  dV, 1.0 - wrong_side / total, norm_drift, energy_drift, start.potential)};
}

// ---- 6 ----
Outcome beamsplitter() {
  const ScenarioResult r = run_scenario("fig4");
  const double count = metric(r, "ridge_count");
  const double dev = metric(r, "single_path_max_rel_deviation");
  return {count == 5 && dev < 1e-8,
          fmt("fig4: %d ridges at threshold 0.1 (want 5), worst single-path deviation %.2e (tol 1e-8)",
              static_cast<int>(count), dev)};
}

// ---- 7 ----
Outcome interferometer() {
  const ScenarioResult up = run_scenario("fig3_upper");
  const ScenarioResult lo = run_scenario("fig3_lower");
  const double a = metric(up, "phase_shift_over_pi"), b = metric(lo, "phase_shift_over_pi");
  const double ea = std::abs(std::abs(a) - 1.0), eb = std::abs(std::abs(b) - 1.0);
  return {ea < 0.05 && eb < 0.05,
          fmt("phase shift upper vs lower %.4f pi, lower vs upper %.4f pi (tol 5%%)", a, b)};
}

// ---- 8 ----
Outcome coherence_sweep() {
  const ScenarioResult a = run_scenario("fig5a");
  const ScenarioResult c = run_scenario("fig5c");
  const double va = metric(a, "marginal.visibility"), vc = metric(c, "marginal.visibility");
  const double veq = metric(c, "eq3.visibility");
  const double pc = metric(c, "marginal.period"), peq = metric(c, "eq3.period");
  const double vrel = std::abs(vc - veq) / veq, prel = std::abs(pc - peq) / peq;
  const bool ok = va < 0.1 * vc && vrel < 0.1 && prel < 0.01;
  return {ok, fmt("visibility fig5a %.4f vs fig5c %.4f (need < 0.1x); fig5c vs eq3: visibility %.4f vs %.4f (rel "
                  "%.1e, tol 0.1), period %.5f vs %.5f (rel %.1e, tol 0.01)",
                  va, vc, vc, veq, vrel, pc, peq, prel)};
}

// ---- 9 ----
Outcome marginal_consistency() {
  SystemConfig c;
  c.particle1 = Body{1.0, 1.0, -0.01, 1.5};
  c.mirror = Body{20.0, 0.0, 0.0, 0.5};
  c.particle2 = Body{1.0, -1.0, 0.01, 1.5};
  const WavegroupState s(c);
  const double tol = 1e-6;
  const double joint = norm(s, 0.0, tol);
  const auto box = s.envelope_box(0.0, 8.0);
  const double len = box.hi[0] - box.lo[0];
  const MarginalResult m =
      marginal_over_mirror_and_p2(s, 0.0, {Coord::x1, box.lo[0], box.hi[0], 1201}, Quadrature{tol / len, 40});
  const double mass = integrate_field(m.field);
  const double dm = std::abs(mass - joint);

  const Quadrature q{1e-8, 40};
  const GridAxisSpec ax{Coord::x1, -8.0, 4.0, 49};
  const MarginalResult a = marginal_over_mirror_and_p2(s, 0.0, ax, q, IntegrationOrder::mirror_first);
  const MarginalResult b = marginal_over_mirror_and_p2(s, 0.0, ax, q, IntegrationOrder::particle2_first);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.field.cells(); ++i)
    worst = std::max(worst, std::abs(a.field.values[i] - b.field.values[i]));
  return {dm < 3 * tol && worst < 2 * q.abs_tol,
          fmt("marginal mass %.9f vs joint norm %.9f (|diff| %.1e < %.0e); order swap max |diff| %.1e < %.0e", mass,
              joint, dm, 3 * tol, worst, 2 * q.abs_tol)};
}

// ---- 10 ----
Outcome coefficient_fit_report() {
  SystemConfig c;
  c.particle1 = Body{1.0, 1.0, -0.01, 2000.0};
  c.mirror = Body{1e9, 0.0, 0.0, 1.0};
  c.particle2 = Body{1.0, -1.0, 0.01, 2000.0};
  const WavegroupState s(c);
  GridSpec g;
  g.axes = {{Coord::x1, -30.0, -20.0, 101}, {Coord::x2, 20.0, 30.0, 101}};
  g.fixed = Vec3(0.0, 0.0, 0.0);
  const Field f = sample_grid(s, g, 0.0);
  const auto samples = phase_samples(s.config(), f, 0.0);
  const CoefficientFit fit = coefficient_fit(samples, FitBasis::cosine);
  std::string table = fit_report(fit);
  std::string inline_table;
  const auto ref = eq1_reference(FitBasis::cosine);
  const double scale = ref[0] / fit.coefficients[0];
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i)
    inline_table += fmt("%s%s %.4f (eq1 %.2f)", i ? ", " : "", fit.names[i].c_str(), scale * fit.coefficients[i], ref[i]);
  std::printf("%s", table.c_str());
  return {fit.relative_residual < 1e-3,
          fmt("wall limit M=1e9: cosine-basis relative residual %.2e (tol 1e-3); fitted, rescaled to eq1's constant: "
              "%s; agreement with eq1 not asserted",
              fit.relative_residual, inline_table.c_str())};
}

// ---- 11 ----
std::string preset_bytes(const std::string& name, int threads, const std::filesystem::path& dir) {
  const ScenarioResult r = run_scenario(name, {}, threads);
  std::filesystem::create_directories(dir);
  std::string all;
  for (const auto& [tag, f] : r.fields) {
    const auto path = dir / (name + "_" + tag + ".cfld");
    io::save(path.string(), f, io::Format::binary);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    all += os.str();
  }
  return all + r.report();
}

Outcome determinism() {
  const auto base = std::filesystem::temp_directory_path() / "corrint_acceptance";
  std::filesystem::remove_all(base);
  std::string detail;
  bool ok = true;
  for (const auto& n : preset_names()) {
    const std::string a = preset_bytes(n, 0, base / "run1");
    const std::string b = preset_bytes(n, 2, base / "run2");
    const bool same = a == b;
    ok &= same;
    detail += fmt("%s%s %s (%zu bytes)", detail.empty() ? "" : ", ", n.c_str(), same ? "identical" : "DIFFER",
                  a.size());
  }
  std::filesystem::remove_all(base);
  return {ok, detail + "; second run with 2 threads"};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  criterion(1, "conservation suite", 1.0, conservation);
  criterion(2, "contact nullity", 1.0, contact_nullity);
  criterion(3, "closed-form identity", 0.1, identity);
  criterion(4, "fringe spacing", 10.0, fringe_spacing_check);
  criterion(5, "oracle equivalence", 300.0, oracle_run);
  criterion(6, "beamsplitter regime", 60.0, beamsplitter);
  criterion(7, "interferometer regime", 60.0, interferometer);
  criterion(8, "coherence sweep", 300.0, coherence_sweep);
  criterion(9, "marginal consistency", 0.0, marginal_consistency);
  criterion(10, "coefficient-fit transparency", 0.0, coefficient_fit_report);
  criterion(11, "determinism", 0.0, determinism);
  const int ran = only.empty() ? 11 : static_cast<int>(only.size());
  std::printf("%s: %d of %d criteria failed\n", failures ? "FAIL" : "PASS", failures, ran);
  return failures ? 1 : 0;
}
