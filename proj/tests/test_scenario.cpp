#include <cmath>
#include <sstream>

#include "corrint/field_io.hpp"
#include "corrint/scenario.hpp"
#include "doctest.h"

using namespace corrint;

namespace {

std::string bytes(const ScenarioResult& r) {
  std::ostringstream os;
  for (const auto& [tag, f] : r.fields) {
    os << tag << '\n';
    io::write_binary(os, f);
  }
  os << r.report();
  return os.str();
}

}  // namespace

TEST_CASE("every preset passes its manifest and is reproducible") {
  const auto names = preset_names();
  CHECK(names.size() == 8);
  for (const auto& n : names) {
    CAPTURE(n);
    const ScenarioResult a = run_scenario(n);
    for (const auto& m : a.metrics)
      if (m.checked) CHECK_MESSAGE(m.pass, m.name << " = " << m.value << " " << m.bound);
    CHECK(a.pass());
    CHECK(a.report().find("verdict PASS") != std::string::npos);
    const ScenarioResult b = run_scenario(n, {}, 1);
    CHECK(bytes(a) == bytes(b));
  }
}

TEST_CASE("short mirror coherence leaves a correlation term in the one-body marginal") {
  const ScenarioResult r = run_scenario("fig5d");
  const Metric* c = r.metric("fit.cos(a+b)");
  const Metric* k = r.metric("fit.1");
  REQUIRE(c);
  REQUIRE(k);
  CHECK(std::abs(c->value) > 0.1 * std::abs(k->value));
}

TEST_CASE("overrides and rejections") {
  const ScenarioResult r = run_scenario("fig5c", {"expect.visibility_eq3_rel=1e-9"});
  CHECK_FALSE(r.pass());
  CHECK_THROWS_AS(run_scenario("fig5c", {"mirror.colour=red"}), ConfigError);
  CHECK_THROWS_AS(run_scenario("fig9"), ConfigError);
  CHECK_THROWS_AS(run_scenario("fig5c", {"novalue"}), ConfigError);
  // under-resolved grids are refused rather than silently aliased
  CHECK_THROWS_AS(run_scenario("fig2", {"grid.n=21"}), ConfigError);
}

TEST_CASE("preset text round trips through the parser") {
  const std::string& t = preset_text("fig4");
  CHECK(t.find("scenario.kind = ridges") != std::string::npos);
  const ScenarioResult r = run_scenario_text("copy", t);
  CHECK(r.pass());
  REQUIRE(r.metric("ridge_count"));
  CHECK(r.metric("ridge_count")->value == 5);
}
