#pragma once

#include <string>
#include <utility>
#include <vector>

#include "corrint/field.hpp"
#include "corrint/model.hpp"

namespace corrint {

struct Metric {
  std::string name;
  double value = 0.0;
  std::string bound;     // human-readable expectation, empty when informational
  bool checked = false;  // part of the manifest verdict
  bool pass = true;
};

struct ScenarioResult {
  std::string name;
  std::string kind;
  SystemConfig config;
  std::vector<std::pair<std::string, Field>> fields;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;  // free-form reports (coefficient tables)

  bool pass() const;
  const Metric* metric(const std::string& name) const;
  // Stable text: one metric per line, then notes, then the verdict.
  std::string report() const;
};

std::vector<std::string> preset_names();
// Commented key = value text of a built-in preset.
const std::string& preset_text(const std::string& name);

// overrides are "key=value" strings applied on top of the preset.
ScenarioResult run_scenario(const std::string& name, const std::vector<std::string>& overrides = {},
                            int threads = 0);
ScenarioResult run_scenario_text(const std::string& name, const std::string& text,
                                 const std::vector<std::string>& overrides = {}, int threads = 0);

}  // namespace corrint
