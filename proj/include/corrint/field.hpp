#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace corrint {

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 1;  // samples, endpoints included

  double step() const { return n > 1 ? (max - min) / static_cast<double>(n - 1) : 0.0; }
  double at(std::size_t i) const {
    return n > 1 ? min + (max - min) * static_cast<double>(i) / static_cast<double>(n - 1) : min;
  }
};

// Row-major samples; the first axis varies slowest.
struct Field {
  std::vector<Axis> axes;
  std::vector<std::pair<std::string, double>> fixed;
  double t = 0.0;
  std::uint64_t config_hash = 0;
  std::vector<double> values;
  std::vector<std::string> warnings;  // not serialized

  std::size_t cells() const;
  std::size_t rank() const { return axes.size(); }
  void allocate() { values.assign(cells(), 0.0); }
  double& at(std::size_t i, std::size_t j) { return values[i * axes[1].n + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * axes[1].n + j]; }
  double fixed_value(const std::string& name) const;
};

// Same axes (name, bounds, counts) bit for bit.
bool same_grid(const Field& a, const Field& b);

// 1D extractions from a 2D field.
std::vector<double> row(const Field& f, std::size_t i);
std::vector<double> column(const Field& f, std::size_t j);
// Cells (i, n1-1-(i-offset)) through the grid centre; needs equal steps.
std::vector<double> antidiagonal(const Field& f);

}  // namespace corrint
