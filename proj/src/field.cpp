#include "corrint/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "corrint/model.hpp"

namespace corrint {

std::size_t Field::cells() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.n;
  return n;
}

double Field::fixed_value(const std::string& name) const {
  for (const auto& [k, v] : fixed)
    if (k == name) return v;
  throw ConfigError(name, "field has no fixed coordinate of that name");
}

bool same_grid(const Field& a, const Field& b) {
  if (a.axes.size() != b.axes.size()) return false;
  for (std::size_t i = 0; i < a.axes.size(); ++i) {
    const Axis &x = a.axes[i], &y = b.axes[i];
    if (x.name != y.name || x.min != y.min || x.max != y.max || x.n != y.n) return false;
  }
  return true;
}

std::vector<double> row(const Field& f, std::size_t i) {
  if (f.rank() != 2) throw std::invalid_argument("row: field must be 2D");
  const std::size_t n1 = f.axes[1].n;
  return {f.values.begin() + i * n1, f.values.begin() + (i + 1) * n1};
}

std::vector<double> column(const Field& f, std::size_t j) {
  if (f.rank() != 2) throw std::invalid_argument("column: field must be 2D");
  std::vector<double> out(f.axes[0].n);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.at(i, j);
  return out;
}

std::vector<double> antidiagonal(const Field& f) {
  if (f.rank() != 2) throw std::invalid_argument("antidiagonal: field must be 2D");
  const std::size_t n0 = f.axes[0].n, n1 = f.axes[1].n;
  const std::size_t m = std::min(n0, n1);
  const std::size_t o0 = (n0 - m) / 2, o1 = (n1 - m) / 2;
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = f.at(o0 + k, o1 + m - 1 - k);
  return out;
}

}  // namespace corrint
