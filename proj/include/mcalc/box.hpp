#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mcalc {

/// Closed axis-aligned box in R^n.
struct Box {
  std::vector<std::array<double, 2>> axes;

  Box() = default;
  explicit Box(std::vector<std::array<double, 2>> a) : axes(std::move(a)) {}

  std::size_t dim() const { return axes.size(); }
  double lo(std::size_t i) const { return axes[i][0]; }
  double hi(std::size_t i) const { return axes[i][1]; }

  bool contains(std::span<const double> p, double tol = 0.0) const {
    if (p.size() != axes.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!(p[i] >= axes[i][0] - tol && p[i] <= axes[i][1] + tol)) return false;
    return true;
  }

  bool contains(const Box& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (other.axes[i][0] < axes[i][0] || other.axes[i][1] > axes[i][1]) return false;
    return true;
  }

  double volume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= a[1] - a[0];
    return v;
  }

  Box enlarged(double by) const {
    Box b = *this;
    for (auto& a : b.axes) {
      a[0] -= by;
      a[1] += by;
    }
    return b;
  }

  static Box cube(std::size_t n, double lo, double hi) {
    return Box(std::vector<std::array<double, 2>>(n, {lo, hi}));
  }
};

}  // namespace mcalc
