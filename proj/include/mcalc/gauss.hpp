#pragma once

#include <cstddef>
#include <vector>

namespace mcalc {

/// Gauss–Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule (Newton iteration on P_n).
const GaussRule& gauss_legendre(std::size_t n);

/// Composite rule on [a, b] with `panels` equal panels of an `order`-point rule.
GaussRule composite_gauss(double a, double b, std::size_t order, std::size_t panels);

}  // namespace mcalc
