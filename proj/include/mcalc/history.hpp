#pragma once

#include <complex>
#include <string>
#include <vector>

#include "mcalc/box.hpp"
#include "mcalc/expr.hpp"
#include "mcalc/gennum.hpp"

namespace mcalc {

/// Declared derivative bound |γ_ε'(t)| <= c ε^(-N).
struct Growth {
  double c = 1.0;
  int N = 0;
};

/// Caller-declared curve properties. `closed` and `positively_oriented` are
/// spot-checked at construction; `simple` and `contractible` are trusted.
struct HistoryFlags {
  bool closed = false;
  bool simple = false;
  bool positively_oriented = false;
  bool contractible = false;
};

/// ε-indexed family of C^1 curves γ_ε : [0,1] -> R^n written in `t` and `eps`.
class History {
 public:
  static History make(const std::vector<std::string>& curve, Growth growth, HistoryFlags flags,
                      Box compact_box, const GridPtr& grid);
  static History make(std::vector<Expr> curve, Growth growth, HistoryFlags flags, Box compact_box,
                      const GridPtr& grid);

  std::size_t dim() const { return curve_.size(); }
  const GridPtr& grid() const { return grid_; }
  const Growth& growth() const { return growth_; }
  const HistoryFlags& flags() const { return flags_; }
  const Box& compact_box() const { return box_; }
  const std::vector<Expr>& curve() const { return curve_; }
  const std::vector<Expr>& derivative() const { return deriv_; }

  void point(double eps, double t, std::span<double> out) const;
  void velocity(double eps, double t, std::span<double> out) const;
  /// Planar curves read as complex numbers x1 + i x2.
  std::complex<double> point_c(double eps, double t) const;
  std::complex<double> velocity_c(double eps, double t) const;

  /// Shoelace signed area of the sampled closed polygon (planar curves).
  double signed_area(double eps, std::size_t nodes = 1024) const;

 private:
  History() = default;
  void validate() const;

  std::vector<Expr> curve_;
  std::vector<Expr> deriv_;
  Growth growth_;
  HistoryFlags flags_;
  Box box_;
  GridPtr grid_;
};

/// min over t of |γ_ε(t) - p|: a 1024-node scan refined by bisection on
/// <γ_ε(t) - p, γ_ε'(t)> around the best node.
double distance_to_curve(const History& gamma, double eps, std::span<const double> p);

/// Largest pairwise distance among the curve points at t = j/samples, j = 0..samples.
double curve_diameter(const History& gamma, double eps, std::size_t samples = 256);

}  // namespace mcalc
