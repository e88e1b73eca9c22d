#pragma once

#include <cstddef>

#include "mcalc/errors.hpp"

namespace mcalc {

/// Node counts and tolerances shared by every integrator. The same counts
/// are used at every ε, so integrands oscillating like sin(x/ε) lose accuracy
/// at small ε; the library reports this through the classification rather
/// than by growing the rule.
struct QuadConfig {
  std::size_t gauss_order = 64;   // nodes per panel, lines and intervals
  std::size_t segments = 8;       // panels on [0, 1] or [a, b]
  std::size_t ball_radial = 64;
  std::size_t ball_angular = 128;
  /// Maximum cell refinement depth for indicator regions; 0 picks a
  /// per-dimension default (1-D: 40, 2-D: 9, 3-D: 5).
  std::size_t indicator_refine_max = 0;
  /// Tensor Gauss points per axis on interior indicator cells.
  std::size_t indicator_gauss = 3;
  /// Largest accepted indicator uncertainty relative to the refinement box volume.
  double indicator_tol = 1e-2;
  double abs_tol = 1e-10;
  unsigned workers = 1;  // 0 = hardware concurrency

  void validate() const {
    if (gauss_order < 2 || segments < 1 || ball_radial < 2 || ball_angular < 2 || indicator_gauss < 1)
      throw InputError("quadrature node counts must be >= 2");
    if (!(abs_tol > 0.0) || !(indicator_tol > 0.0)) throw InputError("quadrature tolerances must be positive");
  }
};

}  // namespace mcalc
