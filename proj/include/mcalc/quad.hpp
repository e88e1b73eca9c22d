#pragma once

// Integration of generalized functions over membranes and along histories.
//
// Every integral is computed ε by ε with the same node counts and a fixed
// summation order, so results do not depend on the worker count. The floor
// of each output sample bounds the rounding of the sum.

#include <limits>
#include <vector>

#include "mcalc/config.hpp"
#include "mcalc/genfun.hpp"
#include "mcalc/gennum.hpp"
#include "mcalc/history.hpp"
#include "mcalc/membrane.hpp"

namespace mcalc {

/// ∫_M f := [ε ↦ ∫_{M_ε} f_ε dλ].
GenNet integrate_membrane(const Representative& f, const PreMembrane& M, const QuadConfig& cfg = {});

/// [ε ↦ ∫_0^1 <F_ε(γ_ε(t)) | γ_ε'(t)> dt].
GenNet line_integral_real(const std::vector<Representative>& F, const History& gamma, const QuadConfig& cfg = {});

/// [ε ↦ ∫_0^1 f_ε(γ_ε(t)) γ_ε'(t) dt] for a complex representative and a
/// planar history read in C.
GenNet line_integral_complex(const Representative& f, const History& gamma, const QuadConfig& cfg = {});

/// ∂F2/∂x1 - ∂F1/∂x2, symbolically.
Representative rot2(const std::vector<Representative>& F);

struct GreenReport {
  GenNet lhs;  // line integral of F along γ
  GenNet rhs;  // integral of rot2(F) over M
  NetClass gap_class;
};

/// Requires γ declared closed, simple, contractible and positively
/// oriented; M is the caller-supplied enclosed region.
GreenReport green_check(const std::vector<Representative>& F, const History& gamma, const PreMembrane& M,
                        const QuadConfig& cfg = {});

struct MeanValueReport {
  GenNet integral;
  GenNet volume;
  /// Largest r = j/100 in [-20, 20] with |∫_M f| <= vol(M) α_r on the
  /// tail; +inf when the integral is Null, -inf when no r qualifies.
  double r_star = -std::numeric_limits<double>::infinity();
};

/// Throws BoundDegenerate when vol(M) classifies Null.
MeanValueReport mean_value_bound(const Representative& f, const PreMembrane& M, const QuadConfig& cfg = {});

struct ConsistencyReport {
  GenNet membrane_val;
  GenNet line_val;
  NetClass gap_class;
};

/// Compares ∫_{[a,b]} f dλ with the line integral along a + t(b - a).
ConsistencyReport interval_consistency(const Representative& f, const GenNet& a, const GenNet& b,
                                       const QuadConfig& cfg = {});

}  // namespace mcalc
