#pragma once

// Generalized complex analysis along histories: distance to a curve, the
// Cauchy formula and Taylor coefficients.

#include <vector>

#include "mcalc/config.hpp"
#include "mcalc/genfun.hpp"
#include "mcalc/gennum.hpp"
#include "mcalc/history.hpp"

namespace mcalc {

/// d(z0, γ*) := [ε ↦ dist(z0_ε, γ_ε([0,1]))]. `z0` is a complex scalar net
/// (planar curves) or a real vector net of the curve's dimension.
GenNet distance_to_history(const GenNet& z0, const History& gamma);

/// Data of the Cauchy formula, checked at construction:
///  - γ declared closed, simple, contractible and positively oriented;
///  - d(z0, γ*) classifies Invertible;
///  - winding number 1 about z0_ε at every tail ε (1024-node argument principle);
///  - Cauchy–Riemann spot check of f at 32 points per tail ε.
class ContourSetup {
 public:
  /// `rho` is the sharp-norm radius of the admissible neighbourhood of z0;
  /// it must satisfy rho < r/4 with r = sharp_norm(d(z0, γ*)). A NaN picks r/8.
  static ContourSetup make(Representative f, History gamma, GenNet z0,
                           double rho = std::numeric_limits<double>::quiet_NaN());

  const Representative& f() const { return f_; }
  const History& gamma() const { return gamma_; }
  const GenNet& z0() const { return z0_; }
  const GenNet& separation() const { return separation_; }
  const NetClass& separation_class() const { return sep_class_; }
  double radius_norm() const { return r_; }
  double rho() const { return rho_; }

 private:
  ContourSetup(Representative f, History gamma) : f_(std::move(f)), gamma_(std::move(gamma)) {}

  Representative f_;
  History gamma_;
  GenNet z0_;
  GenNet separation_;
  NetClass sep_class_;
  double r_ = 0.0;
  double rho_ = 0.0;
};

struct CauchyReport {
  GenNet via_contour;
  GenNet direct;
  NetClass gap_class;
};

/// via_contour = (1/2πi) ∫_γ f(w)/(w - z0) dw; direct = f(z0).
CauchyReport cauchy_eval(const ContourSetup& setup, const QuadConfig& cfg = {});

/// a_n = (1/2πi) ∫_γ f(w)/(w - z0)^(n+1) dw for n = 0..n_max. Each a_n is
/// independent of n_max, and a_0 equals cauchy_eval's via_contour.
std::vector<GenNet> taylor_coefficients(const ContourSetup& setup, std::size_t n_max, const QuadConfig& cfg = {});

struct TaylorReport {
  GenNet series;
  GenNet direct;
  NetClass gap_class;
  std::size_t terms_used = 0;
};

/// Partial sums of Σ a_n (z - z0)^n, stopped once every tail magnitude of
/// the current term is below 1e-14 or the coefficients run out.
///
/// Admissible z: sharp_norm(z - z0) < min(1, rho), or, failing that,
/// |z_ε - z0_ε| <= d_ε / 2 at every tail ε (geometric ratio at most 1/2).
/// Throws DivergenceRisk otherwise.
TaylorReport taylor_eval(const ContourSetup& setup, const std::vector<GenNet>& coeffs, const GenNet& z);

}  // namespace mcalc
