#pragma once

// Closed-form solutions of the transport equation u_t + <∇u|b> = f with
// constant generalized b, the 1-D wave equation, and finite-difference
// residual checks.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mcalc/genfun.hpp"
#include "mcalc/gennum.hpp"

namespace mcalc {

/// Per-ε solution value: w(k, x, t) at grid sample k.
using Evaluator = std::function<double(std::size_t k, std::span<const double> x, double t)>;

struct TransportProblem {
  std::size_t n = 1;
  GenNet b;                         // real vector net of arity n
  Representative g;                 // arity n
  std::optional<Representative> f;  // arity n + 1, variables x1..xn, t
  double a = 1.0;                   // f lives on R^n x (-a, ∞)

  void validate() const;
};

struct WaveProblem {
  Representative g;  // u(x, 0)
  Representative h;  // u_t(x, 0)
  GridPtr grid;

  void validate() const;
};

/// w(x, t) = g(x - t b) + ∫_{-t}^{0} f(x + s b, t + s) ds, the integral by
/// 64-point Gauss–Legendre on the membrane [-t_ε, 0].
class TransportSolution {
 public:
  explicit TransportSolution(TransportProblem p);

  const TransportProblem& problem() const { return p_; }
  double value(std::size_t k, std::span<const double> x, double t) const;
  /// Net ε ↦ w(x_ε, t_ε); t must be positive on the tail.
  GenNet operator()(const GenPoint& x, const GenNet& t) const;
  Evaluator evaluator() const;

 private:
  double value(std::size_t k, std::span<const double> x, double t, double* floor) const;
  TransportProblem p_;
};

TransportSolution transport_solve(TransportProblem p);

/// w(x, t) = ½[g(x+t) + g(x-t)] + ½ ∫_{x-t}^{x+t} h, the integral by 64-point
/// Gauss–Legendre on M_xt = [x_ε - t_ε, x_ε + t_ε].
class WaveSolution {
 public:
  explicit WaveSolution(WaveProblem p);

  const WaveProblem& problem() const { return p_; }
  double value(std::size_t k, double x, double t) const;
  GenNet operator()(const GenNet& x, const GenNet& t) const;
  Evaluator evaluator() const;

  /// ½ ∫_{-L}^{L} (u_t² + u_x²) dx at time t, from symbolic derivatives of
  /// the d'Alembert form; `panels` composite 64-point panels.
  double energy(std::size_t k, double t, double L, std::size_t panels = 64) const;

 private:
  double value(std::size_t k, double x, double t, double* floor) const;
  WaveProblem p_;
  Representative dg_;
};

WaveSolution wave_solve(WaveProblem p);

/// A probe location: spatial point and time.
struct Probe {
  GenNet x;  // real, arity n
  GenNet t;
};

struct ResidualReport {
  GenNet raw;     // worst |residual| over probes
  GenNet scaled;  // residuals within the truncation/rounding scale set to 0
  NetClass raw_class;
  NetClass scaled_class;
};

/// u_t + <∇u|b> - f by central differences of step h_fd.
///
/// Null judgment is scaled: a residual r at one probe and ε is treated as
/// zero when |r| <= 10 (M2 h² + 64 u W / h), where M2 is the largest second
/// difference of w at step 10 h and W the largest |w| on the stencil.
/// Throws HypothesisError when a probe is within 2 h_fd of t = 0 on the tail.
ResidualReport residual_check(const Evaluator& w, const TransportProblem& p, std::span<const Probe> probes,
                              double h_fd = 1e-5);

/// u_tt - u_xx by second differences of step 10 h_fd, judged like the
/// transport check with step H = 10 h_fd in place of h.
ResidualReport residual_check(const Evaluator& w, const WaveProblem& p, std::span<const Probe> probes,
                              double h_fd = 1e-5);

/// exp(-1/(1 - x1²)) on |x1| < 1 and 0 outside, written without branches.
Representative windowed_bump(const Box& domain, const GridPtr& grid);

}  // namespace mcalc
