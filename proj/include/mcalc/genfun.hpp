#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcalc/box.hpp"
#include "mcalc/expr.hpp"
#include "mcalc/gennum.hpp"
#include "mcalc/history.hpp"

namespace mcalc {

enum class Codomain { Real, Complex };

/// A representative (f_ε) of a generalized function, written as one
/// expression in the declared variables and `eps`.
///
/// Real representatives use x1..xn by default. Complex representatives are
/// functions of one complex variable `z`; their domain box lives in
/// R^2 = (Re z, Im z).
class Representative {
 public:
  /// Parses `body` and runs the moderateness spot-check: on 32 pseudo-random
  /// points of `domain` the net ε ↦ f_ε(x) must grow at most polynomially.
  static Representative make(std::string_view body, std::size_t arity, Box domain, Codomain codomain,
                             const GridPtr& grid, std::vector<std::string> vars = {});
  /// Wraps an existing expression without the spot-check.
  static Representative from_expr(Expr body, std::size_t arity, Box domain, Codomain codomain);

  const Expr& body() const { return body_; }
  std::size_t arity() const { return arity_; }
  const Box& domain() const { return domain_; }
  Codomain codomain() const { return codomain_; }
  bool is_complex() const { return codomain_ == Codomain::Complex; }
  /// Name of the i-th argument.
  const std::string& variable(std::size_t i) const { return body_.variables()[i]; }

  double value(double eps, std::span<const double> x) const;
  std::complex<double> value(double eps, std::complex<double> z) const;

  /// Symbolic partial derivative in argument i; same domain.
  Representative partial(std::size_t i) const;

 private:
  Representative(Expr body, std::size_t arity, Box domain, Codomain codomain);

  Expr body_;
  std::size_t arity_ = 0;
  Box domain_;
  Codomain codomain_ = Codomain::Real;
};

/// A compactly supported generalized point: a vector net whose tail samples
/// stay in `compact_box`. A complex scalar net is read as a point of R^2.
class GenPoint {
 public:
  GenPoint(GenNet coords, Box compact_box);

  /// Constant net at a classical point.
  static GenPoint classical(const GridPtr& grid, std::span<const double> x, Box compact_box);

  const GenNet& coords() const { return coords_; }
  const Box& compact_box() const { return box_; }
  std::size_t dim() const { return box_.dim(); }
  const GridPtr& grid() const { return coords_.grid(); }

  /// Real coordinates of sample k.
  void sample(std::size_t k, std::span<double> out) const;

 private:
  GenNet coords_;
  Box box_;
};

/// ε ↦ f_ε(x_ε).
GenNet evaluate_at(const Representative& f, const GenPoint& x);

std::vector<Representative> gradient(const Representative& f);

/// ε ↦ <∇f_ε(γ_ε(t0)) | γ_ε'(t0)>.
GenNet derivative_along_curve(const Representative& f, const History& gamma, double t0);

/// Throws CompactnessError listing tail samples of `pts` outside `box`.
void require_tail_inside(const GenPoint& pts, const Box& box, const std::string& what);

}  // namespace mcalc
