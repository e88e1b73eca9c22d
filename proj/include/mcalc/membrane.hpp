#pragma once

// Pre-membranes (ε-indexed integrable regions), null perturbations and
// volumes.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcalc/box.hpp"
#include "mcalc/config.hpp"
#include "mcalc/expr.hpp"
#include "mcalc/gennum.hpp"
#include "mcalc/history.hpp"

namespace mcalc {

/// [a_ε, b_ε].
struct IntervalRegion {
  GenNet a, b;
};

struct BoxRegion {
  std::vector<IntervalRegion> axes;
};

/// Closed ball; `center` is a real vector net of arity n (scalar for n = 1).
struct BallRegion {
  GenNet center;
  GenNet radius;
  std::size_t n = 0;
};

/// {x : p(x, ε) <= 0} inside a fixed bounding box.
struct PredicateRegion {
  Expr level;
  std::vector<Expr> gradient;
  Box bounding_box;
};

class NullPerturbation;

/// A base region pushed forward through x ↦ x + Ψ_ε(x) for each entry of
/// `pushes`, in order. Membership is decided by pulling the point back.
struct IndicatorRegion {
  std::variant<PredicateRegion, IntervalRegion, BoxRegion, BallRegion> base;
  std::vector<std::shared_ptr<const NullPerturbation>> pushes;
};

/// The image γ_ε([0,1]) of a history.
struct TraceRegion {
  std::shared_ptr<const History> curve;
};

using Region = std::variant<IntervalRegion, BoxRegion, BallRegion, IndicatorRegion, TraceRegion>;

class PreMembrane {
 public:
  static PreMembrane interval(GenNet a, GenNet b, Box compact_box);
  static PreMembrane box(std::vector<IntervalRegion> axes, Box compact_box);
  static PreMembrane ball(GenNet center, GenNet radius, Box compact_box);
  /// `predicate` is written in x1..xn and eps, n = bounding_box.dim() <= 3.
  static PreMembrane indicator(std::string_view predicate, Box bounding_box, Box compact_box, const GridPtr& grid);
  static PreMembrane indicator(Expr predicate, Box bounding_box, Box compact_box, const GridPtr& grid);
  /// Validates any region against `compact_box` on the tail.
  static PreMembrane from_region(Region region, Box compact_box, GridPtr grid);

  const Region& region() const { return region_; }
  const Box& compact_box() const { return box_; }
  std::size_t dim() const { return box_.dim(); }
  const GridPtr& grid() const { return grid_; }
  /// "interval", "box", "ball", "indicator" or "trace".
  std::string variant_name() const;

 private:
  PreMembrane(Region region, Box box, GridPtr grid)
      : region_(std::move(region)), box_(std::move(box)), grid_(std::move(grid)) {}
  void validate() const;

  Region region_;
  Box box_;
  GridPtr grid_;
};

/// A null function Ψ_ε : R^n -> R^n defining the equivalence x ↦ x + Ψ_ε(x).
class NullPerturbation {
 public:
  /// `psi` components are written in x1..xn and eps. The certificate
  /// classifies ε ↦ sup |Ψ_ε| over 64 seeded points of `box` (plus its
  /// center) and must come out Null.
  static NullPerturbation make(const std::vector<std::string>& psi, Box box, const GridPtr& grid);
  static NullPerturbation make(std::vector<Expr> psi, Box box, const GridPtr& grid);

  std::size_t dim() const { return psi_.size(); }
  const std::vector<Expr>& psi() const { return psi_; }
  const Box& box() const { return box_; }
  const GridPtr& grid() const { return grid_; }
  const GenNet& sup() const { return sup_; }
  const NetClass& certificate() const { return certificate_; }

  /// Every component is the literal 0.
  bool is_zero() const;
  /// All second partial derivatives fold to the literal 0.
  bool is_affine() const { return affine_; }

  /// y = x + Ψ_ε(x).
  void push(double eps, std::span<const double> x, std::span<double> y) const;
  /// Solves y + Ψ_ε(y) = x by fixed-point iteration; false when the
  /// iteration does not settle within 100 steps.
  bool pull(double eps, std::span<const double> x, std::span<double> y) const;

  /// Affine part at ε: Ψ_ε(x) = A x + c (row-major A). Only meaningful when
  /// is_affine().
  void affine_parts(double eps, std::span<double> A, std::span<double> c) const;
  bool jacobian_is_diagonal() const;
  /// A = λI: off-diagonal entries zero, diagonal entries the same expression.
  bool jacobian_is_scalar() const;

 private:
  NullPerturbation() = default;

  std::vector<Expr> psi_;
  std::vector<Expr> jac_;  // row-major ∂Ψ_i/∂x_j
  bool affine_ = false;
  Box box_;
  GridPtr grid_;
  GenNet sup_;
  NetClass certificate_;
};

/// Ψ for the map between balls B(x, r) and B(x', r'):
/// Ψ_ε(y) = ((r' - r)/r)(y - x) + (x' - x). Arguments are expressions in eps.
std::vector<std::string> ball_map_psi(const std::vector<std::string>& x, const std::string& r,
                                      const std::vector<std::string>& x2, const std::string& r2);

/// φ_ε(M_ε) with φ_ε(x) = x + Ψ_ε(x). Exact image variants for affine Ψ on
/// intervals, diagonal-affine Ψ on boxes and scalar-affine Ψ on balls;
/// otherwise an indicator region. Histories are mapped curve-wise.
PreMembrane perturb(const PreMembrane& M, const std::shared_ptr<const NullPerturbation>& psi);

/// ε ↦ vol(M_ε). Indicator volumes carry the refinement uncertainty in
/// the net's floors.
GenNet volume(const PreMembrane& M, const QuadConfig& cfg = {});

/// The pre-membrane γ* = (γ_ε([0,1])).
PreMembrane history_image(const History& gamma);

/// ε ↦ diameter of γ_ε([0,1]) for a trace membrane.
GenNet trace_diameter(const PreMembrane& M);

/// Result of integrating over an indicator region at one ε.
struct RegionSum {
  double value = 0.0;
  /// Bound on the contribution of unresolved boundary cells.
  double uncertainty = 0.0;
};

/// Adaptive cell quadrature of f over an indicator region at sample k.
/// Throws IntegrabilityError when the boundary uncertainty exceeds
/// indicator_tol times the absolute mass plus abs_tol, and
/// PerturbationTooLarge when a pull-back does not converge on the tail.
RegionSum integrate_indicator(const IndicatorRegion& R, std::size_t dim, const GridPtr& grid, std::size_t k,
                              const std::function<double(std::span<const double>)>& f, const QuadConfig& cfg);

/// Per-ε box containing M_ε.
Box membrane_extent(const PreMembrane& M, std::size_t k);

/// Per-ε box containing an indicator region, used for refinement.
Box indicator_extent(const IndicatorRegion& R, std::size_t dim, std::size_t k);

}  // namespace mcalc
