#pragma once

// Sampled representatives of generalized numbers and their asymptotic
// classification.
//
// A GenNet stores one value per grid sample (real or complex, scalar or a
// fixed-arity vector) together with a per-sample absolute rounding floor.
// The floor bounds the numerical uncertainty accumulated by quadrature and
// arithmetic; classify() treats a sample whose magnitude lies within its
// floor as exactly zero.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mcalc/errors.hpp"

namespace mcalc {

/// Strictly decreasing ε samples in (0, 1]; the last `tail_len` samples
/// (the smallest ε) drive every asymptotic judgment.
class EpsilonGrid {
 public:
  EpsilonGrid(std::vector<double> samples, std::size_t tail_len);

  /// ε_k = 10^(-k/per_decade) for k = k_min..k_max.
  static std::shared_ptr<const EpsilonGrid> decades(int k_min, int k_max, double per_decade,
                                                    std::size_t tail_len);
  /// k = 4..48, four samples per decade, tail of 16.
  static std::shared_ptr<const EpsilonGrid> standard();

  std::size_t size() const { return samples_.size(); }
  std::size_t tail_len() const { return tail_len_; }
  std::size_t tail_begin() const { return samples_.size() - tail_len_; }
  double operator[](std::size_t k) const { return samples_[k]; }
  std::span<const double> samples() const { return samples_; }
  bool is_tail(std::size_t k) const { return k >= tail_begin(); }

 private:
  std::vector<double> samples_;
  std::size_t tail_len_;
};

using GridPtr = std::shared_ptr<const EpsilonGrid>;

enum class NetKind { Null, Invertible, Moderate, Indeterminate };

const char* to_string(NetKind k);

struct NetClass {
  double estimated_valuation = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = 0.0;
  NetKind kind = NetKind::Indeterminate;
};

struct ClassifyConfig {
  double null_threshold = 25.0;
  double residual_max = 0.5;
  /// Allowed excess of the largest local exponent over the fitted slope.
  double invertible_margin = 2.0;
  /// Largest polynomial growth order |x_ε| <= ε^(-growth_max) accepted as moderate.
  double growth_max = 100.0;
};

class GenNet {
 public:
  GenNet() = default;
  GenNet(GridPtr grid, std::size_t arity, bool complex);

  static GenNet constant(GridPtr grid, double c);
  static GenNet constant(GridPtr grid, std::complex<double> c);
  static GenNet from_function(GridPtr grid, const std::function<double(double)>& f);
  static GenNet from_complex_function(GridPtr grid, const std::function<std::complex<double>(double)>& f);
  /// Builds an arity-n vector net from scalar components (all on one grid).
  static GenNet vector(std::span<const GenNet> components);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return grid_ ? grid_->size() : 0; }
  std::size_t arity() const { return arity_; }
  bool is_complex() const { return complex_; }
  bool is_vector() const { return arity_ > 1; }

  std::complex<double> at(std::size_t k, std::size_t j = 0) const { return values_[k * arity_ + j]; }
  double real(std::size_t k, std::size_t j = 0) const { return values_[k * arity_ + j].real(); }
  void set(std::size_t k, std::size_t j, std::complex<double> v) { values_[k * arity_ + j] = v; }
  void set(std::size_t k, std::complex<double> v) { values_[k * arity_] = v; }

  /// Absolute uncertainty of sample k (bounds the Euclidean error for vectors).
  double floor(std::size_t k) const { return floor_[k]; }
  void set_floor(std::size_t k, double f) { floor_[k] = f; }

  /// ε-wise Euclidean magnitude; the floor carries over.
  double magnitude(std::size_t k) const;
  GenNet magnitude() const;
  GenNet component(std::size_t j) const;

  /// Euclidean tail magnitudes (the smallest-ε samples).
  std::vector<double> tail_magnitudes() const;

 private:
  GridPtr grid_;
  std::size_t arity_ = 1;
  bool complex_ = false;
  std::vector<std::complex<double>> values_;
  std::vector<double> floor_;
};

class InvertibilityError : public HypothesisError {
 public:
  InvertibilityError(const std::string& what, NetClass cls) : HypothesisError(what), cls_(cls) {}
  const NetClass& net_class() const noexcept { return cls_; }

 private:
  NetClass cls_;
};

class NormUndefined : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

/// The gauge ε ↦ ε^r.
GenNet alpha(double r, const GridPtr& grid);

GenNet operator+(const GenNet& a, const GenNet& b);
GenNet operator-(const GenNet& a, const GenNet& b);
/// Scalar × scalar, or scalar × vector in either order.
GenNet operator*(const GenNet& a, const GenNet& b);
/// Requires `b` classified Invertible; throws InvertibilityError otherwise.
GenNet divide(const GenNet& a, const GenNet& b, const ClassifyConfig& cfg = {});
inline GenNet operator/(const GenNet& a, const GenNet& b) { return divide(a, b); }
GenNet operator-(const GenNet& a);
GenNet abs(const GenNet& a);
GenNet scale(const GenNet& a, std::complex<double> c);
inline GenNet scale(const GenNet& a, double c) { return scale(a, std::complex<double>(c, 0.0)); }

NetClass classify(const GenNet& a, const ClassifyConfig& cfg = {});

/// e^(-valuation); 0 for an infinite valuation. Throws NormUndefined for
/// Indeterminate nets.
double sharp_norm(const GenNet& a, const ClassifyConfig& cfg = {});

/// ε-wise Euclidean distance.
GenNet gen_distance(const GenNet& x, const GenNet& y);

/// |x_ε - x0_ε| <= ε^r at every tail sample (up to rounding floors).
bool in_ball(const GenNet& x, const GenNet& x0, double r);

/// Equality in the ring: the difference classifies Null.
bool equal(const GenNet& a, const GenNet& b, const ClassifyConfig& cfg = {});

/// Association: tail magnitudes of a - b decrease towards zero, at any rate.
bool associated(const GenNet& a, const GenNet& b);

/// True when the magnitude is bounded by a power of 1/ε on the tail.
bool has_polynomial_growth(const GenNet& a, const ClassifyConfig& cfg = {});

}  // namespace mcalc
