#include "mcalc/gennum.hpp"

#include <algorithm>
#include <cmath>

namespace mcalc {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kUnderflow = 1e-300;

void require_same_grid(const GenNet& a, const GenNet& b) {
  if (!a.grid() || !b.grid()) throw Error("operation on an empty net");
  if (a.grid() == b.grid()) return;
  const auto sa = a.grid()->samples();
  const auto sb = b.grid()->samples();
  if (!std::equal(sa.begin(), sa.end(), sb.begin(), sb.end()))
    throw Error("nets live on different epsilon grids");
}

// Local exponents log|x| / log ε over the nonzero tail samples.
struct TailStats {
  std::vector<double> log_eps;
  std::vector<double> log_mag;
  std::size_t zeros = 0;
  bool zero_suffix = true;  // every zero sample follows every nonzero one
  bool nonfinite = false;
};

TailStats tail_stats(const GenNet& a) {
  TailStats s;
  const auto& g = *a.grid();
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k) {
    const double m = a.magnitude(k);
    if (!std::isfinite(m)) {
      s.nonfinite = true;
      continue;
    }
    if (m <= a.floor(k) || m < kUnderflow) {
      ++s.zeros;
      continue;
    }
    if (s.zeros > 0) s.zero_suffix = false;
    s.log_eps.push_back(std::log(g[k]));
    s.log_mag.push_back(std::log(m));
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// EpsilonGrid

EpsilonGrid::EpsilonGrid(std::vector<double> samples, std::size_t tail_len)
    : samples_(std::move(samples)), tail_len_(tail_len) {
  if (samples_.empty()) throw InputError("epsilon grid is empty");
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    if (!(samples_[k] > 0.0 && samples_[k] <= 1.0)) throw InputError("epsilon samples must lie in (0, 1]");
    if (k > 0 && !(samples_[k] < samples_[k - 1])) throw InputError("epsilon samples must be strictly decreasing");
  }
  if (tail_len_ < 4 || tail_len_ > samples_.size())
    throw InputError("tail_len must satisfy 4 <= tail_len <= number of samples");
}

std::shared_ptr<const EpsilonGrid> EpsilonGrid::decades(int k_min, int k_max, double per_decade,
                                                         std::size_t tail_len) {
  if (k_max < k_min || k_min < 0 || !(per_decade > 0.0)) throw InputError("invalid grid range");
  std::vector<double> s;
  for (int k = k_min; k <= k_max; ++k) s.push_back(std::pow(10.0, -k / per_decade));
  return std::make_shared<const EpsilonGrid>(std::move(s), tail_len);
}

std::shared_ptr<const EpsilonGrid> EpsilonGrid::standard() {
  static const auto grid = decades(4, 48, 4.0, 16);
  return grid;
}

const char* to_string(NetKind k) {
  switch (k) {
    case NetKind::Null: return "Null";
    case NetKind::Invertible: return "Invertible";
    case NetKind::Moderate: return "Moderate";
    case NetKind::Indeterminate: return "Indeterminate";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// GenNet

GenNet::GenNet(GridPtr grid, std::size_t arity, bool complex)
    : grid_(std::move(grid)), arity_(arity), complex_(complex) {
  if (!grid_) throw Error("net without grid");
  if (arity_ == 0) throw Error("net arity must be positive");
  values_.assign(grid_->size() * arity_, {0.0, 0.0});
  floor_.assign(grid_->size(), 0.0);
}

GenNet GenNet::constant(GridPtr grid, double c) {
  GenNet n(std::move(grid), 1, false);
  for (std::size_t k = 0; k < n.size(); ++k) n.set(k, c);
  return n;
}

GenNet GenNet::constant(GridPtr grid, std::complex<double> c) {
  GenNet n(std::move(grid), 1, true);
  for (std::size_t k = 0; k < n.size(); ++k) n.set(k, c);
  return n;
}

GenNet GenNet::from_function(GridPtr grid, const std::function<double(double)>& f) {
  GenNet n(std::move(grid), 1, false);
  for (std::size_t k = 0; k < n.size(); ++k) n.set(k, f((*n.grid_)[k]));
  return n;
}

GenNet GenNet::from_complex_function(GridPtr grid, const std::function<std::complex<double>(double)>& f) {
  GenNet n(std::move(grid), 1, true);
  for (std::size_t k = 0; k < n.size(); ++k) n.set(k, f((*n.grid_)[k]));
  return n;
}

GenNet GenNet::vector(std::span<const GenNet> components) {
  if (components.empty()) throw Error("vector net needs at least one component");
  bool cplx = false;
  for (const auto& c : components) {
    require_same_grid(components[0], c);
    if (c.arity() != 1) throw Error("vector components must be scalar nets");
    cplx = cplx || c.is_complex();
  }
  GenNet out(components[0].grid(), components.size(), cplx);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double f2 = 0.0;
    for (std::size_t j = 0; j < components.size(); ++j) {
      out.set(k, j, components[j].at(k));
      f2 += components[j].floor(k) * components[j].floor(k);
    }
    out.set_floor(k, std::sqrt(f2));
  }
  return out;
}

double GenNet::magnitude(std::size_t k) const {
  if (arity_ == 1) return std::abs(values_[k]);
  double s = 0.0;
  for (std::size_t j = 0; j < arity_; ++j) s += std::norm(values_[k * arity_ + j]);
  return std::sqrt(s);
}

GenNet GenNet::magnitude() const {
  GenNet out(grid_, 1, false);
  for (std::size_t k = 0; k < size(); ++k) {
    out.set(k, magnitude(k));
    out.set_floor(k, floor_[k]);
  }
  return out;
}

GenNet GenNet::component(std::size_t j) const {
  if (j >= arity_) throw Error("component index out of range");
  GenNet out(grid_, 1, complex_);
  for (std::size_t k = 0; k < size(); ++k) {
    out.set(k, at(k, j));
    out.set_floor(k, floor_[k]);
  }
  return out;
}

std::vector<double> GenNet::tail_magnitudes() const {
  std::vector<double> m;
  for (std::size_t k = grid_->tail_begin(); k < size(); ++k) m.push_back(magnitude(k));
  return m;
}

// ---------------------------------------------------------------------------
// Arithmetic

GenNet alpha(double r, const GridPtr& grid) {
  return GenNet::from_function(grid, [r](double e) { return std::pow(e, r); });
}

namespace {

GenNet additive(const GenNet& a, const GenNet& b, double sign) {
  require_same_grid(a, b);
  if (a.arity() != b.arity()) throw Error("arity mismatch in net addition");
  GenNet out(a.grid(), a.arity(), a.is_complex() || b.is_complex());
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t j = 0; j < out.arity(); ++j) out.set(k, j, a.at(k, j) + sign * b.at(k, j));
    out.set_floor(k, a.floor(k) + b.floor(k) + 2.0 * kUnit * (a.magnitude(k) + b.magnitude(k)));
  }
  return out;
}

}  // namespace

GenNet operator+(const GenNet& a, const GenNet& b) { return additive(a, b, 1.0); }
GenNet operator-(const GenNet& a, const GenNet& b) { return additive(a, b, -1.0); }

GenNet operator*(const GenNet& a, const GenNet& b) {
  require_same_grid(a, b);
  if (a.is_vector() && b.is_vector()) throw Error("product of two vector nets is undefined");
  const GenNet& vec = a.is_vector() ? a : b;
  const GenNet& sca = a.is_vector() ? b : a;
  GenNet out(a.grid(), vec.arity(), a.is_complex() || b.is_complex());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto s = sca.at(k);
    for (std::size_t j = 0; j < out.arity(); ++j) out.set(k, j, s * vec.at(k, j));
    const double ms = std::abs(s), mv = vec.magnitude(k);
    out.set_floor(k, ms * vec.floor(k) + mv * sca.floor(k) + sca.floor(k) * vec.floor(k) +
                         2.0 * kUnit * ms * mv);
  }
  return out;
}

GenNet divide(const GenNet& a, const GenNet& b, const ClassifyConfig& cfg) {
  require_same_grid(a, b);
  if (b.is_vector()) throw Error("division by a vector net");
  const NetClass cb = classify(b, cfg);
  if (cb.kind != NetKind::Invertible)
    throw InvertibilityError(std::string("divisor is not invertible (classified ") + to_string(cb.kind) + ")", cb);
  GenNet out(a.grid(), a.arity(), a.is_complex() || b.is_complex());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto d = b.at(k);
    for (std::size_t j = 0; j < out.arity(); ++j) out.set(k, j, a.at(k, j) / d);
    const double md = std::abs(d);
    const double q = out.magnitude(k);
    out.set_floor(k, md > 0.0 ? (a.floor(k) + q * b.floor(k)) / md + 2.0 * kUnit * q
                              : std::numeric_limits<double>::infinity());
  }
  return out;
}

GenNet operator-(const GenNet& a) { return scale(a, -1.0); }

GenNet abs(const GenNet& a) {
  if (a.is_vector()) return a.magnitude();
  GenNet out(a.grid(), 1, false);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.set(k, std::abs(a.at(k)));
    out.set_floor(k, a.floor(k));
  }
  return out;
}

GenNet scale(const GenNet& a, std::complex<double> c) {
  GenNet out(a.grid(), a.arity(), a.is_complex() || c.imag() != 0.0);
  const double mc = std::abs(c);
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t j = 0; j < out.arity(); ++j) out.set(k, j, c * a.at(k, j));
    out.set_floor(k, mc * a.floor(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification

NetClass classify(const GenNet& a, const ClassifyConfig& cfg) {
  if (!a.grid()) throw Error("classify on an empty net");
  const TailStats s = tail_stats(a);
  NetClass out;
  if (s.nonfinite) return out;
  if (s.log_eps.empty()) {
    out.estimated_valuation = std::numeric_limits<double>::infinity();
    out.kind = NetKind::Null;
    return out;
  }
  if (s.zeros > 0) {
    // Rapid decay that underflows at the smallest ε is still Null; any
    // other mix of zeros and nonzero samples has no power law.
    bool fast = s.zero_suffix;
    for (std::size_t i = 0; fast && i < s.log_eps.size(); ++i)
      fast = s.log_mag[i] / s.log_eps[i] >= cfg.null_threshold;
    if (fast) {
      out.estimated_valuation = std::numeric_limits<double>::infinity();
      out.kind = NetKind::Null;
    }
    return out;
  }

  const std::size_t n = s.log_eps.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += s.log_eps[i];
    my += s.log_mag[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (s.log_eps[i] - mx) * (s.log_eps[i] - mx);
    sxy += (s.log_eps[i] - mx) * (s.log_mag[i] - my);
  }
  const double slope = sxy / sxx;
  const double icept = my - slope * mx;
  double ss = 0.0, max_local = -std::numeric_limits<double>::infinity();
  double min_local = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s.log_mag[i] - (icept + slope * s.log_eps[i]);
    ss += r * r;
    const double local = s.log_mag[i] / s.log_eps[i];
    max_local = std::max(max_local, local);
    min_local = std::min(min_local, local);
  }
  out.estimated_valuation = slope;
  out.fit_residual = std::sqrt(ss / static_cast<double>(n));

  const bool tight = out.fit_residual <= cfg.residual_max;
  if (tight && slope >= cfg.null_threshold) {
    out.kind = NetKind::Null;
  } else if (tight && max_local <= slope + cfg.invertible_margin) {
    out.kind = NetKind::Invertible;
  } else if (min_local >= -cfg.growth_max) {
    out.kind = NetKind::Moderate;
  }
  return out;
}

double sharp_norm(const GenNet& a, const ClassifyConfig& cfg) {
  const NetClass c = classify(a, cfg);
  if (c.kind == NetKind::Indeterminate) throw NormUndefined("sharp norm of an indeterminate net");
  if (std::isinf(c.estimated_valuation)) return 0.0;
  return std::exp(-c.estimated_valuation);
}

bool has_polynomial_growth(const GenNet& a, const ClassifyConfig& cfg) {
  const TailStats s = tail_stats(a);
  if (s.nonfinite) return false;
  for (std::size_t i = 0; i < s.log_eps.size(); ++i)
    if (s.log_mag[i] / s.log_eps[i] < -cfg.growth_max) return false;
  return true;
}

GenNet gen_distance(const GenNet& x, const GenNet& y) { return (x - y).magnitude(); }

bool in_ball(const GenNet& x, const GenNet& x0, double r) {
  require_same_grid(x, x0);
  if (x.arity() != x0.arity()) throw Error("arity mismatch in ball membership");
  const auto& g = *x.grid();
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.arity(); ++j) d2 += std::norm(x.at(k, j) - x0.at(k, j));
    const double slack = x.floor(k) + x0.floor(k) + 4.0 * kUnit * (x.magnitude(k) + x0.magnitude(k));
    if (std::sqrt(d2) > std::pow(g[k], r) + slack) return false;
  }
  return true;
}

bool equal(const GenNet& a, const GenNet& b, const ClassifyConfig& cfg) {
  return classify(a - b, cfg).kind == NetKind::Null;
}

bool associated(const GenNet& a, const GenNet& b) {
  const GenNet d = a - b;
  const auto& g = *d.grid();
  std::vector<double> m;
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k) {
    const double v = d.magnitude(k);
    if (!std::isfinite(v)) return false;
    m.push_back(v <= d.floor(k) ? 0.0 : v);
  }
  if (std::all_of(m.begin(), m.end(), [](double v) { return v == 0.0; })) return true;
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i] > m[i - 1] * (1.0 + 1e-12)) return false;
  return m.back() < m.front();
}

}  // namespace mcalc
