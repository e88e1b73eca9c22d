#include "mcalc/history.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcalc {

History History::make(const std::vector<std::string>& curve, Growth growth, HistoryFlags flags,
                      Box compact_box, const GridPtr& grid) {
  std::vector<Expr> exprs;
  exprs.reserve(curve.size());
  for (const auto& c : curve) exprs.push_back(parse(c, {"t"}));
  return make(std::move(exprs), growth, flags, std::move(compact_box), grid);
}

History History::make(std::vector<Expr> curve, Growth growth, HistoryFlags flags, Box compact_box,
                      const GridPtr& grid) {
  if (curve.empty()) throw InputError("history needs at least one coordinate");
  if (compact_box.dim() != curve.size()) throw InputError("history compact_box dimension mismatch");
  if (!(growth.c > 0.0) || growth.N < 0) throw InputError("history growth requires c > 0 and N >= 0");
  History h;
  for (auto& e : curve) {
    if (e.index_of("t") != 0) throw InputError("history coordinates must be written in t and eps");
    h.deriv_.push_back(e.differentiate("t"));
    h.curve_.push_back(std::move(e));
  }
  h.growth_ = growth;
  h.flags_ = flags;
  h.box_ = std::move(compact_box);
  h.grid_ = grid;
  h.validate();
  return h;
}

void History::point(double eps, double t, std::span<double> out) const {
  const double env[2] = {t, eps};
  for (std::size_t i = 0; i < curve_.size(); ++i) out[i] = curve_[i].eval(std::span<const double>(env, 2));
}

void History::velocity(double eps, double t, std::span<double> out) const {
  const double env[2] = {t, eps};
  for (std::size_t i = 0; i < deriv_.size(); ++i) out[i] = deriv_[i].eval(std::span<const double>(env, 2));
}

std::complex<double> History::point_c(double eps, double t) const {
  if (dim() != 2) throw HypothesisError("complex view requires a planar history");
  double p[2];
  point(eps, t, p);
  return {p[0], p[1]};
}

std::complex<double> History::velocity_c(double eps, double t) const {
  if (dim() != 2) throw HypothesisError("complex view requires a planar history");
  double v[2];
  velocity(eps, t, v);
  return {v[0], v[1]};
}

double History::signed_area(double eps, std::size_t nodes) const {
  if (dim() != 2) throw HypothesisError("signed area requires a planar history");
  double area = 0.0;
  double prev[2], cur[2];
  point(eps, 0.0, prev);
  for (std::size_t j = 1; j <= nodes; ++j) {
    point(eps, static_cast<double>(j) / static_cast<double>(nodes), cur);
    area += prev[0] * cur[1] - cur[0] * prev[1];
    prev[0] = cur[0];
    prev[1] = cur[1];
  }
  return 0.5 * area;
}

void History::validate() const {
  const auto& g = *grid_;
  const std::size_t n = dim();
  std::vector<double> p(n), v(n), p0(n), p1(n);
  std::vector<std::size_t> outside, too_fast, open, wrong_way;
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k) {
    const double eps = g[k];
    double worst = 0.0;
    for (int j = 0; j < 64; ++j) {
      velocity(eps, j / 63.0, v);
      double s = 0.0;
      for (double c : v) s += c * c;
      worst = std::max(worst, std::sqrt(s) * std::pow(eps, growth_.N));
    }
    if (!(worst <= growth_.c)) too_fast.push_back(k);
    for (int j = 0; j <= 256; ++j) {
      point(eps, j / 256.0, p);
      if (!box_.contains(p)) {
        outside.push_back(k);
        break;
      }
    }
    if (flags_.closed) {
      point(eps, 0.0, p0);
      point(eps, 1.0, p1);
      double gap = 0.0;
      for (std::size_t i = 0; i < n; ++i) gap += (p0[i] - p1[i]) * (p0[i] - p1[i]);
      if (!(std::sqrt(gap) < 1e-12)) open.push_back(k);
    }
    if (flags_.positively_oriented && n == 2 && !(signed_area(eps) > 0.0)) wrong_way.push_back(k);
  }
  if (!too_fast.empty())
    throw HypothesisError("history violates the declared growth bound |γ'| <= c eps^-N on " +
                          std::to_string(too_fast.size()) + " tail samples");
  if (!outside.empty()) throw CompactnessError("history leaves its compact_box", outside);
  if (!open.empty()) throw HypothesisError("history declared closed but γ(0) != γ(1) on the tail");
  if (!wrong_way.empty()) throw HypothesisError("history declared positively oriented but its signed area is not positive");
}

namespace {

double dist2(const History& gamma, double eps, double t, std::span<const double> p, std::span<double> buf) {
  gamma.point(eps, t, buf);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (buf[i] - p[i]) * (buf[i] - p[i]);
  return s;
}

}  // namespace

double distance_to_curve(const History& gamma, double eps, std::span<const double> p) {
  constexpr std::size_t kNodes = 1024;
  const std::size_t n = gamma.dim();
  std::vector<double> buf(n), vel(n);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_j = 0;
  for (std::size_t j = 0; j <= kNodes; ++j) {
    const double d = dist2(gamma, eps, static_cast<double>(j) / kNodes, p, buf);
    if (d < best) {
      best = d;
      best_j = j;
    }
  }
  // The squared distance is stationary where <γ(t) - p, γ'(t)> = 0; bisect
  // each neighbouring panel where that derivative changes sign.
  auto slope = [&](double t) {
    gamma.point(eps, t, buf);
    gamma.velocity(eps, t, vel);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (buf[i] - p[i]) * vel[i];
    return s;
  };
  const std::size_t lo_j = best_j == 0 ? 0 : best_j - 1;
  const std::size_t hi_j = std::min(best_j + 1, kNodes);
  for (std::size_t j = lo_j; j < hi_j; ++j) {
    double a = static_cast<double>(j) / kNodes, b = static_cast<double>(j + 1) / kNodes;
    double sa = slope(a), sb = slope(b);
    if (!(sa < 0.0 && sb > 0.0)) continue;
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double sm = slope(m);
      if (sm < 0.0) a = m;
      else if (sm > 0.0) b = m;
      else {
        a = b = m;
        break;
      }
    }
    best = std::min({best, dist2(gamma, eps, a, p, buf), dist2(gamma, eps, b, p, buf)});
  }
  return std::sqrt(best);
}

double curve_diameter(const History& gamma, double eps, std::size_t samples) {
  const std::size_t n = gamma.dim();
  const std::size_t m = samples + 1;
  std::vector<double> pts(m * n);
  for (std::size_t j = 0; j < m; ++j)
    gamma.point(eps, static_cast<double>(j) / static_cast<double>(samples), std::span<double>(pts.data() + j * n, n));
  double best = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = pts[a * n + i] - pts[b * n + i];
        s += d * d;
      }
      best = std::max(best, s);
    }
  return std::sqrt(best);
}

}  // namespace mcalc
