#include "mcalc/membrane.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "mcalc/gauss.hpp"
#include "mcalc/parallel.hpp"

namespace mcalc {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;
constexpr std::size_t kMaxIndicatorDim = 3;

std::vector<std::string> coordinate_names(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

void require_same_grid(const GenNet& a, const GridPtr& g, const char* what) {
  if (a.grid() != g) throw InputError(std::string(what) + " lives on a different epsilon grid");
}

void require_real_scalar(const GenNet& a, const char* what) {
  if (a.is_complex() || a.arity() != 1) throw InputError(std::string(what) + " must be a real scalar net");
}

double ball_unit_volume(std::size_t n) {
  const double h = static_cast<double>(n) / 2.0;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Tail containment of [lo_k, hi_k] in a compact interval, with a rounding slack.
void check_interval_tail(const IntervalRegion& iv, double lo, double hi, const GridPtr& g, const char* what) {
  std::vector<std::size_t> reversed, outside;
  for (std::size_t k = g->tail_begin(); k < g->size(); ++k) {
    const double a = iv.a.real(k), b = iv.b.real(k);
    if (!(a <= b)) reversed.push_back(k);
    const double slack = 4.0 * kUnit * std::max({std::fabs(lo), std::fabs(hi), 1.0});
    if (!(a >= lo - slack && b <= hi + slack)) outside.push_back(k);
  }
  if (!reversed.empty()) throw CompactnessError(std::string(what) + ": a > b on the tail", reversed);
  if (!outside.empty()) throw CompactnessError(std::string(what) + " leaves its compact box", outside);
}

Box shape_extent(const std::variant<PredicateRegion, IntervalRegion, BoxRegion, BallRegion>& base, std::size_t dim,
                 std::size_t k) {
  return std::visit(
      overloaded{
          [](const PredicateRegion& p) { return p.bounding_box; },
          [k](const IntervalRegion& iv) { return Box({{iv.a.real(k), iv.b.real(k)}}); },
          [k](const BoxRegion& b) {
            Box out;
            for (const auto& ax : b.axes) out.axes.push_back({ax.a.real(k), ax.b.real(k)});
            return out;
          },
          [k, dim](const BallRegion& b) {
            Box out;
            const double r = b.radius.real(k);
            for (std::size_t i = 0; i < dim; ++i) {
              const double c = b.center.real(k, i);
              out.axes.push_back({c - r, c + r});
            }
            return out;
          }},
      base);
}

}  // namespace

// ---------------------------------------------------------------------------
// PreMembrane

PreMembrane PreMembrane::interval(GenNet a, GenNet b, Box compact_box) {
  GridPtr g = a.grid();
  return from_region(IntervalRegion{std::move(a), std::move(b)}, std::move(compact_box), std::move(g));
}

PreMembrane PreMembrane::box(std::vector<IntervalRegion> axes, Box compact_box) {
  if (axes.empty()) throw InputError("box membrane needs at least one axis");
  GridPtr g = axes[0].a.grid();
  return from_region(BoxRegion{std::move(axes)}, std::move(compact_box), std::move(g));
}

PreMembrane PreMembrane::ball(GenNet center, GenNet radius, Box compact_box) {
  GridPtr g = radius.grid();
  const std::size_t n = compact_box.dim();
  return from_region(BallRegion{std::move(center), std::move(radius), n}, std::move(compact_box), std::move(g));
}

PreMembrane PreMembrane::indicator(std::string_view predicate, Box bounding_box, Box compact_box,
                                   const GridPtr& grid) {
  Expr level = parse(predicate, coordinate_names(bounding_box.dim()));
  return indicator(std::move(level), std::move(bounding_box), std::move(compact_box), grid);
}

PreMembrane PreMembrane::indicator(Expr predicate, Box bounding_box, Box compact_box, const GridPtr& grid) {
  const std::size_t n = bounding_box.dim();
  if (predicate.variables() != [&] {
        auto v = coordinate_names(n);
        v.push_back("eps");
        return v;
      }())
    throw InputError("indicator predicate must be written in x1..xn and eps");
  if (predicate.uses_complex()) throw InputError("indicator predicate must be real");
  PredicateRegion p{predicate, {}, std::move(bounding_box)};
  for (std::size_t i = 0; i < n; ++i) p.gradient.push_back(predicate.differentiate("x" + std::to_string(i + 1)));
  return from_region(IndicatorRegion{std::move(p), {}}, std::move(compact_box), grid);
}

PreMembrane PreMembrane::from_region(Region region, Box compact_box, GridPtr grid) {
  if (!grid) throw InputError("membrane needs an epsilon grid");
  if (compact_box.dim() == 0) throw InputError("membrane compact box must have at least one axis");
  for (const auto& ax : compact_box.axes)
    if (!(ax[0] <= ax[1])) throw InputError("membrane compact box has an empty axis");
  PreMembrane m(std::move(region), std::move(compact_box), std::move(grid));
  m.validate();
  return m;
}

std::string PreMembrane::variant_name() const {
  static const char* names[] = {"interval", "box", "ball", "indicator", "trace"};
  return names[region_.index()];
}

void PreMembrane::validate() const {
  const std::size_t n = dim();
  const GridPtr& g = grid_;
  std::visit(
      overloaded{
          [&](const IntervalRegion& iv) {
            if (n != 1) throw InputError("interval membrane needs a 1-D compact box");
            require_real_scalar(iv.a, "interval endpoint");
            require_real_scalar(iv.b, "interval endpoint");
            require_same_grid(iv.a, g, "interval endpoint");
            require_same_grid(iv.b, g, "interval endpoint");
            check_interval_tail(iv, box_.lo(0), box_.hi(0), g, "interval membrane");
          },
          [&](const BoxRegion& b) {
            if (b.axes.size() != n) throw InputError("box membrane axis count differs from its compact box");
            for (std::size_t i = 0; i < n; ++i) {
              require_real_scalar(b.axes[i].a, "box endpoint");
              require_real_scalar(b.axes[i].b, "box endpoint");
              require_same_grid(b.axes[i].a, g, "box endpoint");
              require_same_grid(b.axes[i].b, g, "box endpoint");
              check_interval_tail(b.axes[i], box_.lo(i), box_.hi(i), g, "box membrane");
            }
          },
          [&](const BallRegion& b) {
            if (b.n != n) throw InputError("ball dimension differs from its compact box");
            if (b.center.arity() != n || b.center.is_complex())
              throw InputError("ball center must be a real vector net of the ball's dimension");
            require_real_scalar(b.radius, "ball radius");
            require_same_grid(b.center, g, "ball center");
            require_same_grid(b.radius, g, "ball radius");
            std::vector<std::size_t> bad_r, outside;
            for (std::size_t k = g->tail_begin(); k < g->size(); ++k) {
              if (!(b.radius.real(k) > 0.0)) bad_r.push_back(k);
              const Box e = shape_extent(b, n, k);
              if (!box_.enlarged(4.0 * kUnit * (1.0 + std::fabs(box_.lo(0)) + std::fabs(box_.hi(0))))
                       .contains(e))
                outside.push_back(k);
            }
            if (!bad_r.empty()) throw CompactnessError("ball radius is not positive on the tail", bad_r);
            if (!outside.empty()) throw CompactnessError("ball membrane leaves its compact box", outside);
          },
          [&](const IndicatorRegion& r) {
            if (n > kMaxIndicatorDim) throw InputError("indicator membranes are limited to dimension 3");
            if (const auto* p = std::get_if<PredicateRegion>(&r.base)) {
              if (p->bounding_box.dim() != n) throw InputError("indicator bounding box dimension mismatch");
              if (!box_.contains(p->bounding_box))
                throw InputError("indicator bounding box is not inside the compact box");
            }
            for (const auto& ps : r.pushes)
              if (ps->dim() != n) throw InputError("perturbation dimension differs from the membrane");
            std::vector<std::size_t> outside;
            for (std::size_t k = g->tail_begin(); k < g->size(); ++k)
              if (!box_.enlarged(1e-12).contains(indicator_extent(r, n, k))) outside.push_back(k);
            if (!outside.empty()) throw CompactnessError("indicator region leaves its compact box", outside);
          },
          [&](const TraceRegion& t) {
            if (!t.curve || t.curve->dim() != n) throw InputError("trace dimension differs from its compact box");
            if (!box_.contains(t.curve->compact_box()))
              throw InputError("history compact box is not inside the membrane's compact box");
          }},
      region_);
}

// ---------------------------------------------------------------------------
// NullPerturbation

NullPerturbation NullPerturbation::make(const std::vector<std::string>& psi, Box box, const GridPtr& grid) {
  std::vector<Expr> exprs;
  for (const auto& s : psi) exprs.push_back(parse(s, coordinate_names(box.dim())));
  return make(std::move(exprs), std::move(box), grid);
}

NullPerturbation NullPerturbation::make(std::vector<Expr> psi, Box box, const GridPtr& grid) {
  const std::size_t n = box.dim();
  if (n == 0 || psi.size() != n) throw InputError("perturbation needs one component per coordinate");
  auto names = coordinate_names(n);
  names.push_back("eps");
  NullPerturbation p;
  for (auto& e : psi) {
    if (e.variables() != names) throw InputError("perturbation components must be written in x1..xn and eps");
    if (e.uses_complex()) throw InputError("perturbation components must be real");
  }
  p.affine_ = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Expr d = psi[i].differentiate(names[j]);
      for (std::size_t l = 0; l < n && p.affine_; ++l)
        if (!d.differentiate(names[l]).is_zero()) p.affine_ = false;
      p.jac_.push_back(std::move(d));
    }
  p.psi_ = std::move(psi);
  p.box_ = std::move(box);
  p.grid_ = grid;

  std::vector<double> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(0.5 * (p.box_.lo(i) + p.box_.hi(i)));
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  for (int s = 0; s < 64; ++s)
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back(std::uniform_real_distribution<double>(p.box_.lo(i), p.box_.hi(i))(rng));
  const std::size_t npts = pts.size() / n;
  p.sup_ = GenNet(grid, 1, false);
  std::vector<double> env(n + 1);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    double worst = 0.0;
    for (std::size_t q = 0; q < npts; ++q) {
      std::copy_n(pts.begin() + static_cast<std::ptrdiff_t>(q * n), n, env.begin());
      env[n] = (*grid)[k];
      double s = 0.0;
      for (const auto& e : p.psi_) {
        const double v = e.eval(env);
        s += v * v;
      }
      worst = std::max(worst, std::sqrt(s));
    }
    p.sup_.set(k, worst);
  }
  p.certificate_ = classify(p.sup_);
  if (p.certificate_.kind != NetKind::Null)
    throw HypothesisError(std::string("perturbation is not a null function: sup |psi| classifies ") +
                          to_string(p.certificate_.kind));
  return p;
}

bool NullPerturbation::is_zero() const {
  return std::all_of(psi_.begin(), psi_.end(), [](const Expr& e) { return e.is_zero(); });
}

void NullPerturbation::push(double eps, std::span<const double> x, std::span<double> y) const {
  const std::size_t n = dim();
  std::array<double, 16> env{};
  std::copy_n(x.begin(), n, env.begin());
  env[n] = eps;
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + psi_[i].eval(std::span<const double>(env.data(), n + 1));
}

bool NullPerturbation::pull(double eps, std::span<const double> x, std::span<double> y) const {
  const std::size_t n = dim();
  std::array<double, 16> env{};
  std::copy_n(x.begin(), n, env.begin());
  env[n] = eps;
  for (int it = 0; it < 100; ++it) {
    double step = 0.0, scale = 1.0;
    std::array<double, 16> next{};
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = x[i] - psi_[i].eval(std::span<const double>(env.data(), n + 1));
      step = std::max(step, std::fabs(next[i] - env[i]));
      scale = std::max(scale, std::fabs(next[i]));
    }
    std::copy_n(next.begin(), n, env.begin());
    if (!std::isfinite(step)) break;
    if (step <= 4.0 * kUnit * scale) {
      std::copy_n(env.begin(), n, y.begin());
      return true;
    }
  }
  std::copy_n(env.begin(), n, y.begin());
  return false;
}

void NullPerturbation::affine_parts(double eps, std::span<double> A, std::span<double> c) const {
  const std::size_t n = dim();
  std::vector<double> env(n + 1);
  for (std::size_t i = 0; i < n; ++i) env[i] = 0.5 * (box_.lo(i) + box_.hi(i));
  env[n] = eps;
  for (std::size_t i = 0; i < n * n; ++i) A[i] = jac_[i].eval(env);
  for (std::size_t i = 0; i < n; ++i) {
    double s = psi_[i].eval(env);
    for (std::size_t j = 0; j < n; ++j) s -= A[i * n + j] * env[j];
    c[i] = s;
  }
}

bool NullPerturbation::jacobian_is_diagonal() const {
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !jac_[i * n + j].is_zero()) return false;
  return true;
}

bool NullPerturbation::jacobian_is_scalar() const {
  if (!jacobian_is_diagonal()) return false;
  const std::size_t n = dim();
  const std::string first = jac_[0].str();
  for (std::size_t i = 1; i < n; ++i)
    if (jac_[i * n + i].str() != first) return false;
  return true;
}

std::vector<std::string> ball_map_psi(const std::vector<std::string>& x, const std::string& r,
                                      const std::vector<std::string>& x2, const std::string& r2) {
  if (x.size() != x2.size() || x.empty()) throw InputError("ball map centers must have equal, nonzero dimension");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < x.size(); ++i)
    out.push_back("((" + r2 + ")-(" + r + "))/(" + r + ")*(x" + std::to_string(i + 1) + "-(" + x[i] + ")) + ((" +
                  x2[i] + ")-(" + x[i] + "))");
  return out;
}

// ---------------------------------------------------------------------------
// perturb

namespace {

// Largest tail displacement bound, used to enlarge compact boxes.
double tail_pad(const NullPerturbation& psi) {
  const auto& g = *psi.grid();
  double m = 0.0;
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k) m = std::max(m, psi.sup().real(k));
  return 2.0 * m + 1e-12;
}

// Image of [a_k, b_k] under x ↦ s_k x + c_k for all samples.
IntervalRegion map_interval(const IntervalRegion& iv, const std::vector<double>& s, const std::vector<double>& c) {
  const GridPtr& g = iv.a.grid();
  IntervalRegion out{GenNet(g, 1, false), GenNet(g, 1, false)};
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double a = iv.a.real(k), b = iv.b.real(k);
    double p = s[k] * a + c[k], q = s[k] * b + c[k];
    double fp = std::fabs(s[k]) * iv.a.floor(k) + 4.0 * kUnit * (std::fabs(s[k] * a) + std::fabs(c[k]));
    double fq = std::fabs(s[k]) * iv.b.floor(k) + 4.0 * kUnit * (std::fabs(s[k] * b) + std::fabs(c[k]));
    if (p > q) {
      std::swap(p, q);
      std::swap(fp, fq);
    }
    out.a.set(k, p);
    out.a.set_floor(k, fp);
    out.b.set(k, q);
    out.b.set_floor(k, fq);
  }
  return out;
}

}  // namespace

PreMembrane perturb(const PreMembrane& M, const std::shared_ptr<const NullPerturbation>& psi) {
  if (!psi) throw InputError("missing perturbation");
  const std::size_t n = M.dim();
  if (psi->dim() != n) throw InputError("perturbation dimension differs from the membrane");
  if (psi->grid() != M.grid()) throw InputError("perturbation lives on a different epsilon grid");
  if (psi->is_zero()) return M;

  const GridPtr& g = M.grid();
  const Box box = M.compact_box().enlarged(tail_pad(*psi));

  if (const auto* t = std::get_if<TraceRegion>(&M.region())) {
    auto names = coordinate_names(n);
    std::vector<Expr> curve;
    for (std::size_t i = 0; i < n; ++i) {
      const Expr outer = parse(names[i] + " + (" + psi->psi()[i].str() + ")", names);
      curve.push_back(compose(outer, t->curve->curve()));
    }
    Growth growth = t->curve->growth();
    growth.c *= 2.0;
    Box cbox = t->curve->compact_box().enlarged(tail_pad(*psi));
    auto h = std::make_shared<const History>(History::make(std::move(curve), growth, t->curve->flags(), cbox, g));
    return PreMembrane::from_region(TraceRegion{std::move(h)}, box, g);
  }

  if (psi->is_affine() && !std::holds_alternative<IndicatorRegion>(M.region())) {
    const std::size_t K = g->size();
    std::vector<std::vector<double>> A(K, std::vector<double>(n * n)), c(K, std::vector<double>(n));
    for (std::size_t k = 0; k < K; ++k) psi->affine_parts((*g)[k], A[k], c[k]);
    auto axis = [&](std::size_t i) {
      std::vector<double> s(K), ci(K);
      for (std::size_t k = 0; k < K; ++k) {
        s[k] = 1.0 + A[k][i * n + i];
        ci[k] = c[k][i];
      }
      return std::make_pair(s, ci);
    };
    if (const auto* iv = std::get_if<IntervalRegion>(&M.region())) {
      auto [s, ci] = axis(0);
      return PreMembrane::from_region(map_interval(*iv, s, ci), box, g);
    }
    if (const auto* b = std::get_if<BoxRegion>(&M.region()); b && psi->jacobian_is_diagonal()) {
      BoxRegion out;
      for (std::size_t i = 0; i < n; ++i) {
        auto [s, ci] = axis(i);
        out.axes.push_back(map_interval(b->axes[i], s, ci));
      }
      return PreMembrane::from_region(std::move(out), box, g);
    }
    if (const auto* b = std::get_if<BallRegion>(&M.region()); b && psi->jacobian_is_scalar()) {
      GenNet center(g, n, false), radius(g, 1, false);
      for (std::size_t k = 0; k < K; ++k) {
        const double s = 1.0 + A[k][0];
        double cf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = b->center.real(k, i);
          center.set(k, i, s * x + c[k][i]);
          cf += 4.0 * kUnit * (std::fabs(s * x) + std::fabs(c[k][i]));
        }
        center.set_floor(k, std::fabs(s) * b->center.floor(k) + cf);
        radius.set(k, std::fabs(s) * b->radius.real(k));
        radius.set_floor(k, std::fabs(s) * b->radius.floor(k) + 2.0 * kUnit * std::fabs(s * b->radius.real(k)));
      }
      return PreMembrane::from_region(BallRegion{std::move(center), std::move(radius), n}, box, g);
    }
  }

  IndicatorRegion out;
  std::visit(overloaded{[&](const IntervalRegion& r) { out.base = r; }, [&](const BoxRegion& r) { out.base = r; },
                        [&](const BallRegion& r) { out.base = r; }, [&](const IndicatorRegion& r) { out = r; },
                        [](const TraceRegion&) {}},
             M.region());
  if (n > kMaxIndicatorDim) throw InputError("indicator membranes are limited to dimension 3");
  out.pushes.push_back(psi);
  return PreMembrane::from_region(std::move(out), box, g);
}

// ---------------------------------------------------------------------------
// Indicator engine

Box indicator_extent(const IndicatorRegion& R, std::size_t dim, std::size_t k) {
  Box e = shape_extent(R.base, dim, k);
  double pad = 0.0;
  for (const auto& p : R.pushes) pad += 2.0 * p->sup().real(k);
  if (!R.pushes.empty()) pad += 1e-12;
  return e.enlarged(pad);
}

Box membrane_extent(const PreMembrane& M, std::size_t k) {
  const std::size_t n = M.dim();
  return std::visit(overloaded{[&](const IndicatorRegion& r) { return indicator_extent(r, n, k); },
                               [&](const TraceRegion& t) { return t.curve->compact_box(); },
                               [&](const IntervalRegion& r) { return shape_extent(r, n, k); },
                               [&](const BoxRegion& r) { return shape_extent(r, n, k); },
                               [&](const BallRegion& r) { return shape_extent(r, n, k); }},
                    M.region());
}

namespace {

class CellEngine {
 public:
  CellEngine(const IndicatorRegion& R, std::size_t n, const GridPtr& grid, std::size_t k,
             const std::function<double(std::span<const double>)>& f, const QuadConfig& cfg)
      : R_(R), n_(n), k_(k), eps_((*grid)[k]), tail_(grid->is_tail(k)), f_(f),
        rule_(gauss_legendre(cfg.indicator_gauss)) {
    shape_ = !std::holds_alternative<PredicateRegion>(R.base);
    static constexpr std::size_t kDefaultDepth[] = {0, 40, 9, 5};
    max_depth_ = cfg.indicator_refine_max > 0 ? cfg.indicator_refine_max : kDefaultDepth[n];
  }

  RegionSum run(const Box& extent) {
    constexpr std::size_t kInitial = 8;
    std::array<double, 3> half{}, center{}, p{};
    for (std::size_t i = 0; i < n_; ++i) {
      half[i] = (extent.hi(i) - extent.lo(i)) / (2.0 * kInitial);
      if (!(half[i] > 0.0)) return {};
    }
    // Corner samples of the initial lattice, shared between neighbouring cells.
    constexpr std::size_t kSide = kInitial + 1;
    std::size_t points = 1, cells = 1;
    for (std::size_t i = 0; i < n_; ++i) {
      points *= kSide;
      cells *= kInitial;
    }
    std::vector<Sample> lattice(points);
    for (std::size_t j = 0; j < points; ++j) {
      std::size_t rem = j;
      for (std::size_t i = 0; i < n_; ++i) {
        p[i] = extent.lo(i) + 2.0 * static_cast<double>(rem % kSide) * half[i];
        rem /= kSide;
      }
      lattice[j] = sample(p);
    }
    std::array<Sample, 8> corners{};
    for (std::size_t c = 0; c < cells; ++c) {
      std::array<std::size_t, 3> idx{};
      std::size_t rem = c;
      for (std::size_t i = 0; i < n_; ++i) {
        idx[i] = rem % kInitial;
        rem /= kInitial;
        center[i] = extent.lo(i) + (2.0 * static_cast<double>(idx[i]) + 1.0) * half[i];
      }
      for (std::size_t m = 0; m < (std::size_t{1} << n_); ++m) {
        std::size_t at = 0, stride = 1;
        for (std::size_t i = 0; i < n_; ++i) {
          at += (idx[i] + ((m >> i) & 1U)) * stride;
          stride *= kSide;
        }
        corners[m] = lattice[at];
      }
      cell(center, half, 0, corners);
    }
    return {value_, uncertainty_};
  }

  double mass() const { return mass_; }

 private:
  // Level of the base region at the pulled-back point, and for predicates
  // the gradient norm there.
  struct Sample {
    double level = 0.0;
    double grad = 0.0;
  };

  Sample sample(const std::array<double, 3>& x) const {
    std::array<double, 3> y{};
    pull_back(std::span<const double>(x.data(), n_), std::span<double>(y.data(), n_));
    Sample s;
    s.level = base_level(std::span<const double>(y.data(), n_));
    s.grad = shape_ ? 1.01 : gradient_norm(std::span<const double>(y.data(), n_));
    return s;
  }

  // Pulls x back through the pushes, last one first.
  void pull_back(std::span<const double> x, std::span<double> y) const {
    std::array<double, 3> cur{};
    std::copy_n(x.begin(), n_, cur.begin());
    for (auto it = R_.pushes.rbegin(); it != R_.pushes.rend(); ++it) {
      std::array<double, 3> next{};
      if (!(*it)->pull(eps_, std::span<const double>(cur.data(), n_), std::span<double>(next.data(), n_)) && tail_)
        throw PerturbationTooLarge("fixed-point inversion of x + psi(x) does not converge at eps = " +
                                   std::to_string(eps_));
      cur = next;
    }
    std::copy_n(cur.begin(), n_, y.begin());
  }

  double base_level(std::span<const double> y) const {
    return std::visit(
        overloaded{[&](const PredicateRegion& p) {
                     std::array<double, 4> env{};
                     std::copy_n(y.begin(), n_, env.begin());
                     env[n_] = eps_;
                     return p.level.eval(std::span<const double>(env.data(), n_ + 1));
                   },
                   [&](const IntervalRegion& iv) {
                     const double a = iv.a.real(k_), b = iv.b.real(k_);
                     return std::fabs(y[0] - 0.5 * (a + b)) - 0.5 * (b - a);
                   },
                   [&](const BoxRegion& bx) {
                     double m = -std::numeric_limits<double>::infinity();
                     for (std::size_t i = 0; i < n_; ++i) {
                       const double a = bx.axes[i].a.real(k_), b = bx.axes[i].b.real(k_);
                       m = std::max(m, std::fabs(y[i] - 0.5 * (a + b)) - 0.5 * (b - a));
                     }
                     return m;
                   },
                   [&](const BallRegion& bl) {
                     double s = 0.0;
                     for (std::size_t i = 0; i < n_; ++i) {
                       const double d = y[i] - bl.center.real(k_, i);
                       s += d * d;
                     }
                     return std::sqrt(s) - bl.radius.real(k_);
                   }},
        R_.base);
  }

  double gradient_norm(std::span<const double> y) const {
    const auto& p = std::get<PredicateRegion>(R_.base);
    std::array<double, 4> env{};
    std::copy_n(y.begin(), n_, env.begin());
    env[n_] = eps_;
    double s = 0.0;
    for (const auto& gi : p.gradient) {
      const double v = gi.eval(std::span<const double>(env.data(), n_ + 1));
      s += v * v;
    }
    return std::sqrt(s);
  }

  // `corners[m]` is the sample at c + (±h_i), bit i of m selecting +.
  void cell(const std::array<double, 3>& c, const std::array<double, 3>& h, std::size_t depth,
            const std::array<Sample, 8>& corners) {
    const std::size_t nc = std::size_t{1} << n_;
    const Sample mid = sample(c);
    const bool inside = mid.level <= 0.0;
    bool mixed = false;
    double lip = mid.grad;
    for (std::size_t m = 0; m < nc; ++m) {
      if ((corners[m].level <= 0.0) != inside) mixed = true;
      lip = std::max(lip, corners[m].grad);
    }
    if (!shape_) lip *= 2.0;
    double halfdiag = 0.0, vol = 1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      halfdiag += h[i] * h[i];
      vol *= 2.0 * h[i];
    }
    halfdiag = std::sqrt(halfdiag);

    if (!mixed && std::fabs(mid.level) > lip * halfdiag) {
      if (inside) gauss_cell(c, h, vol);
      return;
    }
    if (depth >= max_depth_) {
      const double fc = f_(std::span<const double>(c.data(), n_));
      if (inside) value_ += fc * vol;
      uncertainty_ += std::fabs(fc) * vol;
      mass_ += std::fabs(fc) * vol;
      return;
    }
    // 3^n sub-lattice: digit 0, 1, 2 per axis for -h, 0, +h.
    std::size_t pts = 1;
    for (std::size_t i = 0; i < n_; ++i) pts *= 3;
    std::array<Sample, 27> sub{};
    std::array<double, 3> p{};
    for (std::size_t j = 0; j < pts; ++j) {
      std::size_t rem = j, corner = 0;
      bool is_corner = true, is_center = true;
      for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t d = rem % 3;
        rem /= 3;
        p[i] = c[i] + (static_cast<double>(d) - 1.0) * h[i];
        if (d == 1) is_corner = false;
        else is_center = false;
        if (d == 2) corner |= std::size_t{1} << i;
      }
      sub[j] = is_corner ? corners[corner] : is_center ? mid : sample(p);
    }
    std::array<double, 3> hc{}, cc{};
    std::array<Sample, 8> child{};
    for (std::size_t i = 0; i < n_; ++i) hc[i] = 0.5 * h[i];
    for (std::size_t m = 0; m < nc; ++m) {
      for (std::size_t i = 0; i < n_; ++i) cc[i] = c[i] + (((m >> i) & 1U) ? hc[i] : -hc[i]);
      for (std::size_t q = 0; q < nc; ++q) {
        std::size_t at = 0, stride = 1;
        for (std::size_t i = 0; i < n_; ++i) {
          at += (((m >> i) & 1U) + ((q >> i) & 1U)) * stride;
          stride *= 3;
        }
        child[q] = sub[at];
      }
      cell(cc, hc, depth + 1, child);
    }
  }

  void gauss_cell(const std::array<double, 3>& c, const std::array<double, 3>& h, double vol) {
    const std::size_t q = rule_.nodes.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n_; ++i) total *= q;
    std::array<double, 3> x{};
    double s = 0.0, a = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
      std::size_t rem = j;
      double w = 1.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t idx = rem % q;
        rem /= q;
        x[i] = c[i] + h[i] * rule_.nodes[idx];
        w *= 0.5 * rule_.weights[idx];
      }
      const double v = f_(std::span<const double>(x.data(), n_));
      s += w * v;
      a += w * std::fabs(v);
    }
    value_ += vol * s;
    mass_ += vol * a;
  }

  const IndicatorRegion& R_;
  std::size_t n_;
  std::size_t k_;
  double eps_;
  bool tail_;
  const std::function<double(std::span<const double>)>& f_;
  const GaussRule& rule_;
  bool shape_ = false;
  std::size_t max_depth_ = 0;
  double value_ = 0.0, uncertainty_ = 0.0, mass_ = 0.0;
};

}  // namespace

RegionSum integrate_indicator(const IndicatorRegion& R, std::size_t dim, const GridPtr& grid, std::size_t k,
                              const std::function<double(std::span<const double>)>& f, const QuadConfig& cfg) {
  if (dim == 0 || dim > kMaxIndicatorDim) throw InputError("indicator membranes are limited to dimension 1..3");
  CellEngine engine(R, dim, grid, k, f, cfg);
  RegionSum out = engine.run(indicator_extent(R, dim, k));
  if (grid->is_tail(k) && out.uncertainty > cfg.indicator_tol * engine.mass() + cfg.abs_tol)
    throw IntegrabilityError("indicator refinement did not resolve the boundary at eps = " +
                             std::to_string((*grid)[k]) + " (uncertainty " + std::to_string(out.uncertainty) + ")");
  return out;
}

// ---------------------------------------------------------------------------
// volume

GenNet volume(const PreMembrane& M, const QuadConfig& cfg) {
  cfg.validate();
  const GridPtr& g = M.grid();
  const std::size_t n = M.dim();
  const std::size_t K = g->size();
  GenNet out(g, 1, false);
  std::visit(
      overloaded{
          [&](const IntervalRegion& iv) { out = iv.b - iv.a; },
          [&](const BoxRegion& b) {
            for (std::size_t k = 0; k < K; ++k) {
              double v = 1.0;
              std::vector<double> w(n), fw(n);
              for (std::size_t i = 0; i < n; ++i) {
                const double a = b.axes[i].a.real(k), bb = b.axes[i].b.real(k);
                w[i] = bb - a;
                fw[i] = b.axes[i].a.floor(k) + b.axes[i].b.floor(k) + 2.0 * kUnit * (std::fabs(a) + std::fabs(bb));
                v *= w[i];
              }
              double fl = 4.0 * static_cast<double>(n) * kUnit * std::fabs(v);
              for (std::size_t i = 0; i < n; ++i) {
                double others = 1.0;
                for (std::size_t j = 0; j < n; ++j)
                  if (j != i) others *= std::fabs(w[j]);
                fl += fw[i] * others;
              }
              out.set(k, v);
              out.set_floor(k, fl);
            }
          },
          [&](const BallRegion& b) {
            const double omega = ball_unit_volume(n);
            const double nd = static_cast<double>(n);
            for (std::size_t k = 0; k < K; ++k) {
              const double r = b.radius.real(k);
              const double v = omega * std::pow(r, nd);
              out.set(k, v);
              out.set_floor(k, nd * omega * std::pow(r, nd - 1.0) * b.radius.floor(k) + 8.0 * kUnit * v);
            }
          },
          [&](const IndicatorRegion& r) {
            const std::function<double(std::span<const double>)> one = [](std::span<const double>) { return 1.0; };
            parallel_for(K, cfg.workers, [&](std::size_t k) {
              const RegionSum s = integrate_indicator(r, n, g, k, one, cfg);
              out.set(k, s.value);
              out.set_floor(k, s.uncertainty + 16.0 * kUnit * std::fabs(s.value));
            });
          },
          [&](const TraceRegion& t) {
            if (n != 1) return;  // a curve in R^n, n >= 2, has Lebesgue measure zero
            constexpr int kSamples = 4096;
            double p = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
              double lo = std::numeric_limits<double>::infinity(), hi = -lo;
              for (int j = 0; j <= kSamples; ++j) {
                t.curve->point((*g)[k], static_cast<double>(j) / kSamples, std::span<double>(&p, 1));
                lo = std::min(lo, p);
                hi = std::max(hi, p);
              }
              out.set(k, hi - lo);
              out.set_floor(k, 2.0 * kUnit * (std::fabs(lo) + std::fabs(hi)));
            }
          }},
      M.region());
  return out;
}

PreMembrane history_image(const History& gamma) {
  return PreMembrane::from_region(TraceRegion{std::make_shared<const History>(gamma)}, gamma.compact_box(),
                                  gamma.grid());
}

GenNet trace_diameter(const PreMembrane& M) {
  const auto* t = std::get_if<TraceRegion>(&M.region());
  if (!t) throw InputError("diameter is defined here for trace membranes only");
  const GridPtr& g = M.grid();
  GenNet out(g, 1, false);
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double d = curve_diameter(*t->curve, (*g)[k]);
    out.set(k, d);
    out.set_floor(k, 16.0 * kUnit * d);
  }
  return out;
}

}  // namespace mcalc
