#include "mcalc/quad.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "mcalc/gauss.hpp"
#include "mcalc/parallel.hpp"

namespace mcalc {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Rounding bound of an n-term weighted sum with absolute mass `mass`.
double sum_floor(std::size_t n, double mass) { return (static_cast<double>(n) + 16.0) * kUnit * mass; }

void require_curve_inside(const History& gamma, const Box& domain, const std::string& what) {
  if (domain.contains(gamma.compact_box())) return;
  const auto& g = *gamma.grid();
  std::vector<double> p(gamma.dim());
  std::vector<std::size_t> bad;
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k) {
    for (int j = 0; j <= 256; ++j) {
      gamma.point(g[k], j / 256.0, p);
      if (!domain.contains(p)) {
        bad.push_back(k);
        break;
      }
    }
  }
  if (!bad.empty()) throw CompactnessError(what, bad);
}

void require_membrane_inside(const PreMembrane& M, const Box& domain) {
  if (domain.contains(M.compact_box())) return;
  const auto& g = *M.grid();
  std::vector<std::size_t> bad;
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k)
    if (!domain.contains(membrane_extent(M, k))) bad.push_back(k);
  if (!bad.empty()) throw CompactnessError("membrane is not compactly contained in the representative's domain", bad);
}

struct Partial {
  double value = 0.0;
  double mass = 0.0;
  std::size_t terms = 0;
};

// Composite Gauss–Legendre on [a, b].
Partial interval_sum(const Representative& f, double eps, double a, double b, const QuadConfig& cfg) {
  Partial out;
  if (!(b > a)) return out;
  const GaussRule r = composite_gauss(a, b, cfg.gauss_order, cfg.segments);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double x = r.nodes[i];
    const double v = r.weights[i] * f.value(eps, std::span<const double>(&x, 1));
    out.value += v;
    out.mass += std::fabs(v);
  }
  out.terms = r.nodes.size();
  return out;
}

Partial box_sum(const Representative& f, double eps, const Box& b, const QuadConfig& cfg) {
  const std::size_t n = b.dim();
  if (n == 1) return interval_sum(f, eps, b.lo(0), b.hi(0), cfg);
  Partial out;
  for (std::size_t i = 0; i < n; ++i)
    if (!(b.hi(i) > b.lo(i))) return out;
  const GaussRule& r = gauss_legendre(cfg.gauss_order);
  const std::size_t q = r.nodes.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= q;
  std::vector<double> x(n);
  double jac = 1.0;
  for (std::size_t i = 0; i < n; ++i) jac *= 0.5 * (b.hi(i) - b.lo(i));
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t rem = j;
    double w = jac;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = rem % q;
      rem /= q;
      const double mid = 0.5 * (b.lo(i) + b.hi(i)), half = 0.5 * (b.hi(i) - b.lo(i));
      x[i] = mid + half * r.nodes[idx];
      w *= r.weights[idx];
    }
    const double v = w * f.value(eps, x);
    out.value += v;
    out.mass += std::fabs(v);
  }
  out.terms = total;
  return out;
}

// Polar (n = 2) or spherical (n = 3) tensor rule; n = 1 is an interval.
Partial ball_sum(const Representative& f, double eps, std::span<const double> c, double radius,
                 const QuadConfig& cfg) {
  const std::size_t n = c.size();
  if (n == 1) return interval_sum(f, eps, c[0] - radius, c[0] + radius, cfg);
  Partial out;
  const GaussRule& rr = gauss_legendre(cfg.ball_radial);
  const std::size_t na = cfg.ball_angular;
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(na);
  std::array<double, 3> x{};
  if (n == 2) {
    for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
      const double rho = 0.5 * radius * (rr.nodes[i] + 1.0);
      const double wr = 0.5 * radius * rr.weights[i] * rho * dphi;
      for (std::size_t j = 0; j < na; ++j) {
        const double phi = dphi * static_cast<double>(j);
        x[0] = c[0] + rho * std::cos(phi);
        x[1] = c[1] + rho * std::sin(phi);
        const double v = wr * f.value(eps, std::span<const double>(x.data(), 2));
        out.value += v;
        out.mass += std::fabs(v);
      }
    }
    out.terms = rr.nodes.size() * na;
    return out;
  }
  if (n != 3) throw InputError("ball quadrature supports dimensions 1 to 3");
  const GaussRule& rt = gauss_legendre(std::max<std::size_t>(cfg.ball_angular / 2, 2));
  for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
    const double rho = 0.5 * radius * (rr.nodes[i] + 1.0);
    const double wr = 0.5 * radius * rr.weights[i] * rho * rho;
    for (std::size_t l = 0; l < rt.nodes.size(); ++l) {
      const double ct = rt.nodes[l], st = std::sqrt(1.0 - ct * ct);
      const double wt = wr * rt.weights[l] * dphi;
      for (std::size_t j = 0; j < na; ++j) {
        const double phi = dphi * static_cast<double>(j);
        x[0] = c[0] + rho * st * std::cos(phi);
        x[1] = c[1] + rho * st * std::sin(phi);
        x[2] = c[2] + rho * ct;
        const double v = wt * f.value(eps, std::span<const double>(x.data(), 3));
        out.value += v;
        out.mass += std::fabs(v);
      }
    }
  }
  out.terms = rr.nodes.size() * rt.nodes.size() * na;
  return out;
}

// Shared kernel for line integrals: integrand(k, t) at each composite node.
template <class Integrand>
GenNet unit_line(const GridPtr& grid, bool complex, const QuadConfig& cfg, Integrand integrand) {
  const GaussRule r = composite_gauss(0.0, 1.0, cfg.gauss_order, cfg.segments);
  GenNet out(grid, 1, complex);
  parallel_for(grid->size(), cfg.workers, [&](std::size_t k) {
    std::complex<double> s = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const std::complex<double> v = r.weights[i] * integrand(k, r.nodes[i]);
      s += v;
      mass += std::abs(v);
    }
    out.set(k, s);
    out.set_floor(k, sum_floor(r.nodes.size(), mass));
  });
  return out;
}

}  // namespace

GenNet integrate_membrane(const Representative& f, const PreMembrane& M, const QuadConfig& cfg) {
  cfg.validate();
  if (f.is_complex()) throw HypothesisError("membrane integrals take real representatives");
  if (f.arity() != M.dim()) throw HypothesisError("representative arity differs from the membrane dimension");
  require_membrane_inside(M, f.domain());
  const GridPtr& g = M.grid();
  GenNet out(g, 1, false);
  const std::size_t n = M.dim();

  std::visit(
      overloaded{
          [&](const IntervalRegion& iv) {
            parallel_for(g->size(), cfg.workers, [&](std::size_t k) {
              const double eps = (*g)[k], a = iv.a.real(k), b = iv.b.real(k);
              const Partial p = interval_sum(f, eps, a, b, cfg);
              const double fa = std::fabs(f.value(eps, std::span<const double>(&a, 1)));
              const double fb = std::fabs(f.value(eps, std::span<const double>(&b, 1)));
              out.set(k, p.value);
              out.set_floor(k, sum_floor(p.terms, p.mass) + fa * iv.a.floor(k) + fb * iv.b.floor(k));
            });
          },
          [&](const BoxRegion& bx) {
            parallel_for(g->size(), cfg.workers, [&](std::size_t k) {
              Box b;
              double edge = 0.0;
              for (const auto& ax : bx.axes) {
                b.axes.push_back({ax.a.real(k), ax.b.real(k)});
                edge = std::max(edge, (ax.a.floor(k) + ax.b.floor(k)) / std::max(ax.b.real(k) - ax.a.real(k), 1e-300));
              }
              const Partial p = box_sum(f, (*g)[k], b, cfg);
              out.set(k, p.value);
              out.set_floor(k, sum_floor(p.terms, p.mass) + static_cast<double>(n) * edge * p.mass);
            });
          },
          [&](const BallRegion& bl) {
            parallel_for(g->size(), cfg.workers, [&](std::size_t k) {
              std::array<double, 3> c{};
              for (std::size_t i = 0; i < n; ++i) c[i] = bl.center.real(k, i);
              const double r = bl.radius.real(k);
              const Partial p = ball_sum(f, (*g)[k], std::span<const double>(c.data(), n), r, cfg);
              const double rel = (bl.radius.floor(k) + bl.center.floor(k)) / r;
              out.set(k, p.value);
              out.set_floor(k, sum_floor(p.terms, p.mass) + static_cast<double>(n) * rel * p.mass);
            });
          },
          [&](const IndicatorRegion& R) {
            parallel_for(g->size(), cfg.workers, [&](std::size_t k) {
              const double eps = (*g)[k];
              const std::function<double(std::span<const double>)> fk = [&](std::span<const double> x) {
                return f.value(eps, x);
              };
              const RegionSum s = integrate_indicator(R, n, g, k, fk, cfg);
              out.set(k, s.value);
              out.set_floor(k, s.uncertainty + 16.0 * kUnit * std::fabs(s.value));
            });
          },
          [&](const TraceRegion& t) {
            if (n != 1) return;  // measure zero
            parallel_for(g->size(), cfg.workers, [&](std::size_t k) {
              const double eps = (*g)[k];
              double lo = std::numeric_limits<double>::infinity(), hi = -lo, p = 0.0;
              for (int j = 0; j <= 4096; ++j) {
                t.curve->point(eps, j / 4096.0, std::span<double>(&p, 1));
                lo = std::min(lo, p);
                hi = std::max(hi, p);
              }
              const Partial s = interval_sum(f, eps, lo, hi, cfg);
              out.set(k, s.value);
              out.set_floor(k, sum_floor(s.terms, s.mass));
            });
          }},
      M.region());
  return out;
}

GenNet line_integral_real(const std::vector<Representative>& F, const History& gamma, const QuadConfig& cfg) {
  cfg.validate();
  const std::size_t n = gamma.dim();
  if (F.size() != n) throw HypothesisError("vector field and history dimensions differ");
  for (const auto& Fi : F) {
    if (Fi.is_complex() || Fi.arity() != n) throw HypothesisError("vector field components must be real of arity n");
    require_curve_inside(gamma, Fi.domain(), "history leaves the vector field's domain");
  }
  const auto& g = *gamma.grid();
  return unit_line(gamma.grid(), false, cfg, [&](std::size_t k, double t) {
    std::array<double, 16> p{}, v{};
    gamma.point(g[k], t, std::span<double>(p.data(), n));
    gamma.velocity(g[k], t, std::span<double>(v.data(), n));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += F[i].value(g[k], std::span<const double>(p.data(), n)) * v[i];
    return std::complex<double>(s, 0.0);
  });
}

GenNet line_integral_complex(const Representative& f, const History& gamma, const QuadConfig& cfg) {
  cfg.validate();
  if (!f.is_complex()) throw HypothesisError("complex line integrals take complex representatives");
  if (gamma.dim() != 2) throw HypothesisError("complex line integrals need a planar history");
  require_curve_inside(gamma, f.domain(), "history leaves the representative's domain");
  const auto& g = *gamma.grid();
  return unit_line(gamma.grid(), true, cfg, [&](std::size_t k, double t) {
    return f.value(g[k], gamma.point_c(g[k], t)) * gamma.velocity_c(g[k], t);
  });
}

Representative rot2(const std::vector<Representative>& F) {
  if (F.size() != 2 || F[0].arity() != 2 || F[1].arity() != 2 || F[0].is_complex() || F[1].is_complex())
    throw HypothesisError("rot2 needs a real planar vector field");
  if (F[0].body().variables() != F[1].body().variables())
    throw InputError("vector field components must share their variable names");
  const Expr d = combine(Op::Sub, F[1].partial(0).body(), F[0].partial(1).body());
  Box dom = F[0].domain();
  for (std::size_t i = 0; i < 2; ++i) {
    dom.axes[i][0] = std::max(dom.lo(i), F[1].domain().lo(i));
    dom.axes[i][1] = std::min(dom.hi(i), F[1].domain().hi(i));
  }
  return Representative::from_expr(d, 2, dom, Codomain::Real);
}

GreenReport green_check(const std::vector<Representative>& F, const History& gamma, const PreMembrane& M,
                        const QuadConfig& cfg) {
  const auto& fl = gamma.flags();
  if (!fl.closed || !fl.simple || !fl.contractible || !fl.positively_oriented)
    throw HypothesisError("Green's theorem needs a closed, simple, contractible, positively oriented history");
  if (gamma.dim() != 2 || M.dim() != 2) throw HypothesisError("Green's theorem is planar");
  GreenReport r;
  r.lhs = line_integral_real(F, gamma, cfg);
  r.rhs = integrate_membrane(rot2(F), M, cfg);
  r.gap_class = classify(r.lhs - r.rhs);
  return r;
}

MeanValueReport mean_value_bound(const Representative& f, const PreMembrane& M, const QuadConfig& cfg) {
  MeanValueReport r;
  r.volume = volume(M, cfg);
  if (classify(r.volume).kind == NetKind::Null) throw BoundDegenerate("vol(M) is Null; the bound is degenerate");
  r.integral = integrate_membrane(f, M, cfg);
  if (classify(r.integral).kind == NetKind::Null) {
    r.r_star = std::numeric_limits<double>::infinity();
    return r;
  }
  const auto& g = *M.grid();
  for (int j = 2000; j >= -2000; --j) {
    const double rr = j / 100.0;
    bool ok = true;
    for (std::size_t k = g.tail_begin(); k < g.size() && ok; ++k) {
      const double bound = std::fabs(r.volume.real(k)) * std::pow(g[k], rr);
      ok = std::fabs(r.integral.real(k)) <= bound + r.integral.floor(k) + r.volume.floor(k) * std::pow(g[k], rr);
    }
    if (ok) {
      r.r_star = rr;
      return r;
    }
  }
  return r;
}

ConsistencyReport interval_consistency(const Representative& f, const GenNet& a, const GenNet& b,
                                       const QuadConfig& cfg) {
  if (f.arity() != 1 || f.is_complex()) throw HypothesisError("interval consistency needs a real function of one variable");
  const PreMembrane M = PreMembrane::interval(a, b, f.domain());
  ConsistencyReport r;
  r.membrane_val = integrate_membrane(f, M, cfg);
  const auto& g = *a.grid();
  r.line_val = unit_line(a.grid(), false, cfg, [&](std::size_t k, double t) {
    const double ak = a.real(k), len = b.real(k) - ak;
    const double x = ak + t * len;
    return std::complex<double>(f.value(g[k], std::span<const double>(&x, 1)) * len, 0.0);
  });
  r.gap_class = classify(r.membrane_val - r.line_val);
  return r;
}

}  // namespace mcalc
