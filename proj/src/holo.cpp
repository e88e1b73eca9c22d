#include "mcalc/holo.hpp"

#include <cmath>
#include <numbers>

#include "mcalc/gauss.hpp"
#include "mcalc/parallel.hpp"

namespace mcalc {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kCauchyRiemannTol = 1e-8;

// Reads sample k of a complex scalar net or a real 2-vector net as a point of C.
std::complex<double> as_complex(const GenNet& z, std::size_t k) {
  if (z.is_complex()) return z.at(k);
  return {z.real(k, 0), z.real(k, 1)};
}

GenNet to_complex_net(const GenNet& z, const char* what) {
  if (z.is_complex() && z.arity() == 1) return z;
  if (!z.is_complex() && z.arity() == 1) {
    GenNet out(z.grid(), 1, true);
    for (std::size_t k = 0; k < z.size(); ++k) {
      out.set(k, z.at(k));
      out.set_floor(k, z.floor(k));
    }
    return out;
  }
  if (!z.is_complex() && z.arity() == 2) {
    GenNet out(z.grid(), 1, true);
    for (std::size_t k = 0; k < z.size(); ++k) {
      out.set(k, as_complex(z, k));
      out.set_floor(k, z.floor(k));
    }
    return out;
  }
  throw InputError(std::string(what) + " must be a scalar net or a real 2-vector net");
}

void require_curve_in_domain(const History& gamma, const Box& domain) {
  if (domain.contains(gamma.compact_box())) return;
  const auto& g = *gamma.grid();
  double p[2];
  std::vector<std::size_t> bad;
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k)
    for (int j = 0; j <= 256; ++j) {
      gamma.point(g[k], j / 256.0, p);
      if (!domain.contains(p)) {
        bad.push_back(k);
        break;
      }
    }
  if (!bad.empty()) throw CompactnessError("history leaves the representative's domain", bad);
}

// Discrete argument principle over 1024 nodes.
double winding_number(const History& gamma, double eps, std::complex<double> z0) {
  constexpr int kNodes = 1024;
  double total = 0.0;
  std::complex<double> prev = gamma.point_c(eps, 0.0) - z0;
  for (int j = 1; j <= kNodes; ++j) {
    const std::complex<double> cur = gamma.point_c(eps, static_cast<double>(j) / kNodes) - z0;
    total += std::arg(cur / prev);
    prev = cur;
  }
  return total / (2.0 * std::numbers::pi);
}

// |∂f/∂z̄| spot check by central differences with step h.
bool cauchy_riemann_ok(const Representative& f, double eps, std::complex<double> z, double h) {
  const std::complex<double> ih(0.0, h);
  const std::complex<double> fp = f.value(eps, z + h), fm = f.value(eps, z - h);
  const std::complex<double> gp = f.value(eps, z + ih), gm = f.value(eps, z - ih);
  const std::complex<double> fx = (fp - fm) / (2.0 * h), fy = (gp - gm) / (2.0 * h);
  const double M = std::max({std::abs(fp), std::abs(fm), std::abs(gp), std::abs(gm)});
  const double residual = std::abs(fx + std::complex<double>(0.0, 1.0) * fy);
  return residual <= kCauchyRiemannTol * (std::abs(fx) + std::abs(fy)) + 64.0 * kUnit * M / h;
}

bool stencil_inside(const Box& d, std::complex<double> z, double h) {
  const double p[2] = {z.real(), z.imag()};
  return d.contains(p, -h);
}

// Shared quadrature for the Cauchy formula and Taylor coefficients: the
// power (w - z0)^-(n+1) is built by repeated multiplication so that a_n does
// not depend on how many coefficients are requested.
std::vector<GenNet> contour_moments(const ContourSetup& s, std::size_t n_max, const QuadConfig& cfg) {
  cfg.validate();
  const History& gamma = s.gamma();
  const GridPtr& grid = gamma.grid();
  const GaussRule r = composite_gauss(0.0, 1.0, cfg.gauss_order, cfg.segments);
  std::vector<GenNet> out(n_max + 1, GenNet(grid, 1, true));
  const std::complex<double> two_pi_i(0.0, 2.0 * std::numbers::pi);
  parallel_for(grid->size(), cfg.workers, [&](std::size_t k) {
    const double eps = (*grid)[k];
    const std::complex<double> z0 = as_complex(s.z0(), k);
    std::vector<std::complex<double>> acc(n_max + 1);
    std::vector<double> mass(n_max + 1);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double t = r.nodes[i];
      const std::complex<double> w = gamma.point_c(eps, t);
      const std::complex<double> inv = 1.0 / (w - z0);
      std::complex<double> p = r.weights[i] * s.f().value(eps, w) * gamma.velocity_c(eps, t) * inv;
      for (std::size_t n = 0; n <= n_max; ++n) {
        acc[n] += p;
        mass[n] += std::abs(p);
        p *= inv;
      }
    }
    for (std::size_t n = 0; n <= n_max; ++n) {
      out[n].set(k, acc[n] / two_pi_i);
      const double terms = static_cast<double>(r.nodes.size() + 16 + 2 * n);
      out[n].set_floor(k, terms * kUnit * mass[n] / (2.0 * std::numbers::pi));
    }
  });
  return out;
}

}  // namespace

GenNet distance_to_history(const GenNet& z0, const History& gamma) {
  const std::size_t n = gamma.dim();
  const bool planar_complex = z0.is_complex() && z0.arity() == 1 && n == 2;
  if (!planar_complex && (z0.is_complex() || z0.arity() != n))
    throw InputError("point and history dimensions differ");
  const auto& g = *gamma.grid();
  GenNet out(gamma.grid(), 1, false);
  std::vector<double> p(n), q(n);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (planar_complex) {
      p[0] = z0.at(k).real();
      p[1] = z0.at(k).imag();
    } else {
      for (std::size_t i = 0; i < n; ++i) p[i] = z0.real(k, i);
    }
    const double d = distance_to_curve(gamma, g[k], p);
    gamma.point(g[k], 0.0, q);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::fabs(p[i]) + std::fabs(q[i]);
    out.set(k, d);
    out.set_floor(k, 64.0 * kUnit * (scale + d) + z0.floor(k));
  }
  return out;
}

ContourSetup ContourSetup::make(Representative f, History gamma, GenNet z0, double rho) {
  if (!f.is_complex()) throw HypothesisError("the Cauchy formula needs a complex representative");
  if (gamma.dim() != 2) throw HypothesisError("the Cauchy formula needs a planar history");
  const auto& fl = gamma.flags();
  if (!fl.closed || !fl.simple || !fl.contractible || !fl.positively_oriented)
    throw HypothesisError("contour must be declared closed, simple, contractible and positively oriented");
  if (z0.grid() != gamma.grid()) throw InputError("z0 and the history live on different grids");
  require_curve_in_domain(gamma, f.domain());

  ContourSetup s(std::move(f), std::move(gamma));
  s.z0_ = to_complex_net(z0, "z0");
  const GenPoint zp(s.z0_, s.f_.domain());  // tail containment of z0 in the domain

  s.separation_ = distance_to_history(s.z0_, s.gamma_);
  s.sep_class_ = classify(s.separation_);
  if (s.sep_class_.kind != NetKind::Invertible)
    throw HypothesisError(std::string("d(z0, gamma*) is not invertible (classified ") + to_string(s.sep_class_.kind) +
                          ")");

  const auto& g = *s.gamma_.grid();
  std::vector<std::size_t> bad_winding, bad_cr;
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k) {
    const double eps = g[k];
    const std::complex<double> c = as_complex(s.z0_, k);
    if (std::fabs(winding_number(s.gamma_, eps, c) - 1.0) > 0.5) bad_winding.push_back(k);
    const double h = 1e-5 * std::min(1.0, s.separation_.real(k));
    for (int j = 0; j < 16; ++j) {
      const std::complex<double> on = s.gamma_.point_c(eps, j / 16.0);
      const std::complex<double> mid = c + 0.5 * (s.gamma_.point_c(eps, (j + 0.5) / 16.0) - c);
      for (const auto& z : {on, mid}) {
        if (!stencil_inside(s.f_.domain(), z, h)) continue;
        if (!cauchy_riemann_ok(s.f_, eps, z, h)) {
          bad_cr.push_back(k);
          goto next_sample;
        }
      }
    }
  next_sample:;
  }
  if (!bad_winding.empty())
    throw HypothesisError("z0 is not enclosed once by the contour (winding number != 1 on " +
                          std::to_string(bad_winding.size()) + " tail samples)");
  if (!bad_cr.empty())
    throw HypothesisError("representative fails the Cauchy-Riemann spot check on " + std::to_string(bad_cr.size()) +
                          " tail samples");

  s.r_ = sharp_norm(s.separation_);
  if (std::isnan(rho)) rho = s.r_ / 8.0;
  if (!(rho > 0.0 && rho < s.r_ / 4.0)) throw InputError("rho must satisfy 0 < rho < r/4");
  s.rho_ = rho;
  return s;
}

CauchyReport cauchy_eval(const ContourSetup& setup, const QuadConfig& cfg) {
  CauchyReport r;
  r.via_contour = contour_moments(setup, 0, cfg)[0];
  r.direct = evaluate_at(setup.f(), GenPoint(setup.z0(), setup.f().domain()));
  r.gap_class = classify(r.via_contour - r.direct);
  return r;
}

std::vector<GenNet> taylor_coefficients(const ContourSetup& setup, std::size_t n_max, const QuadConfig& cfg) {
  return contour_moments(setup, n_max, cfg);
}

TaylorReport taylor_eval(const ContourSetup& setup, const std::vector<GenNet>& coeffs, const GenNet& z_in) {
  if (coeffs.empty()) throw InputError("no Taylor coefficients given");
  const GenNet z = to_complex_net(z_in, "z");
  const GenNet d = z - setup.z0();
  const auto& g = *z.grid();

  bool admissible = false;
  const NetClass dc = classify(d);
  if (dc.kind != NetKind::Indeterminate && sharp_norm(d) < std::min(1.0, setup.rho())) admissible = true;
  if (!admissible) {
    admissible = true;
    for (std::size_t k = g.tail_begin(); k < g.size(); ++k)
      if (!(std::abs(d.at(k)) <= 0.5 * setup.separation().real(k))) admissible = false;
  }
  if (!admissible)
    throw DivergenceRisk("z is outside the convergence neighbourhood of z0 (sharp_norm(z - z0) >= min(1, rho) "
                         "and |z - z0| > d(z0, gamma*)/2 on the tail)");

  TaylorReport r;
  r.series = GenNet(z.grid(), 1, true);
  const std::size_t K = g.size();
  std::vector<std::complex<double>> sum(K), power(K, 1.0), last(K);
  std::vector<double> floor(K), mass(K);
  std::size_t used = 0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    bool small = true;
    for (std::size_t k = 0; k < K; ++k) {
      if (n > 0) power[k] *= d.at(k);
      const std::complex<double> term = coeffs[n].at(k) * power[k];
      sum[k] += term;
      last[k] = term;
      mass[k] += std::abs(term);
      floor[k] += coeffs[n].floor(k) * std::abs(power[k]) + 4.0 * static_cast<double>(n + 1) * kUnit * std::abs(term);
      if (g.is_tail(k) && !(std::abs(term) < 1e-14)) small = false;
    }
    used = n + 1;
    if (n > 0 && small) break;
  }
  for (std::size_t k = 0; k < K; ++k) {
    r.series.set(k, sum[k]);
    r.series.set_floor(k, floor[k] + 2.0 * std::abs(last[k]) + static_cast<double>(used + 2) * kUnit * mass[k]);
  }
  r.terms_used = used;
  r.direct = evaluate_at(setup.f(), GenPoint(z, setup.f().domain()));
  r.gap_class = classify(r.series - r.direct);
  return r;
}

}  // namespace mcalc
