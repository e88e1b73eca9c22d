#include "mcalc/pde.hpp"

#include <algorithm>
#include <cmath>

#include "mcalc/gauss.hpp"

namespace mcalc {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;
constexpr std::size_t kSourceNodes = 64;
constexpr double kScaleFactor = 10.0;

void require_positive_tail(const GenNet& t, double margin, const char* what) {
  const auto& g = *t.grid();
  std::vector<std::size_t> bad;
  for (std::size_t k = g.tail_begin(); k < g.size(); ++k)
    if (!(t.real(k) > margin)) bad.push_back(k);
  if (!bad.empty()) throw CompactnessError(what, bad);
}

}  // namespace

void TransportProblem::validate() const {
  if (n == 0) throw InputError("transport problem needs n >= 1");
  if (!b.grid()) throw InputError("transport velocity b is missing");
  if (b.is_complex() || b.arity() != n) throw InputError("transport velocity b must be a real vector net of arity n");
  for (std::size_t i = 0; i < n; ++i)
    if (classify(b.component(i)).kind == NetKind::Indeterminate)
      throw HypothesisError("transport velocity component " + std::to_string(i + 1) + " is Indeterminate");
  if (g.is_complex() || g.arity() != n) throw InputError("initial datum g must be real of arity n");
  if (f) {
    if (f->is_complex() || f->arity() != n + 1) throw InputError("source f must be real of arity n + 1");
    if (f->variable(n) != "t") throw InputError("the last variable of the source f must be t");
  }
  if (!(a > 0.0)) throw InputError("source domain parameter a must be positive");
}

void WaveProblem::validate() const {
  if (!grid) throw InputError("wave problem needs an epsilon grid");
  if (g.is_complex() || g.arity() != 1 || h.is_complex() || h.arity() != 1)
    throw InputError("wave data g and h must be real functions of one variable");
}

// ---------------------------------------------------------------------------

TransportSolution::TransportSolution(TransportProblem p) : p_(std::move(p)) { p_.validate(); }

TransportSolution transport_solve(TransportProblem p) { return TransportSolution(std::move(p)); }

double TransportSolution::value(std::size_t k, std::span<const double> x, double t) const {
  return value(k, x, t, nullptr);
}

double TransportSolution::value(std::size_t k, std::span<const double> x, double t, double* floor) const {
  const std::size_t n = p_.n;
  const double eps = (*p_.b.grid())[k];
  std::vector<double> y(n + 1);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - t * p_.b.real(k, i);
  const double gv = p_.g.value(eps, std::span<const double>(y.data(), n));
  double fl = 16.0 * kUnit * std::fabs(gv);
  if (!p_.f) {
    if (floor) *floor = fl;
    return gv;
  }
  const GaussRule& r = gauss_legendre(kSourceNodes);
  const double half = 0.5 * t;
  double s = 0.0, mass = 0.0;
  for (std::size_t j = 0; j < r.nodes.size(); ++j) {
    const double sj = -half + half * r.nodes[j];
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + sj * p_.b.real(k, i);
    y[n] = t + sj;
    if (!(y[n] > -p_.a)) throw DomainError("source term evaluated outside its time domain (-a, inf)");
    const double v = half * r.weights[j] * p_.f->value(eps, y);
    s += v;
    mass += std::fabs(v);
  }
  fl += (static_cast<double>(kSourceNodes) + 16.0) * kUnit * mass;
  if (floor) *floor = fl;
  return gv + s;
}

GenNet TransportSolution::operator()(const GenPoint& x, const GenNet& t) const {
  if (x.dim() != p_.n) throw HypothesisError("probe dimension differs from the transport problem");
  if (t.is_complex() || t.arity() != 1) throw InputError("time must be a real scalar net");
  require_positive_tail(t, 0.0, "time is not positive on the tail");
  const auto& g = *t.grid();
  GenNet out(t.grid(), 1, false);
  std::vector<double> p(p_.n);
  for (std::size_t k = 0; k < g.size(); ++k) {
    x.sample(k, p);
    double fl = 0.0;
    out.set(k, value(k, p, t.real(k), &fl));
    out.set_floor(k, fl);
  }
  return out;
}

Evaluator TransportSolution::evaluator() const {
  return [self = *this](std::size_t k, std::span<const double> x, double t) { return self.value(k, x, t); };
}

// ---------------------------------------------------------------------------

WaveSolution::WaveSolution(WaveProblem p) : p_(std::move(p)), dg_(p_.g.partial(0)) { p_.validate(); }

WaveSolution wave_solve(WaveProblem p) { return WaveSolution(std::move(p)); }

double WaveSolution::value(std::size_t k, double x, double t) const { return value(k, x, t, nullptr); }

double WaveSolution::value(std::size_t k, double x, double t, double* floor) const {
  const double eps = (*p_.grid)[k];
  const double xp = x + t, xm = x - t;
  const double gp = p_.g.value(eps, std::span<const double>(&xp, 1));
  const double gm = p_.g.value(eps, std::span<const double>(&xm, 1));
  const GaussRule& r = gauss_legendre(kSourceNodes);
  double s = 0.0, mass = 0.0;
  for (std::size_t j = 0; j < r.nodes.size(); ++j) {
    const double y = x + t * r.nodes[j];
    const double v = t * r.weights[j] * p_.h.value(eps, std::span<const double>(&y, 1));
    s += v;
    mass += std::fabs(v);
  }
  if (floor)
    *floor = 16.0 * kUnit * (std::fabs(gp) + std::fabs(gm)) + (static_cast<double>(kSourceNodes) + 16.0) * kUnit * mass;
  return 0.5 * (gp + gm) + 0.5 * s;
}

GenNet WaveSolution::operator()(const GenNet& x, const GenNet& t) const {
  if (x.is_complex() || x.arity() != 1 || t.is_complex() || t.arity() != 1)
    throw InputError("wave probes are real scalar nets");
  require_positive_tail(t, 0.0, "time is not positive on the tail");
  GenNet out(p_.grid, 1, false);
  for (std::size_t k = 0; k < p_.grid->size(); ++k) {
    double fl = 0.0;
    out.set(k, value(k, x.real(k), t.real(k), &fl));
    out.set_floor(k, fl);
  }
  return out;
}

Evaluator WaveSolution::evaluator() const {
  return [self = *this](std::size_t k, std::span<const double> x, double t) { return self.value(k, x[0], t); };
}

double WaveSolution::energy(std::size_t k, double t, double L, std::size_t panels) const {
  const double eps = (*p_.grid)[k];
  const GaussRule r = composite_gauss(-L, L, kSourceNodes, panels);
  double e = 0.0;
  for (std::size_t j = 0; j < r.nodes.size(); ++j) {
    const double xp = r.nodes[j] + t, xm = r.nodes[j] - t;
    const double dgp = dg_.value(eps, std::span<const double>(&xp, 1));
    const double dgm = dg_.value(eps, std::span<const double>(&xm, 1));
    const double hp = p_.h.value(eps, std::span<const double>(&xp, 1));
    const double hm = p_.h.value(eps, std::span<const double>(&xm, 1));
    const double ut = 0.5 * (dgp - dgm) + 0.5 * (hp + hm);
    const double ux = 0.5 * (dgp + dgm) + 0.5 * (hp - hm);
    e += r.weights[j] * (ut * ut + ux * ux);
  }
  return 0.5 * e;
}

// ---------------------------------------------------------------------------
// Residuals

namespace {

struct ProbeSample {
  double raw = 0.0;
  double scale = 0.0;
};

ResidualReport assemble(const GridPtr& grid, std::span<const Probe> probes,
                        const std::function<ProbeSample(std::size_t k, const Probe& p)>& one) {
  ResidualReport r;
  r.raw = GenNet(grid, 1, false);
  r.scaled = GenNet(grid, 1, false);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    double worst = 0.0, worst_scaled = 0.0;
    for (const auto& p : probes) {
      const ProbeSample s = one(k, p);
      const double m = std::fabs(s.raw);
      worst = std::max(worst, m);
      if (m > kScaleFactor * s.scale) worst_scaled = std::max(worst_scaled, m);
    }
    r.raw.set(k, worst);
    r.scaled.set(k, worst_scaled);
  }
  r.raw_class = classify(r.raw);
  r.scaled_class = classify(r.scaled);
  return r;
}

void check_probes(std::span<const Probe> probes, std::size_t n, double margin, const GridPtr& grid) {
  if (probes.empty()) throw InputError("residual check needs at least one probe");
  if (!(margin > 0.0)) throw InputError("finite-difference step must be positive");
  for (const auto& p : probes) {
    if (p.x.is_complex() || p.x.arity() != n || p.t.is_complex() || p.t.arity() != 1)
      throw InputError("probe dimension differs from the problem");
    if (p.x.grid() != grid || p.t.grid() != grid) throw InputError("probe lives on a different grid");
    require_positive_tail(p.t, margin, "probe is within the finite-difference margin of t = 0");
  }
}

}  // namespace

ResidualReport residual_check(const Evaluator& w, const TransportProblem& p, std::span<const Probe> probes,
                              double h) {
  p.validate();
  const std::size_t n = p.n;
  const GridPtr& grid = p.b.grid();
  check_probes(probes, n, 2.0 * h, grid);
  return assemble(grid, probes, [&](std::size_t k, const Probe& pr) {
    const double eps = (*grid)[k];
    const double t = pr.t.real(k);
    const double H = std::min(10.0 * h, 0.5 * t);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = pr.x.real(k, i);
    const double w0 = w(k, x, t);
    double W = std::fabs(w0), M2 = 0.0;
    const double tp = w(k, x, t + h), tm = w(k, x, t - h);
    double r = (tp - tm) / (2.0 * h);
    W = std::max({W, std::fabs(tp), std::fabs(tm)});
    M2 = std::fabs(w(k, x, t + H) - 2.0 * w0 + w(k, x, t - H)) / (H * H);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = x[i];
      x[i] = xi + h;
      const double xp = w(k, x, t);
      x[i] = xi - h;
      const double xm = w(k, x, t);
      x[i] = xi + H;
      const double xP = w(k, x, t);
      x[i] = xi - H;
      const double xM = w(k, x, t);
      x[i] = xi;
      r += p.b.real(k, i) * (xp - xm) / (2.0 * h);
      W = std::max({W, std::fabs(xp), std::fabs(xm)});
      M2 = std::max(M2, std::fabs(p.b.real(k, i)) * std::fabs(xP - 2.0 * w0 + xM) / (H * H));
    }
    double fv = 0.0;
    if (p.f) {
      std::vector<double> y(x);
      y.push_back(t);
      fv = p.f->value(eps, y);
      r -= fv;
    }
    return ProbeSample{r, M2 * h * h + 64.0 * kUnit * W / h + 16.0 * kUnit * std::fabs(fv)};
  });
}

ResidualReport residual_check(const Evaluator& w, const WaveProblem& p, std::span<const Probe> probes, double h) {
  p.validate();
  const GridPtr& grid = p.grid;
  const double H = 10.0 * h;
  check_probes(probes, 1, 2.0 * H, grid);
  return assemble(grid, probes, [&](std::size_t k, const Probe& pr) {
    const double t = pr.t.real(k);
    const double x = pr.x.real(k);
    auto at = [&](double xx, double tt) { return w(k, std::span<const double>(&xx, 1), tt); };
    const double w0 = at(x, t);
    const double tp = at(x, t + H), tm = at(x, t - H), xp = at(x + H, t), xm = at(x - H, t);
    const double utt = (tp - 2.0 * w0 + tm) / (H * H);
    const double uxx = (xp - 2.0 * w0 + xm) / (H * H);
    const double W = std::max({std::fabs(w0), std::fabs(tp), std::fabs(tm), std::fabs(xp), std::fabs(xm)});
    const double M2 = std::max(std::fabs(utt), std::fabs(uxx));
    return ProbeSample{utt - uxx, M2 * H * H + 64.0 * kUnit * W / (H * H)};
  });
}

Representative windowed_bump(const Box& domain, const GridPtr& grid) {
  return Representative::make("exp(-1/((1 - x1^2 + abs(1 - x1^2))/2 + 1e-60))", 1, domain, Codomain::Real, grid);
}

}  // namespace mcalc
