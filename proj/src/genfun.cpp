#include "mcalc/genfun.hpp"

#include <array>
#include <cmath>
#include <random>

namespace mcalc {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2.0;
constexpr std::size_t kMaxArity = 15;
// Relative rounding allowance attached to directly evaluated samples.
constexpr double kEvalUlps = 16.0;

std::vector<std::string> default_vars(std::size_t arity, Codomain codomain) {
  if (codomain == Codomain::Complex) return {"z"};
  std::vector<std::string> v;
  for (std::size_t i = 1; i <= arity; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

}  // namespace

Representative::Representative(Expr body, std::size_t arity, Box domain, Codomain codomain)
    : body_(std::move(body)), arity_(arity), domain_(std::move(domain)), codomain_(codomain) {}

Representative Representative::from_expr(Expr body, std::size_t arity, Box domain, Codomain codomain) {
  if (arity == 0 || arity > kMaxArity) throw InputError("representative arity out of range");
  if (codomain == Codomain::Complex && arity != 1)
    throw InputError("complex representatives take exactly one complex argument");
  const std::size_t box_dim = codomain == Codomain::Complex ? 2 : arity;
  if (domain.dim() != box_dim) throw InputError("representative domain box has the wrong dimension");
  if (body.variables().size() != arity + 1 || body.variables().back() != "eps")
    throw InputError("representative body must be written in its arguments and eps");
  if (codomain == Codomain::Real && body.uses_complex())
    throw InputError("real representative uses complex arithmetic");
  return Representative(std::move(body), arity, std::move(domain), codomain);
}

Representative Representative::make(std::string_view body, std::size_t arity, Box domain, Codomain codomain,
                                    const GridPtr& grid, std::vector<std::string> vars) {
  if (vars.empty()) vars = default_vars(arity, codomain);
  if (vars.size() != arity) throw InputError("representative variable list does not match its arity");
  Representative f = from_expr(parse(body, vars), arity, std::move(domain), codomain);

  std::mt19937_64 rng(0x5eed5eedULL);
  const Box& d = f.domain();
  std::vector<double> x(d.dim());
  for (int p = 0; p < 32; ++p) {
    for (std::size_t i = 0; i < d.dim(); ++i)
      x[i] = std::uniform_real_distribution<double>(d.lo(i), d.hi(i))(rng);
    GenNet net(grid, 1, f.is_complex());
    for (std::size_t k = 0; k < grid->size(); ++k) {
      if (f.is_complex()) net.set(k, f.value((*grid)[k], std::complex<double>(x[0], x[1])));
      else net.set(k, f.value((*grid)[k], x));
    }
    if (!has_polynomial_growth(net))
      throw HypothesisError("representative '" + f.body().str() + "' is not moderate: superpolynomial growth in eps");
  }
  return f;
}

double Representative::value(double eps, std::span<const double> x) const {
  if (is_complex()) throw HypothesisError("real evaluation of a complex representative");
  std::array<double, kMaxArity + 1> env{};
  for (std::size_t i = 0; i < arity_; ++i) env[i] = x[i];
  env[arity_] = eps;
  return body_.eval(std::span<const double>(env.data(), arity_ + 1));
}

std::complex<double> Representative::value(double eps, std::complex<double> z) const {
  const std::complex<double> env[2] = {z, {eps, 0.0}};
  return body_.eval(std::span<const std::complex<double>>(env, 2));
}

Representative Representative::partial(std::size_t i) const {
  if (i >= arity_) throw Error("partial derivative index out of range");
  return Representative(body_.differentiate(variable(i)), arity_, domain_, codomain_);
}

// ---------------------------------------------------------------------------
// GenPoint

GenPoint::GenPoint(GenNet coords, Box compact_box) : coords_(std::move(coords)), box_(std::move(compact_box)) {
  const std::size_t expected = coords_.is_complex() ? 2 * coords_.arity() : coords_.arity();
  if (expected != box_.dim()) throw InputError("generalized point dimension does not match its compact box");
  std::vector<double> p(box_.dim());
  std::vector<std::size_t> bad;
  for (std::size_t k = grid()->tail_begin(); k < grid()->size(); ++k) {
    sample(k, p);
    if (!box_.contains(p)) bad.push_back(k);
  }
  if (!bad.empty()) throw CompactnessError("generalized point leaves its compact box", bad);
}

GenPoint GenPoint::classical(const GridPtr& grid, std::span<const double> x, Box compact_box) {
  std::vector<GenNet> comps;
  for (double c : x) comps.push_back(GenNet::constant(grid, c));
  return GenPoint(comps.size() == 1 ? comps[0] : GenNet::vector(comps), std::move(compact_box));
}

void GenPoint::sample(std::size_t k, std::span<double> out) const {
  if (coords_.is_complex()) {
    for (std::size_t j = 0; j < coords_.arity(); ++j) {
      out[2 * j] = coords_.at(k, j).real();
      out[2 * j + 1] = coords_.at(k, j).imag();
    }
  } else {
    for (std::size_t j = 0; j < coords_.arity(); ++j) out[j] = coords_.real(k, j);
  }
}

void require_tail_inside(const GenPoint& pts, const Box& box, const std::string& what) {
  std::vector<double> p(pts.dim());
  std::vector<std::size_t> bad;
  for (std::size_t k = pts.grid()->tail_begin(); k < pts.grid()->size(); ++k) {
    pts.sample(k, p);
    if (!box.contains(p)) bad.push_back(k);
  }
  if (!bad.empty()) throw CompactnessError(what, bad);
}

// ---------------------------------------------------------------------------

GenNet evaluate_at(const Representative& f, const GenPoint& x) {
  if (x.dim() != f.domain().dim()) throw HypothesisError("generalized point and representative arities differ");
  if (!f.domain().contains(x.compact_box()))
    require_tail_inside(x, f.domain(), "generalized point is not compactly contained in the representative's domain");
  const auto& g = *x.grid();
  GenNet out(x.grid(), 1, f.is_complex());
  std::vector<double> p(x.dim());
  for (std::size_t k = 0; k < g.size(); ++k) {
    x.sample(k, p);
    const std::complex<double> v =
        f.is_complex() ? f.value(g[k], std::complex<double>(p[0], p[1])) : std::complex<double>(f.value(g[k], p));
    out.set(k, v);
    out.set_floor(k, kEvalUlps * kUnit * std::abs(v));
  }
  return out;
}

std::vector<Representative> gradient(const Representative& f) {
  std::vector<Representative> g;
  for (std::size_t i = 0; i < f.arity(); ++i) g.push_back(f.partial(i));
  return g;
}

GenNet derivative_along_curve(const Representative& f, const History& gamma, double t0) {
  if (f.is_complex()) throw HypothesisError("chain rule along curves needs a real representative");
  if (gamma.dim() != f.arity()) throw HypothesisError("curve dimension differs from the representative's arity");
  if (!(t0 >= 0.0 && t0 <= 1.0)) throw HypothesisError("t0 must lie in [0, 1]");
  const auto& g = *gamma.grid();
  const auto grad = gradient(f);
  std::vector<double> p(gamma.dim()), v(gamma.dim());
  std::vector<std::size_t> bad;
  GenNet out(gamma.grid(), 1, false);
  for (std::size_t k = 0; k < g.size(); ++k) {
    gamma.point(g[k], t0, p);
    if (g.is_tail(k) && !f.domain().contains(p)) bad.push_back(k);
    gamma.velocity(g[k], t0, v);
    double s = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double term = grad[i].value(g[k], p) * v[i];
      s += term;
      mag += std::fabs(term);
    }
    out.set(k, s);
    out.set_floor(k, kEvalUlps * kUnit * mag);
  }
  if (!bad.empty()) throw CompactnessError("curve leaves the representative's domain", bad);
  return out;
}

}  // namespace mcalc
