#include <cmath>
#include <random>

#include <doctest.h>

#include "mcalc/genfun.hpp"

using namespace mcalc;

TEST_CASE("evaluate_at") {
  const GridPtr g = EpsilonGrid::standard();
  const Box dom = Box::cube(1, -5, 5);
  const Representative id = Representative::make("x1", 1, dom, Codomain::Real, g);
  const GenNet v = evaluate_at(id, GenPoint(alpha(1.0, g), Box::cube(1, 0, 1)));
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(v.real(k) == (*g)[k]);

  const Representative ex = Representative::make("eps*x1", 1, dom, Codomain::Real, g);
  const double half = 0.5;
  const GenNet w = evaluate_at(ex, GenPoint::classical(g, std::span<const double>(&half, 1), Box::cube(1, 0, 1)));
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(w.real(k) == doctest::Approx(0.5 * (*g)[k]));

  const Representative sq = Representative::make("x1^2", 1, dom, Codomain::Real, g);
  CHECK(evaluate_at(sq, GenPoint(GenNet::constant(g, 3.0), Box::cube(1, 0, 4))).real(7) == 9.0);
}

TEST_CASE("compactness violations list samples") {
  const GridPtr g = EpsilonGrid::standard();
  const Representative f = Representative::make("x1", 1, Box::cube(1, -1, 1), Codomain::Real, g);
  const GenNet far = GenNet::from_function(g, [](double e) { return 1.0 / e; });
  try {
    (void)evaluate_at(f, GenPoint(far, Box::cube(1, -1e20, 1e20)));
    FAIL("expected a compactness error");
  } catch (const CompactnessError& e) {
    CHECK(!e.samples().empty());
  }
  CHECK_THROWS_AS(GenPoint(far, Box::cube(1, -1, 1)), CompactnessError);
}

TEST_CASE("moderateness spot check") {
  const GridPtr g = EpsilonGrid::standard();
  CHECK_NOTHROW(Representative::make("sin(x1/eps)/eps^3", 1, Box::cube(1, -1, 1), Codomain::Real, g));
  CHECK_THROWS_AS(Representative::make("exp(1/eps)*x1", 1, Box::cube(1, 0.5, 1), Codomain::Real, g), HypothesisError);
  CHECK_THROWS_AS(Representative::make("x1 + y", 1, Box::cube(1, 0, 1), Codomain::Real, g), UndeclaredVariable);
}

TEST_CASE("gradient") {
  const GridPtr g = EpsilonGrid::standard();
  const Box dom = Box::cube(2, -2, 2);
  const auto gr = gradient(Representative::make("x1^2 + x2^2", 2, dom, Codomain::Real, g));
  REQUIRE(gr.size() == 2);
  const double p[2] = {0.3, -1.1};
  CHECK(gr[0].value(0.1, p) == doctest::Approx(0.6));
  CHECK(gr[1].value(0.1, p) == doctest::Approx(-2.2));
  const auto ge = gradient(Representative::make("eps*x1", 1, Box::cube(1, -2, 2), Codomain::Real, g));
  CHECK(ge[0].value(0.01, std::span<const double>(p, 1)) == doctest::Approx(0.01));
  const auto gs = gradient(Representative::make("sin(x1/eps)", 1, Box::cube(1, -2, 2), Codomain::Real, g));
  CHECK(gs[0].value(0.1, std::span<const double>(p, 1)) == doctest::Approx(std::cos(3.0) / 0.1));
}

TEST_CASE("chain rule along curves") {
  const GridPtr g = EpsilonGrid::standard();
  const Box dom = Box::cube(1, -2, 2);
  const History line = History::make(std::vector<std::string>{"t"}, Growth{1.0, 0}, HistoryFlags{}, Box::cube(1, 0, 1), g);
  const GenNet d = derivative_along_curve(Representative::make("x1^2", 1, dom, Codomain::Real, g), line, 0.4);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(d.real(k) == doctest::Approx(0.8));

  const History scaled = History::make(std::vector<std::string>{"eps*t"}, Growth{1.0, 0}, HistoryFlags{}, Box::cube(1, 0, 1), g);
  const GenNet d2 = derivative_along_curve(Representative::make("x1^2", 1, dom, Codomain::Real, g), scaled, 1.0);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(d2.real(k) == doctest::Approx(2.0 * (*g)[k] * (*g)[k]));

  const History wavy = History::make(std::vector<std::string>{"sin(3*t)*eps + t^2"}, Growth{8.0, 0}, HistoryFlags{},
                                     Box::cube(1, -0.5, 1.5), g);
  const GenNet d3 = derivative_along_curve(Representative::make("x1", 1, dom, Codomain::Real, g), wavy, 0.3);
  for (std::size_t k = 0; k < g->size(); ++k)
    CHECK(d3.real(k) == doctest::Approx(3 * std::cos(0.9) * (*g)[k] + 0.6));
}

TEST_CASE("chain rule matches finite differences for random polynomial data") {
  const GridPtr g = EpsilonGrid::standard();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-1.0, 1.0), t(0.05, 0.95);
  const Box dom = Box::cube(2, -6, 6);
  auto coef = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "(%.4f)", c(rng));
    return std::string(buf);
  };
  for (int trial = 0; trial < 20; ++trial) {
    const std::string fb = coef() + "*x1^2*x2 + " + coef() + "*x2^3 + " + coef() + "*x1*eps + " + coef();
    const std::string c1 = coef() + "*t^2 + " + coef() + "*t + eps", c2 = coef() + "*t^3 - " + coef() + "*t*eps";
    const Representative f = Representative::make(fb, 2, dom, Codomain::Real, g);
    const History gam = History::make(std::vector<std::string>{c1, c2}, Growth{10.0, 0}, HistoryFlags{}, Box::cube(2, -4, 4), g);
    const double t0 = t(rng);
    const GenNet d = derivative_along_curve(f, gam, t0);
    for (std::size_t k = g->tail_begin(); k < g->size(); ++k) {
      const double eps = (*g)[k], h = 1e-6;
      double a[2], b[2];
      gam.point(eps, t0 + h, a);
      gam.point(eps, t0 - h, b);
      const double fd = (f.value(eps, a) - f.value(eps, b)) / (2 * h);
      CHECK(std::fabs(fd - d.real(k)) <= 1e-4 * std::max(1.0, std::fabs(fd)));
    }
  }
}

TEST_CASE("linearity and null preservation") {
  const GridPtr g = EpsilonGrid::standard();
  const Box dom = Box::cube(1, -3, 3);
  const GenPoint x(GenNet::constant(g, 0.7) + alpha(1.0, g), Box::cube(1, 0, 2));
  const GenNet lhs = evaluate_at(Representative::make("2*(sin(x1)) + (-3)*(x1^2/eps)", 1, dom, Codomain::Real, g), x);
  const GenNet rhs = scale(evaluate_at(Representative::make("sin(x1)", 1, dom, Codomain::Real, g), x), 2.0) +
                     scale(evaluate_at(Representative::make("x1^2/eps", 1, dom, Codomain::Real, g), x), -3.0);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(lhs.real(k) == doctest::Approx(rhs.real(k)).epsilon(1e-14));

  const Representative n = Representative::make("exp(-1/eps)*(1 + x1 + x1^3)", 1, dom, Codomain::Real, g);
  for (double p : {-2.0, 0.0, 1.5})
    CHECK(classify(evaluate_at(n, GenPoint(GenNet::constant(g, p) + alpha(0.5, g), Box::cube(1, -3, 3)))).kind ==
          NetKind::Null);
}

TEST_CASE("complex representatives") {
  const GridPtr g = EpsilonGrid::standard();
  const Representative f = Representative::make("z^2 + eps", 1, Box::cube(2, -2, 2), Codomain::Complex, g);
  CHECK(std::abs(f.value(0.1, std::complex<double>(0.0, 1.0)) - std::complex<double>(-0.9, 0.0)) < 1e-15);
  const GenNet z = GenNet::constant(g, std::complex<double>(1.0, 1.0));
  const GenNet v = evaluate_at(f, GenPoint(z, Box::cube(2, -2, 2)));
  CHECK(std::abs(v.at(3) - std::complex<double>((*g)[3], 2.0)) < 1e-14);
}
