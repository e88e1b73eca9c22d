#include <cmath>
#include <complex>

#include <doctest.h>

#include "mcalc/holo.hpp"

using namespace mcalc;
using cd = std::complex<double>;

namespace {

History circle(const GridPtr& g, const std::string& r, Box box) {
  return History::make(std::vector<std::string>{r + "*cos(2*pi*t)", r + "*sin(2*pi*t)"}, Growth{20.0, 0},
                       HistoryFlags{true, true, true, true}, std::move(box), g);
}

Representative rep(const GridPtr& g, const std::string& f, double R) {
  return Representative::make(f, 1, Box::cube(2, -R, R), Codomain::Complex, g);
}

}  // namespace

TEST_CASE("distance to a history") {
  const GridPtr g = EpsilonGrid::standard();
  const History unit = circle(g, "1", Box::cube(2, -1, 1));
  const GenNet d0 = distance_to_history(GenNet::constant(g, cd(0.0, 0.0)), unit);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(d0.real(k) == doctest::Approx(1.0).epsilon(1e-12));
  const GenNet d1 = distance_to_history(GenNet::constant(g, cd(0.3, 0.4)), unit);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(d1.real(k) == doctest::Approx(0.5).epsilon(1e-9));
  const GenNet de = distance_to_history(GenNet::constant(g, cd(0.0, 0.0)), circle(g, "eps", Box::cube(2, -1, 1)));
  const NetClass c = classify(de);
  CHECK(c.kind == NetKind::Invertible);
  CHECK(c.estimated_valuation == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("contour setup checks its hypotheses") {
  const GridPtr g = EpsilonGrid::standard();
  const History unit = circle(g, "1", Box::cube(2, -1, 1));
  const GenNet zero = GenNet::constant(g, cd(0.0, 0.0));
  CHECK_THROWS_AS(ContourSetup::make(rep(g, "exp(z)", 3), unit, GenNet::constant(g, cd(2.0, 0.0))), HypothesisError);
  CHECK_THROWS_AS(ContourSetup::make(rep(g, "re(z)", 1.1), unit, zero), HypothesisError);
  // z0 approaching the contour: the separation is not invertible.
  CHECK_THROWS_AS(ContourSetup::make(rep(g, "exp(z)", 1.1), unit, GenNet::from_complex_function(g, [](double e) {
                                       return cd(1.0 - std::exp(-1.0 / e), 0.0);
                                     })),
                  HypothesisError);
  const History open = History::make(std::vector<std::string>{"t", "0"}, Growth{1.0, 0}, HistoryFlags{}, Box::cube(2, -1, 1), g);
  CHECK_THROWS_AS(ContourSetup::make(rep(g, "exp(z)", 1.1), open, zero), HypothesisError);
  CHECK_THROWS_AS(ContourSetup::make(rep(g, "exp(z)", 1.1), unit, zero, 0.5), InputError);

  const ContourSetup s = ContourSetup::make(rep(g, "exp(z)", 1.1), unit, zero);
  CHECK(s.separation_class().kind == NetKind::Invertible);
  CHECK(s.rho() == doctest::Approx(s.radius_norm() / 8));
}

TEST_CASE("cauchy formula with an eps-dependent contour") {
  const GridPtr g = EpsilonGrid::standard();
  const History small = circle(g, "eps", Box::cube(2, -1, 1));
  const GenNet z0 = scale(alpha(1.0, g), cd(0.2, -0.1));
  const ContourSetup s = ContourSetup::make(rep(g, "z^3/eps + cos(z)", 1.1), small, z0);
  const CauchyReport r = cauchy_eval(s);
  CHECK(r.gap_class.kind == NetKind::Null);
}

TEST_CASE("taylor coefficients") {
  const GridPtr g = EpsilonGrid::standard();
  const History unit = circle(g, "1", Box::cube(2, -1, 1));
  const GenNet z0 = GenNet::constant(g, cd(0.1, 0.2));
  const ContourSetup s = ContourSetup::make(rep(g, "exp(eps*z)", 1.1), unit, z0);
  const auto a6 = taylor_coefficients(s, 6), a3 = taylor_coefficients(s, 3);
  REQUIRE(a6.size() == 7);
  REQUIRE(a3.size() == 4);
  for (std::size_t n = 0; n <= 3; ++n)
    for (std::size_t k = 0; k < g->size(); ++k) CHECK(a6[n].at(k) == a3[n].at(k));
  const CauchyReport c = cauchy_eval(s);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(std::abs(a6[0].at(k) - c.via_contour.at(k)) < 1e-15);
  // a_n = eps^n exp(eps z0) / n!
  double fact = 1.0;
  for (std::size_t n = 0; n <= 6; ++n) {
    if (n) fact *= static_cast<double>(n);
    for (std::size_t k = 0; k < g->size(); ++k) {
      const double e = (*g)[k];
      const cd want = std::pow(e, static_cast<double>(n)) * std::exp(e * cd(0.1, 0.2)) / fact;
      CHECK(std::abs(a6[n].at(k) - want) <= 1e-12 * std::max(1e-300, std::abs(want)) + 1e-13);
    }
  }
}

TEST_CASE("coefficients do not depend on the contour radius") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet zero = GenNet::constant(g, cd(0.0, 0.0));
  const ContourSetup s1 = ContourSetup::make(rep(g, "sin(z) + z^4", 2.2), circle(g, "1", Box::cube(2, -1, 1)), zero);
  const ContourSetup s2 = ContourSetup::make(rep(g, "sin(z) + z^4", 2.2), circle(g, "2", Box::cube(2, -2, 2)), zero);
  const auto a = taylor_coefficients(s1, 8), b = taylor_coefficients(s2, 8);
  for (std::size_t n = 0; n <= 8; ++n) CHECK(classify(a[n] - b[n]).kind == NetKind::Null);
}

TEST_CASE("taylor evaluation") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet zero = GenNet::constant(g, cd(0.0, 0.0));
  const ContourSetup s = ContourSetup::make(rep(g, "1/(1 - z)", 0.6), circle(g, "0.5", Box::cube(2, -0.5, 0.5)), zero);
  const auto a = taylor_coefficients(s, 60);
  const TaylorReport t = taylor_eval(s, a, scale(alpha(1.0, g), cd(0.5, 0.0)));
  CHECK(t.gap_class.kind == NetKind::Null);
  CHECK(t.terms_used >= 2);
  // A classical point at distance d/2 of z0 is admitted through the ratio rule.
  const TaylorReport u = taylor_eval(s, a, GenNet::constant(g, cd(0.0, 0.2)));
  CHECK(u.terms_used > 2);
  CHECK_THROWS_AS(taylor_eval(s, a, GenNet::constant(g, cd(0.4, 0.0))), DivergenceRisk);
}
