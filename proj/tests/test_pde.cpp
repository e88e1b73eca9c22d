#include <cmath>

#include <doctest.h>

#include "mcalc/pde.hpp"

using namespace mcalc;

namespace {

Representative rep(const GridPtr& g, const std::string& s, std::size_t n = 1) {
  return Representative::make(s, n, Box::cube(n, -10, 10), Codomain::Real, g);
}

std::vector<Probe> probes(const GridPtr& g) {
  std::vector<Probe> p;
  for (double x : {-1.3, 0.2, 2.1})
    for (double t : {0.4, 1.5}) p.push_back({GenNet::constant(g, x), GenNet::constant(g, t)});
  return p;
}

}  // namespace

TEST_CASE("transport with a generalized speed") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet b = alpha(1.0, g);
  const TransportSolution s = transport_solve({1, b, rep(g, "cos(x1)"), std::nullopt, 1.0});
  const double x = 0.3;
  for (std::size_t k = 0; k < g->size(); ++k)
    CHECK(s.value(k, std::span<const double>(&x, 1), 2.0) == doctest::Approx(std::cos(0.3 - 2.0 * (*g)[k])));
  CHECK(residual_check(s.evaluator(), s.problem(), probes(g)).scaled_class.kind == NetKind::Null);
}

TEST_CASE("two-dimensional transport") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet bc[2] = {GenNet::constant(g, 1.0), scale(alpha(0.5, g), -2.0)};
  const TransportSolution s = transport_solve({2, GenNet::vector(bc), rep(g, "sin(x1)*x2", 2), std::nullopt, 1.0});
  const double x[2] = {0.5, 1.0};
  const double e = (*g)[10];
  CHECK(s.value(10, x, 0.7) == doctest::Approx(std::sin(0.5 - 0.7) * (1.0 + 0.7 * 2.0 * std::sqrt(e))));
  std::vector<Probe> p;
  const GenNet pc[2] = {GenNet::constant(g, 0.5), GenNet::constant(g, -0.4)};
  p.push_back({GenNet::vector(pc), GenNet::constant(g, 0.9)});
  CHECK(residual_check(s.evaluator(), s.problem(), p).scaled_class.kind == NetKind::Null);
}

TEST_CASE("superposition") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet b = GenNet::constant(g, 0.7);
  Box fdom({{-10, 10}, {-1, 10}});
  const auto f = Representative::make("x1*t + eps", 2, fdom, Codomain::Real, g, {"x1", "t"});
  const TransportSolution s1 = transport_solve({1, b, rep(g, "sin(x1)"), std::nullopt, 1.0});
  const TransportSolution s2 = transport_solve({1, b, rep(g, "0"), f, 1.0});
  const TransportSolution s12 = transport_solve({1, b, rep(g, "sin(x1)"), f, 1.0});
  for (double x : {-0.4, 1.1})
    for (double t : {0.3, 2.0})
      for (std::size_t k = 0; k < g->size(); k += 7) {
        const double a = s1.value(k, std::span<const double>(&x, 1), t) + s2.value(k, std::span<const double>(&x, 1), t);
        CHECK(s12.value(k, std::span<const double>(&x, 1), t) == doctest::Approx(a).epsilon(1e-13));
      }
}

TEST_CASE("uniqueness up to null nets") {
  const GridPtr g = EpsilonGrid::standard();
  const TransportSolution s = transport_solve({1, GenNet::constant(g, 1.0), rep(g, "sin(x1)"), std::nullopt, 1.0});
  const Evaluator other = [&](std::size_t k, std::span<const double> x, double t) {
    return std::sin(x[0] - t) + std::exp(-1.0 / (*g)[k]);
  };
  // Another solution with null-equal data differs from the solver by a null net.
  CHECK(residual_check(other, s.problem(), probes(g)).scaled_class.kind == NetKind::Null);
  for (const Probe& p : probes(g)) {
    GenNet d = GenNet::constant(g, 0.0);
    for (std::size_t k = 0; k < g->size(); ++k) {
      const double x = p.x.real(k);
      d.set(k, other(k, std::span<const double>(&x, 1), p.t.real(k)) - s.value(k, std::span<const double>(&x, 1), p.t.real(k)));
    }
    CHECK(classify(d).kind == NetKind::Null);
  }
  const Evaluator wrong = [](std::size_t, std::span<const double> x, double t) { return std::sin(x[0] - 1.01 * t); };
  CHECK(residual_check(wrong, s.problem(), probes(g)).scaled_class.kind != NetKind::Null);
}

TEST_CASE("probes too close to t = 0 are rejected") {
  const GridPtr g = EpsilonGrid::standard();
  const TransportSolution s = transport_solve({1, GenNet::constant(g, 1.0), rep(g, "x1"), std::nullopt, 1.0});
  std::vector<Probe> p = {{GenNet::constant(g, 0.0), GenNet::constant(g, 1e-6)}};
  CHECK_THROWS_AS(residual_check(s.evaluator(), s.problem(), p), HypothesisError);
}

TEST_CASE("wave equation") {
  const GridPtr g = EpsilonGrid::standard();
  const WaveSolution w = wave_solve({rep(g, "0"), rep(g, "cos(x1)"), g});
  for (std::size_t k = 0; k < g->size(); k += 5) CHECK(w.value(k, 0.4, 0.9) == doctest::Approx(std::cos(0.4) * std::sin(0.9)));
  CHECK(residual_check(w.evaluator(), w.problem(), probes(g)).scaled_class.kind == NetKind::Null);

  const WaveSolution e = wave_solve({rep(g, "sin(x1/eps)*eps"), rep(g, "0"), g});
  for (std::size_t k = 0; k < g->size(); k += 11) {
    const double eps = (*g)[k];
    CHECK(e.value(k, 0.1, 0.2) == doctest::Approx(eps * std::sin(0.1 / eps) * std::cos(0.2 / eps)));
  }
}

TEST_CASE("finite propagation speed and energy conservation") {
  const GridPtr g = EpsilonGrid::decades(4, 12, 4.0, 4);
  const Representative bump = windowed_bump(Box::cube(1, -10, 10), g);
  const WaveSolution w = wave_solve({bump, rep(g, "0"), g});
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(w.value(0, 1.0 + t + 0.01, t) == 0.0);
    CHECK(w.value(0, -1.0 - t - 0.01, t) == 0.0);
    CHECK(w.value(0, t, t) != 0.0);
  }
  const double e0 = w.energy(0, 0.0, 5.0), e1 = w.energy(0, 1.5, 5.0);
  CHECK(e0 > 0.0);
  CHECK(e1 == doctest::Approx(e0).epsilon(1e-6));
}
