#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "mcalc/gennum.hpp"

using namespace mcalc;

namespace {

GenNet net(const GridPtr& g, double (*f)(double)) { return GenNet::from_function(g, f); }

}  // namespace

TEST_CASE("grid construction") {
  const GridPtr g = EpsilonGrid::standard();
  CHECK(g->size() == 45);
  CHECK(g->tail_len() == 16);
  CHECK((*g)[0] == doctest::Approx(0.1));
  CHECK((*g)[44] == doctest::Approx(1e-12));
  CHECK_THROWS_AS(EpsilonGrid({0.5, 0.5, 0.1, 0.01}, 4), InputError);
  CHECK_THROWS_AS(EpsilonGrid({1.5, 0.5, 0.1, 0.01}, 4), InputError);
  CHECK_THROWS_AS(EpsilonGrid({0.5, 0.1, 0.01}, 4), InputError);
  CHECK_THROWS_AS(EpsilonGrid({0.5, 0.1, 0.01, 0.001}, 3), InputError);
}

TEST_CASE("alpha gauge") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet a1 = alpha(1.0, g);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(a1.real(k) == (*g)[k]);
  const GenNet a0 = alpha(0.0, g);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(a0.real(k) == 1.0);
  CHECK(classify(alpha(2.5, g)).estimated_valuation == doctest::Approx(2.5).epsilon(1e-9));
  const GridPtr h = std::make_shared<const EpsilonGrid>(std::vector<double>{0.1, 0.01, 0.001, 0.0001}, 4);
  CHECK(alpha(1.0, h).real(1) == 0.01);
}

TEST_CASE("arithmetic") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet p = alpha(1.0, g) * alpha(2.0, g), a3 = alpha(3.0, g);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(p.real(k) == doctest::Approx(a3.real(k)).epsilon(1e-15));
  const GenNet a = GenNet::from_function(g, [](double e) { return 2.0 + std::sin(e); });
  CHECK(classify(a / a - GenNet::constant(g, 1.0)).kind == NetKind::Null);
  const GenNet m = abs(GenNet::from_function(g, [](double e) { return -e; }));
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(m.real(k) == (*g)[k]);
  const GenNet n = -alpha(1.0, g);
  CHECK(n.real(3) == -(*g)[3]);
  CHECK(scale(alpha(1.0, g), 2.0).real(5) == 2.0 * (*g)[5]);
}

TEST_CASE("division needs an invertible divisor") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet null = GenNet::from_function(g, [](double e) { return std::exp(-1.0 / e); });
  try {
    (void)(alpha(1.0, g) / null);
    FAIL("expected an invertibility error");
  } catch (const InvertibilityError& e) {
    CHECK(e.net_class().kind == NetKind::Null);
  }
  CHECK_THROWS_AS((void)(alpha(1.0, g) / net(g, [](double e) { return std::sin(1.0 / e); })), InvertibilityError);
  const GenNet q = alpha(1.0, g) / alpha(3.0, g);
  CHECK(classify(q).estimated_valuation == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("grid mismatch is rejected") {
  const GridPtr g = EpsilonGrid::standard();
  const GridPtr h = EpsilonGrid::decades(4, 40, 4.0, 16);
  CHECK_THROWS_AS((void)(alpha(1.0, g) + alpha(1.0, h)), Error);
}

TEST_CASE("classification") {
  const GridPtr g = EpsilonGrid::standard();
  CHECK(classify(net(g, [](double e) { return std::exp(-1.0 / e); })).kind == NetKind::Null);
  const NetClass c3 = classify(net(g, [](double e) { return e * e * e; }));
  CHECK(c3.kind == NetKind::Invertible);
  CHECK(c3.estimated_valuation == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(classify(net(g, [](double e) { return std::sin(1.0 / e); })).kind == NetKind::Moderate);
  CHECK(classify(GenNet::constant(g, 0.0)).kind == NetKind::Null);
  CHECK(classify(net(g, [](double e) { return std::exp(1.0 / e); })).kind == NetKind::Indeterminate);
  // Zeros interleaved with nonzero samples.
  GenNet z = alpha(1.0, g);
  z.set(g->tail_begin() + 3, 0.0);
  CHECK(classify(z).kind == NetKind::Indeterminate);
  // The non-invertible element x = [(1/-ln eps)] ~ 0 with norm 1: not a power law, but not null.
  const NetClass inv = classify(net(g, [](double e) { return -1.0 / std::log(e); }));
  CHECK(inv.kind != NetKind::Null);
  CHECK(associated(net(g, [](double e) { return -1.0 / std::log(e); }), GenNet::constant(g, 0.0)));
  CHECK(!associated(GenNet::constant(g, 1.0), GenNet::constant(g, 0.0)));
  // Vector nets classify through their magnitude.
  const GenNet v[2] = {alpha(2.0, g), alpha(2.0, g)};
  const NetClass vc = classify(GenNet::vector(v));
  CHECK(vc.kind == NetKind::Invertible);
  CHECK(vc.estimated_valuation == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("classification properties") {
  const GridPtr g = EpsilonGrid::standard();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(-5.0, 5.0), uc(0.1, 50.0);
  for (int i = 0; i < 30; ++i) {
    const double r = ur(rng), s = ur(rng), c = uc(rng) * (i % 2 ? -1.0 : 1.0);
    const GenNet p = alpha(r, g) * alpha(s, g), q = alpha(r + s, g);
    for (std::size_t k = 0; k < g->size(); ++k) CHECK(std::fabs(p.real(k) - q.real(k)) <= 1e-12 * q.real(k));
    CHECK(std::fabs(classify(p).estimated_valuation - (r + s)) <= 1e-6);
    const NetClass a = classify(alpha(r, g)), b = classify(scale(alpha(r, g), c));
    CHECK(std::fabs(a.estimated_valuation - b.estimated_valuation) <= 1e-6);
    CHECK(a.kind == b.kind);
    CHECK(sharp_norm(alpha(r, g) * alpha(s, g)) <= sharp_norm(alpha(r, g)) * sharp_norm(alpha(s, g)) + 1e-9);
  }
  const GenNet null = net(g, [](double e) { return std::exp(-1.0 / e); });
  for (int N = 0; N <= 10; ++N) CHECK(classify(null * alpha(-N, g)).kind == NetKind::Null);
}

TEST_CASE("sharp norm") {
  const GridPtr g = EpsilonGrid::standard();
  CHECK(sharp_norm(alpha(1.0, g)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(sharp_norm(net(g, [](double e) { return 0.5 / e; })) == doctest::Approx(std::numbers::e).epsilon(1e-9));
  CHECK(sharp_norm(GenNet::constant(g, 0.0)) == 0.0);
  CHECK_THROWS_AS(sharp_norm(net(g, [](double e) { return std::exp(1.0 / e); })), NormUndefined);
}

TEST_CASE("distance and balls") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet x = GenNet::constant(g, 0.3);
  CHECK(classify(gen_distance(x, x)).kind == NetKind::Null);
  const GenNet d = gen_distance(alpha(1.0, g), GenNet::constant(g, 0.0));
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(d.real(k) == (*g)[k]);
  const GenNet d1 = gen_distance(alpha(1.0, g), scale(alpha(1.0, g), 2.0));
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(d1.real(k) == doctest::Approx((*g)[k]));
  CHECK(in_ball(x + alpha(2.0, g), x, 1.0));
  CHECK(!in_ball(x + alpha(0.5, g), x, 1.0));
  CHECK(in_ball(x + alpha(1.0, g), x, 1.0));
  CHECK(equal(x + GenNet::from_function(g, [](double e) { return std::exp(-1.0 / e); }), x));
  CHECK(!equal(alpha(3.0, g), GenNet::constant(g, 0.0)));
}

TEST_CASE("polynomial growth") {
  const GridPtr g = EpsilonGrid::standard();
  CHECK(has_polynomial_growth(alpha(-20.0, g)));
  CHECK(!has_polynomial_growth(net(g, [](double e) { return std::exp(1.0 / std::sqrt(e)); })));
  CHECK(has_polynomial_growth(GenNet::constant(g, 0.0)));
}
