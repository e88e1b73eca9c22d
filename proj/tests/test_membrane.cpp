#include <cmath>
#include <memory>
#include <numbers>

#include <doctest.h>

#include "mcalc/membrane.hpp"

using namespace mcalc;

namespace {

const double kPi = std::numbers::pi;
using S = std::vector<std::string>;

GenNet vec(const GridPtr& g, std::initializer_list<double> xs) {
  std::vector<GenNet> c;
  for (double x : xs) c.push_back(GenNet::constant(g, x));
  return GenNet::vector(c);
}

}  // namespace

TEST_CASE("interval and box volumes") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet v = volume(PreMembrane::interval(GenNet::constant(g, 0.0), alpha(1.0, g), Box::cube(1, 0, 1)));
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(v.real(k) == doctest::Approx((*g)[k]));
  const NetClass c = classify(v);
  CHECK(c.kind == NetKind::Invertible);
  CHECK(c.estimated_valuation == doctest::Approx(1.0).epsilon(1e-9));

  const PreMembrane B = PreMembrane::box({{GenNet::constant(g, -1.0), GenNet::constant(g, 1.0)},
                                          {GenNet::constant(g, 0.0), alpha(2.0, g)}},
                                         Box::cube(2, -1, 1));
  CHECK(B.variant_name() == "box");
  const GenNet bv = volume(B);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(bv.real(k) == doctest::Approx(2 * (*g)[k] * (*g)[k]));
}

TEST_CASE("ball volumes are exact in dimensions 1 to 3") {
  const GridPtr g = EpsilonGrid::standard();
  const GenNet r = scale(alpha(0.5, g), 0.8);
  const GenNet v1 = volume(PreMembrane::ball(GenNet::constant(g, 0.1), r, Box::cube(1, -1, 1)));
  const GenNet v2 = volume(PreMembrane::ball(vec(g, {0.1, 0.2}), r, Box::cube(2, -1, 1)));
  const GenNet v3 = volume(PreMembrane::ball(vec(g, {0.1, 0.2, -0.3}), r, Box::cube(3, -1, 1)));
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double rk = r.real(k);
    CHECK(v1.real(k) == doctest::Approx(2 * rk).epsilon(1e-12));
    CHECK(v2.real(k) == doctest::Approx(kPi * rk * rk).epsilon(1e-12));
    CHECK(v3.real(k) == doctest::Approx(4.0 / 3.0 * kPi * rk * rk * rk).epsilon(1e-12));
  }
}

TEST_CASE("membrane validation") {
  const GridPtr g = EpsilonGrid::standard();
  CHECK_THROWS_AS(PreMembrane::interval(GenNet::constant(g, 1.0), GenNet::constant(g, 0.0), Box::cube(1, -2, 2)),
                  CompactnessError);
  CHECK_THROWS_AS(PreMembrane::interval(GenNet::constant(g, 0.0), alpha(-1.0, g), Box::cube(1, 0, 1)),
                  CompactnessError);
  CHECK_THROWS_AS(PreMembrane::ball(vec(g, {0.0, 0.0}), GenNet::constant(g, 2.0), Box::cube(2, -1, 1)),
                  CompactnessError);
  CHECK_THROWS_AS(PreMembrane::ball(vec(g, {0.0, 0.0}), GenNet::constant(g, -0.5), Box::cube(2, -1, 1)),
                  CompactnessError);
  CHECK_THROWS_AS(PreMembrane::indicator("x1^2 + x2^2 - 1", Box::cube(2, -2, 2), Box::cube(2, -1, 1), g), InputError);
  CHECK_THROWS_AS(PreMembrane::indicator("x1 + y", Box::cube(1, -1, 1), Box::cube(1, -1, 1), g), InputError);
  CHECK_THROWS_AS(PreMembrane::indicator("x1+x2+x3+x4", Box::cube(4, -1, 1), Box::cube(4, -1, 1), g), InputError);
}

TEST_CASE("indicator volumes") {
  const GridPtr g = EpsilonGrid::decades(4, 24, 4.0, 8);
  const PreMembrane I = PreMembrane::indicator("x1^2 - eps", Box::cube(1, -1, 1), Box::cube(1, -1, 1), g);
  const GenNet v1 = volume(I);
  for (std::size_t k = 0; k < g->size(); ++k)
    CHECK(std::fabs(v1.real(k) - 2 * std::sqrt((*g)[k])) <= 1e-6 + 2 * v1.floor(k));

  const PreMembrane D = PreMembrane::indicator("x1^2 + x2^2 - 0.5", Box::cube(2, -1, 1), Box::cube(2, -1, 1), g);
  const GenNet v2 = volume(D);
  for (std::size_t k = 0; k < g->size(); ++k) {
    CHECK(std::fabs(v2.real(k) - kPi * 0.5) <= v2.floor(k) + 1e-9);
    CHECK(v2.floor(k) < 1e-2);
  }
}

TEST_CASE("null perturbations") {
  const GridPtr g = EpsilonGrid::standard();
  const auto P = NullPerturbation::make(S{"exp(-1/eps)*x1"}, Box::cube(1, -2, 2), g);
  CHECK(P.certificate().kind == NetKind::Null);
  CHECK(P.is_affine());
  CHECK(!P.is_zero());
  CHECK(NullPerturbation::make(S{"0", "0"}, Box::cube(2, -1, 1), g).is_zero());
  CHECK_THROWS_AS(NullPerturbation::make(S{"eps*x1"}, Box::cube(1, -1, 1), g), HypothesisError);
  CHECK_THROWS_AS(NullPerturbation::make(S{"x2"}, Box::cube(1, -1, 1), g), InputError);

  const auto N = NullPerturbation::make(S{"exp(-1/eps)*sin(x1)*x2", "exp(-1/eps)*x1^2"}, Box::cube(2, -1, 1), g);
  CHECK(!N.is_affine());
  const double x[2] = {0.4, -0.2};
  double y[2], back[2];
  N.push(0.5, x, y);
  REQUIRE(N.pull(0.5, y, back));
  CHECK(back[0] == doctest::Approx(x[0]).epsilon(1e-12));
  CHECK(back[1] == doctest::Approx(x[1]).epsilon(1e-12));

  const auto Sc = NullPerturbation::make(S{"exp(-1/eps)*x1", "exp(-1/eps)*x2"}, Box::cube(2, -1, 1), g);
  CHECK(Sc.jacobian_is_scalar());
  CHECK(Sc.jacobian_is_diagonal());
}

TEST_CASE("perturbing a membrane leaves its volume unchanged up to a null net") {
  const GridPtr g = EpsilonGrid::standard();
  const PreMembrane I = PreMembrane::interval(GenNet::constant(g, 0.0), alpha(1.0, g), Box::cube(1, -1, 2));
  const auto P = std::make_shared<const NullPerturbation>(
      NullPerturbation::make(S{"exp(-1/eps)*(1 + x1)"}, Box::cube(1, -1, 2), g));
  const PreMembrane J = perturb(I, P);
  CHECK(J.variant_name() == "interval");
  CHECK(classify(volume(J) - volume(I)).kind == NetKind::Null);

  const auto Q = std::make_shared<const NullPerturbation>(
      NullPerturbation::make(S{"exp(-1/eps)*x1^2"}, Box::cube(1, -1, 2), g));
  const PreMembrane K = perturb(I, Q);
  CHECK(K.variant_name() == "indicator");
  CHECK(classify(volume(K) - volume(I)).kind == NetKind::Null);

  const PreMembrane Bm = PreMembrane::ball(vec(g, {0.0, 0.0}), GenNet::constant(g, 0.5), Box::cube(2, -1, 1));
  const auto R = std::make_shared<const NullPerturbation>(
      NullPerturbation::make(ball_map_psi({"0", "0"}, "0.5", {"exp(-1/eps)", "0"}, "0.5 + exp(-1/eps)"),
                             Box::cube(2, -1, 1), g));
  const PreMembrane Bp = perturb(Bm, R);
  CHECK(Bp.variant_name() == "ball");
  CHECK(classify(volume(Bp) - volume(Bm)).kind == NetKind::Null);
}

TEST_CASE("ball map sends one ball onto the other") {
  const auto psi = ball_map_psi({"1", "2"}, "3", {"0", "-1"}, "0.5");
  const GridPtr g = EpsilonGrid::standard();
  std::vector<Expr> e;
  for (const auto& s : psi) e.push_back(parse(s, {"x1", "x2"}));
  // Center goes to center, a boundary point to a boundary point.
  const double c[3] = {1, 2, 0.1}, b[3] = {4, 2, 0.1};
  CHECK(c[0] + e[0].eval(c) == doctest::Approx(0.0));
  CHECK(c[1] + e[1].eval(c) == doctest::Approx(-1.0));
  CHECK(b[0] + e[0].eval(b) == doctest::Approx(0.5));
  CHECK(b[1] + e[1].eval(b) == doctest::Approx(-1.0));
}

TEST_CASE("history image") {
  const GridPtr g = EpsilonGrid::standard();
  const History seg = History::make(std::vector<std::string>{"eps*t", "0"}, Growth{1.0, 0}, HistoryFlags{},
                                    Box::cube(2, -1, 1), g);
  const PreMembrane T = history_image(seg);
  CHECK(T.variant_name() == "trace");
  const GenNet d = trace_diameter(T);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(d.real(k) == doctest::Approx((*g)[k]).epsilon(1e-6));
  const GenNet v = volume(T);
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(v.real(k) == 0.0);

  const History pt = History::make(std::vector<std::string>{"0.3 + eps*t"}, Growth{1.0, 0}, HistoryFlags{},
                                   Box::cube(1, 0, 1), g);
  const GenNet v1 = volume(history_image(pt));
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(v1.real(k) == doctest::Approx((*g)[k]));
}
