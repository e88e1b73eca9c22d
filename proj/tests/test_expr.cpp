#include <cmath>
#include <random>
#include <string>

#include <doctest.h>

#include "mcalc/errors.hpp"
#include "mcalc/expr.hpp"

using namespace mcalc;

namespace {

double ev(const Expr& e, std::initializer_list<double> env) {
  std::vector<double> v(env);
  return e.eval(std::span<const double>(v));
}

// Random smooth tree in x1, x2 and eps. Division only by 2 + u^2, powers
// only small integers, so every tree is C^2 everywhere.
std::string random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
  switch (pick(rng)) {
    case 0: return "x1";
    case 1: return "x2";
    case 2: {
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", std::fabs(u(rng)));
      return buf;
    }
    case 3: return "(" + random_tree(rng, depth - 1) + " + " + random_tree(rng, depth - 1) + ")";
    case 4: return "(" + random_tree(rng, depth - 1) + " - " + random_tree(rng, depth - 1) + ")";
    case 5: return "(" + random_tree(rng, depth - 1) + " * " + random_tree(rng, depth - 1) + ")";
    case 6: return "sin(" + random_tree(rng, depth - 1) + ")";
    case 7: return "cos(" + random_tree(rng, depth - 1) + ")";
    case 8: {
      const std::string u = random_tree(rng, depth - 1);
      return "(" + random_tree(rng, depth - 1) + ")/(2 + (" + u + ")^2)";
    }
    case 9: return "(" + random_tree(rng, depth - 1) + ")^2";
    default: return "exp(sin(" + random_tree(rng, depth - 1) + "))*eps";
  }
}

}  // namespace

TEST_CASE("parse and evaluate") {
  const Expr e = parse("x1^2 + eps", {"x1"});
  CHECK(ev(e, {2.0, 0.5}) == doctest::Approx(4.5));
  CHECK(ev(parse("sin(x1)/eps", {"x1"}), {0.0, 0.1}) == 0.0);
  CHECK(ev(parse("exp(x1)", {"x1"}), {0.0, 1.0}) == 1.0);
  CHECK(ev(parse("1/(1 - x1)", {"x1"}), {0.5, 1.0}) == doctest::Approx(2.0));
  CHECK(ev(parse("2^3^2", {}), {1.0}) == doctest::Approx(512.0));
  CHECK(ev(parse("-x1^2", {"x1"}), {3.0, 1.0}) == doctest::Approx(9.0));
  CHECK(ev(parse("1 - 2 - 3", {}), {1.0}) == doctest::Approx(-4.0));
  CHECK(ev(parse("8/4/2", {}), {1.0}) == doctest::Approx(1.0));
  CHECK(ev(parse("pi", {}), {1.0}) == doctest::Approx(3.141592653589793));
  CHECK(ev(parse("1.5e-3*x1", {"x1"}), {2.0, 1.0}) == doctest::Approx(3e-3));
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse("x1 +", {"x1"});
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS(parse("", {}), SyntaxError);
  CHECK_THROWS_AS(parse("(x1", {"x1"}), SyntaxError);
  CHECK_THROWS_AS(parse("x1 x1", {"x1"}), SyntaxError);
  CHECK_THROWS_AS(parse("foo(x1)", {"x1"}), InputError);
}

TEST_CASE("undeclared variables are named") {
  try {
    parse("x1 + y", {"x1"});
    FAIL("expected an undeclared variable");
  } catch (const UndeclaredVariable& e) {
    CHECK(e.name() == "y");
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(ev(parse("log(x1)", {"x1"}), {-1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(ev(parse("1/x1", {"x1"}), {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(ev(parse("x1^0.5", {"x1"}), {-2.0, 1.0}), DomainError);
  CHECK(ev(parse("x1^3", {"x1"}), {-2.0, 1.0}) == doctest::Approx(-8.0));
  CHECK_THROWS_AS(ev(parse("abs(x1)", {"x1"}).differentiate("x1"), {0.0, 1.0}), DomainError);
  try {
    ev(parse("1 + log(x1 - 2)", {"x1"}), {1.0, 1.0});
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("log") != std::string::npos);
  }
}

TEST_CASE("complex mode") {
  const Expr e = parse("exp(i*pi) + 1", {});
  CHECK(e.uses_complex());
  const Value v = e.eval(Env{{"eps", 0.5}});
  CHECK(v.complex);
  CHECK(std::abs(v.z) < 1e-15);
  const Expr z2 = parse("z^2", {"z"});
  const std::complex<double> env[2] = {{0.0, 1.0}, {0.1, 0.0}};
  CHECK(std::abs(z2.eval(std::span<const std::complex<double>>(env, 2)) + 1.0) < 1e-15);
  CHECK(z2.eval(Env{{"z", {0.0, 2.0}}, {"eps", 0.1}}).complex);
  CHECK_THROWS_AS(ev(parse("re(i)", {}), {1.0}), DomainError);
}

TEST_CASE("symbolic derivatives") {
  const Expr e = parse("x1^2 * sin(x1)", {"x1"});
  const Expr d = e.differentiate("x1");
  for (double x : {-1.3, 0.2, 2.7})
    CHECK(ev(d, {x, 0.1}) == doctest::Approx(2 * x * std::sin(x) + x * x * std::cos(x)).epsilon(1e-13));
  const Expr lin = parse("eps * x1", {"x1"}).differentiate("x1");
  CHECK(ev(lin, {3.0, 0.25}) == 0.25);
  CHECK(lin.str() == "eps");
  const Expr ch = parse("sin(t/eps)", {"t"}).differentiate("t");
  CHECK(ev(ch, {0.3, 0.1}) == doctest::Approx(std::cos(3.0) / 0.1).epsilon(1e-13));
  CHECK(parse("eps + 3", {"x1"}).differentiate("x1").is_zero());
}

TEST_CASE("derivatives agree with central differences on random trees") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int tree = 0; tree < 60; ++tree) {
    const std::string text = random_tree(rng, 6);
    const Expr e = parse(text, {"x1", "x2"});
    for (const char* v : {"x1", "x2"}) {
      const Expr d = e.differentiate(v);
      const std::size_t idx = v[1] == '1' ? 0 : 1;
      for (int p = 0; p < 100; ++p) {
        double env[3] = {u(rng), u(rng), 0.5 + 0.5 * std::fabs(u(rng))};
        const double h = 1e-6;
        double plus[3] = {env[0], env[1], env[2]}, minus[3] = {env[0], env[1], env[2]};
        plus[idx] += h;
        minus[idx] -= h;
        const double fd = (e.eval(std::span<const double>(plus, 3)) - e.eval(std::span<const double>(minus, 3))) / (2 * h);
        const double sym = d.eval(std::span<const double>(env, 3));
        // Central differences at 1e-6 carry ~1e-10 |f| / h rounding.
        const double scale = std::max({1.0, std::fabs(sym), std::fabs(e.eval(std::span<const double>(env, 3)))});
        INFO(text, " d/d", v);
        CHECK(std::fabs(fd - sym) <= 1e-5 * scale);
        ++checked;
      }
    }
  }
  CHECK(checked == 60 * 2 * 100);
}

TEST_CASE("print then parse evaluates identically") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int tree = 0; tree < 40; ++tree) {
    const Expr e = parse(random_tree(rng, 5), {"x1", "x2"});
    const Expr back = parse(print(e), {"x1", "x2"});
    for (int p = 0; p < 100; ++p) {
      const double env[3] = {u(rng), u(rng), 0.5 + 0.4 * u(rng)};
      CHECK(back.eval(std::span<const double>(env, 3)) == e.eval(std::span<const double>(env, 3)));
    }
  }
  for (const char* s : {"-x1^2", "(-x1)^2", "-(x1^2)", "2^3^2", "(2^3)^2", "1 - (2 - 3)", "x1/(x2*eps)", "-(-x1)"}) {
    const Expr e = parse(s, {"x1", "x2"});
    const double env[3] = {1.7, -0.3, 0.2};
    CHECK(parse(print(e), {"x1", "x2"}).eval(std::span<const double>(env, 3)) == e.eval(std::span<const double>(env, 3)));
  }
}

TEST_CASE("composition and combination") {
  const Expr outer = parse("x1^2 + x2", {"x1", "x2"});
  const Expr inner[2] = {parse("t + eps", {"t"}), parse("3*t", {"t"})};
  const Expr c = compose(outer, inner);
  CHECK(ev(c, {2.0, 0.5}) == doctest::Approx(2.5 * 2.5 + 6.0));
  const Expr a = parse("x1", {"x1"}), b = parse("eps", {"x1"});
  CHECK(ev(combine(Op::Mul, a, b), {3.0, 0.5}) == doctest::Approx(1.5));
}
