#include <catch2/catch_amalgamated.hpp>

#include "jetsym/normalize.hpp"
#include "jetsym/parser.hpp"
#include "support/test_helpers.hpp"

using namespace jetsym;
using namespace jetsym::testing;

namespace {

Polynomial poly(const std::string& src) {
  RationalForm rf = to_rational_form(P(src));
  REQUIRE(rf.den.is_one());
  return rf.num;
}

}  // namespace

TEST_CASE("graded-lex ordering puts higher degree first") {
  Polynomial p = poly("x + z*x*x_z + x^2");
  REQUIRE(p.terms().size() == 3);
  REQUIRE(p.terms()[0].first.total_degree() == 3);  // z*x*x_z
  REQUIRE(p.terms()[1].first.total_degree() == 2);  // x^2
  REQUIRE(p.terms()[2].first.total_degree() == 1);  // x
}

TEST_CASE("arithmetic basics") {
  REQUIRE(poly("(x+1)*(x-1)") == poly("x^2 - 1"));
  REQUIRE((poly("x+z") * poly("x+z")) == poly("x^2 + 2*z*x + z^2"));
  REQUIRE(poly("x").pow(3) == poly("x^3"));
  REQUIRE((poly("x") - poly("x")).is_zero());
  REQUIRE(poly("3*x").derivative(kX) == poly("3"));
  REQUIRE(poly("z*x^2").derivative(kX) == poly("2*z*x"));
  REQUIRE(poly("z*x^2").derivative(kT).is_zero());
}

TEST_CASE("content and primitive part") {
  Polynomial p = poly("4*x + 6*z");
  REQUIRE(p.content() == Rational(2));
  REQUIRE(p.primitive_part() == poly("2*x + 3*z"));
  Polynomial n = poly("-4*x - 6*z");
  REQUIRE(n.content() == Rational(-2));  // sign follows the leading coefficient
  REQUIRE(n.primitive_part() == poly("2*x + 3*z"));
  // Fractional coefficients: content is gcd(numerators)/lcm(denominators).
  Polynomial fractional = poly("3*x + 2").scaled(Rational(1, 6));  // x/2 + 1/3
  REQUIRE(fractional.content() == Rational(1, 6));
  REQUIRE(fractional.primitive_part() == poly("3*x + 2"));
}

TEST_CASE("exact division") {
  REQUIRE(exact_divide(poly("x^2 - 1"), poly("x - 1")) == poly("x + 1"));
  REQUIRE(exact_divide(poly("z*x^3*x_zz"), poly("x^2")) == poly("z*x*x_zz"));
  REQUIRE_THROWS_AS(exact_divide(poly("x^2 + 1"), poly("x - 1")), AlgebraError);
  REQUIRE_THROWS_AS(exact_divide(poly("x"), Polynomial::zero()), AlgebraError);
}

TEST_CASE("gcd: monomials, univariate, multivariate") {
  REQUIRE(poly_gcd(poly("x^2*z"), poly("x^3")) == poly("x^2"));
  REQUIRE(poly_gcd(poly("x^2 - 1"), poly("x^2 + 2*x + 1")) == poly("x + 1"));
  REQUIRE(poly_gcd(poly("x^2 + 1"), poly("x - 7")).is_one());
  // Common multivariate factor.
  Polynomial g = poly("x + z*x_z + 1");
  Polynomial a = g * poly("x^2 - z");
  Polynomial b = g * poly("x_z + 3");
  REQUIRE(poly_gcd(a, b) == g);
  // gcd of zero.
  REQUIRE(poly_gcd(Polynomial::zero(), poly("2*x")) == poly("x"));
  REQUIRE(poly_gcd(poly("-3*x"), Polynomial::zero()) == poly("x"));
}

TEST_CASE("gcd on random products recovers a common factor") {
  RandomExpr gen(31415926);
  for (int i = 0; i < 40; ++i) {
    Polynomial g = to_rational_form(normalize(gen.gen_poly(2))).num;
    Polynomial a = to_rational_form(normalize(gen.gen_poly(2))).num;
    Polynomial b = to_rational_form(normalize(gen.gen_poly(2))).num;
    if (g.is_zero() || a.is_zero() || b.is_zero()) continue;
    Polynomial d = poly_gcd(g * a, g * b);
    // d is divisible by the primitive part of g.
    Polynomial quotient = exact_divide(d, poly_gcd(d, g.primitive_part()));
    REQUIRE(poly_gcd(d, g.primitive_part()) == g.primitive_part());
    // And d divides both products exactly.
    REQUIRE_NOTHROW(exact_divide(g * a, d));
    REQUIRE_NOTHROW(exact_divide(g * b, d));
    (void)quotient;
  }
}

TEST_CASE("polynomial evaluation matches expression evaluation") {
  RandomExpr gen(271828);
  for (int i = 0; i < 60; ++i) {
    ExprPtr e = gen.gen_poly(3);
    RationalForm rf = to_rational_form(e);
    REQUIRE(rf.den.is_constant());
    std::map<Sym, Rational> point;
    if (!random_point(gen, {e}, point)) continue;
    REQUIRE(rf.num.evaluate(point) / rf.den.constant_value() == evaluate(e, point));
  }
}
