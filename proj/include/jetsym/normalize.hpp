#pragma once

#include <utility>

#include "jetsym/expression.hpp"
#include "jetsym/polynomial.hpp"

namespace jetsym {

/// Canonical rational form p/q:
///   - p, q expanded, terms in descending graded-lexicographic order;
///   - gcd(p, q) = 1 as polynomials;
///   - p, q have integer, jointly coprime coefficients;
///   - the leading coefficient of q is positive (q = 1 for polynomials).
/// Algebraically equal expressions produce identical forms.
struct RationalForm {
  Polynomial num;
  Polynomial den = Polynomial::one();

  bool is_zero() const { return num.is_zero(); }

  friend bool operator==(const RationalForm&, const RationalForm&) = default;
};

namespace detail {

inline RationalForm make_canonical(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw AlgebraError("division by the zero polynomial");
  if (num.is_zero()) return {Polynomial::zero(), Polynomial::one()};
  Polynomial g = poly_gcd(num, den);
  if (!g.is_one()) {
    num = exact_divide(num, g);
    den = exact_divide(den, g);
  }
  Rational cn = num.content();
  Rational cd = den.content();
  Rational ratio = cn / cd;  // cd != 0 since den != 0
  Polynomial p = num.primitive_part().scaled(Rational(numerator(ratio)));
  Polynomial q = den.primitive_part().scaled(Rational(denominator(ratio)));
  return {std::move(p), std::move(q)};
}

inline RationalForm rf_add(const RationalForm& a, const RationalForm& b) {
  return make_canonical(a.num * b.den + b.num * a.den, a.den * b.den);
}

inline RationalForm rf_mul(const RationalForm& a, const RationalForm& b) {
  return make_canonical(a.num * b.num, a.den * b.den);
}

inline RationalForm rf_div(const RationalForm& a, const RationalForm& b) {
  if (b.num.is_zero()) throw AlgebraError("division by the zero polynomial");
  return make_canonical(a.num * b.den, a.den * b.num);
}

inline RationalForm rf_pow(const RationalForm& a, int e) {
  if (e == 0) return {Polynomial::one(), Polynomial::one()};
  if (e > 0) return make_canonical(a.num.pow(e), a.den.pow(e));
  if (a.num.is_zero()) throw AlgebraError("division by the zero polynomial");
  return make_canonical(a.den.pow(-e), a.num.pow(-e));
}

}  // namespace detail

/// Expands e into its canonical rational form. Throws AlgebraError when a
/// denominator is identically zero.
inline RationalForm to_rational_form(const ExprPtr& e) {
  switch (e->kind()) {
    case ExprKind::Constant: {
      const Rational& v = e->constant_value();
      return {Polynomial::constant(Rational(numerator(v))),
              Polynomial::constant(Rational(denominator(v)))};
    }
    case ExprKind::Symbol:
      return {Polynomial::variable(e->symbol()), Polynomial::one()};
    case ExprKind::Add:
      return detail::rf_add(to_rational_form(e->left()), to_rational_form(e->right()));
    case ExprKind::Mul:
      return detail::rf_mul(to_rational_form(e->left()), to_rational_form(e->right()));
    case ExprKind::Div:
      return detail::rf_div(to_rational_form(e->left()), to_rational_form(e->right()));
    case ExprKind::Neg: {
      RationalForm a = to_rational_form(e->child());
      return {-a.num, a.den};
    }
    case ExprKind::Pow:
      return detail::rf_pow(to_rational_form(e->child()), e->exponent());
  }
  throw AlgebraError("corrupt expression node");
}

/// Canonical expression for a polynomial: terms in descending
/// graded-lexicographic order, each term a left-folded product of the
/// coefficient (when not 1) and the symbol powers in enumeration order.
inline ExprPtr polynomial_to_expression(const Polynomial& p) {
  if (p.is_zero()) return Expression::constant(0);
  ExprPtr sum;
  for (const auto& [m, c] : p.terms()) {
    ExprPtr term;
    if (c != 1 || m.is_one()) term = Expression::constant(c);
    for (const auto& [s, e] : m.factors()) {
      ExprPtr f = e == 1 ? Expression::symbol(s) : Expression::pow(Expression::symbol(s), e);
      term = term ? Expression::mul(term, f) : f;
    }
    sum = sum ? Expression::add(sum, term) : term;
  }
  return sum;
}

inline ExprPtr from_rational_form(const RationalForm& rf) {
  ExprPtr num = polynomial_to_expression(rf.num);
  if (rf.den.is_one()) return num;
  return Expression::div(num, polynomial_to_expression(rf.den));
}

/// Canonical form as an expression. Idempotent: normalize(normalize(e))
/// is structurally equal to normalize(e).
inline ExprPtr normalize(const ExprPtr& e) {
  return from_rational_form(to_rational_form(e));
}

/// Exact decision: true iff e is the zero rational function.
inline bool is_identically_zero(const ExprPtr& e) {
  return to_rational_form(e).is_zero();
}

/// Convenience: exact equality as rational functions.
inline bool equivalent(const ExprPtr& a, const ExprPtr& b) {
  return is_identically_zero(Expression::add(a, Expression::neg(b)));
}

}  // namespace jetsym
