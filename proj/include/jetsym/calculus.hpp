#pragma once

#include <map>
#include <string>

#include "jetsym/normalize.hpp"

namespace jetsym {

namespace detail {

// Lightly folding constructors: enough to keep derivative trees from
// drowning in 0*... noise without doing full normalization.
inline bool is_const(const ExprPtr& e, long v) {
  return e->kind() == ExprKind::Constant && e->constant_value() == v;
}

inline ExprPtr s_add(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  return Expression::add(a, b);
}

inline ExprPtr s_mul(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a, 0) || is_const(b, 0)) return Expression::constant(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  return Expression::mul(a, b);
}

inline ExprPtr s_neg(const ExprPtr& a) {
  if (is_const(a, 0)) return a;
  return Expression::neg(a);
}

inline ExprPtr s_sub(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(b, 0)) return a;
  if (is_const(a, 0)) return s_neg(b);
  return Expression::add(a, Expression::neg(b));
}

inline ExprPtr s_div(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a, 0)) return a;
  if (is_const(b, 1)) return a;
  return Expression::div(a, b);
}

inline ExprPtr s_pow(const ExprPtr& a, int e) {
  if (e == 1) return a;
  if (e == 0) return Expression::constant(1);
  return Expression::pow(a, e);
}

}  // namespace detail

/// Formal partial derivative with respect to one symbol; all other jet
/// coordinates and independent variables are treated as algebraically
/// independent. The result is a plain derivative tree, not normalized.
inline ExprPtr partial(const ExprPtr& e, Sym s) {
  using namespace detail;
  switch (e->kind()) {
    case ExprKind::Constant:
      return Expression::constant(0);
    case ExprKind::Symbol:
      return Expression::constant(e->symbol() == s ? 1 : 0);
    case ExprKind::Add:
      return s_add(partial(e->left(), s), partial(e->right(), s));
    case ExprKind::Neg:
      return s_neg(partial(e->child(), s));
    case ExprKind::Mul:
      return s_add(s_mul(partial(e->left(), s), e->right()),
                   s_mul(e->left(), partial(e->right(), s)));
    case ExprKind::Div: {
      ExprPtr da = partial(e->left(), s);
      ExprPtr db = partial(e->right(), s);
      return s_div(s_sub(s_mul(da, e->right()), s_mul(e->left(), db)),
                   s_pow(e->right(), 2));
    }
    case ExprKind::Pow: {
      ExprPtr da = partial(e->child(), s);
      return s_mul(s_mul(Expression::constant(e->exponent()),
                         s_pow(e->child(), e->exponent() - 1)),
                   da);
    }
  }
  throw AlgebraError("corrupt expression node");
}

namespace detail {

inline ExprPtr total_derivative_once(const ExprPtr& e, int dir) {
  using namespace detail;
  switch (e->kind()) {
    case ExprKind::Constant:
      return Expression::constant(0);
    case ExprKind::Symbol: {
      Sym s = e->symbol();
      if (s.is_independent())
        return Expression::constant(s.indep_index() == dir ? 1 : 0);
      JetCoordinate c = s.jet_coordinate();
      c.index = dir == 0 ? c.index.shifted_z() : c.index.shifted_t();
      return Expression::symbol(Sym::jet(c));
    }
    case ExprKind::Add:
      return s_add(total_derivative_once(e->left(), dir),
                   total_derivative_once(e->right(), dir));
    case ExprKind::Neg:
      return s_neg(total_derivative_once(e->child(), dir));
    case ExprKind::Mul:
      return s_add(s_mul(total_derivative_once(e->left(), dir), e->right()),
                   s_mul(e->left(), total_derivative_once(e->right(), dir)));
    case ExprKind::Div: {
      ExprPtr da = total_derivative_once(e->left(), dir);
      ExprPtr db = total_derivative_once(e->right(), dir);
      return s_div(s_sub(s_mul(da, e->right()), s_mul(e->left(), db)),
                   s_pow(e->right(), 2));
    }
    case ExprKind::Pow: {
      ExprPtr da = total_derivative_once(e->child(), dir);
      return s_mul(s_mul(Expression::constant(e->exponent()),
                         s_pow(e->child(), e->exponent() - 1)),
                   da);
    }
  }
  throw AlgebraError("corrupt expression node");
}

}  // namespace detail

/// Total derivative D_dir^order(e) on the jet space: D_z x^a_J = x^a_{J+1_z}
/// and the chain rule through every operator. dir is 0 for the spatial and
/// 1 for the temporal variable. Result is normalized.
inline ExprPtr total_derivative(const ExprPtr& e, int dir, int order = 1) {
  if (dir != 0 && dir != 1) throw AlgebraError("derivative direction must be 0 (z) or 1 (t)");
  if (order < 0) throw AlgebraError("derivative order must be nonnegative");
  ExprPtr out = e;
  for (int i = 0; i < order; ++i)
    out = normalize(detail::total_derivative_once(out, dir));
  return order == 0 ? normalize(out) : out;
}

/// Simultaneous single-pass substitution: each rule's left-hand symbol is
/// replaced where it occurs in e; right-hand sides are never re-visited.
/// Result is not normalized.
inline ExprPtr substitute(const ExprPtr& e, const std::map<Sym, ExprPtr>& rules) {
  switch (e->kind()) {
    case ExprKind::Constant:
      return e;
    case ExprKind::Symbol: {
      auto it = rules.find(e->symbol());
      return it != rules.end() ? it->second : e;
    }
    case ExprKind::Add:
      return Expression::add(substitute(e->left(), rules), substitute(e->right(), rules));
    case ExprKind::Mul:
      return Expression::mul(substitute(e->left(), rules), substitute(e->right(), rules));
    case ExprKind::Div:
      return Expression::div(substitute(e->left(), rules), substitute(e->right(), rules));
    case ExprKind::Neg:
      return Expression::neg(substitute(e->child(), rules));
    case ExprKind::Pow:
      return Expression::pow(substitute(e->child(), rules), e->exponent());
  }
  throw AlgebraError("corrupt expression node");
}

/// Exact rational evaluation. Every symbol occurring in e must be assigned;
/// division by zero at the point raises EvalError.
inline Rational evaluate(const ExprPtr& e, const std::map<Sym, Rational>& point,
                         const BundleSpec* bundle = nullptr) {
  switch (e->kind()) {
    case ExprKind::Constant:
      return e->constant_value();
    case ExprKind::Symbol: {
      auto it = point.find(e->symbol());
      if (it == point.end()) {
        std::string name = bundle ? bundle->name_of(e->symbol()) : "<symbol>";
        throw EvalError("unassigned symbol '" + name + "'");
      }
      return it->second;
    }
    case ExprKind::Add:
      return evaluate(e->left(), point, bundle) + evaluate(e->right(), point, bundle);
    case ExprKind::Mul:
      return evaluate(e->left(), point, bundle) * evaluate(e->right(), point, bundle);
    case ExprKind::Div: {
      Rational den = evaluate(e->right(), point, bundle);
      if (den == 0) throw EvalError("division by zero at the evaluation point");
      return evaluate(e->left(), point, bundle) / den;
    }
    case ExprKind::Neg:
      return -evaluate(e->child(), point, bundle);
    case ExprKind::Pow: {
      Rational base = evaluate(e->child(), point, bundle);
      int n = e->exponent();
      if (n < 0) {
        if (base == 0) throw EvalError("division by zero at the evaluation point");
        base = Rational(1) / base;
        n = -n;
      }
      Rational out(1);
      for (int i = 0; i < n; ++i) out *= base;
      return out;
    }
  }
  throw AlgebraError("corrupt expression node");
}

}  // namespace jetsym
