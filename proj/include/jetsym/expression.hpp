#pragma once

#include <algorithm>
#include <memory>
#include <vector>
#include <set>
#include <string>
#include <utility>

#include "jetsym/bundle.hpp"
#include "jetsym/rational.hpp"

namespace jetsym {

enum class ExprKind : std::uint8_t {
  Constant,  // rational literal
  Symbol,    // independent variable or jet coordinate
  Add,       // a + b
  Mul,       // a * b
  Div,       // a / b
  Neg,       // -a
  Pow,       // a ^ n, integer n
};

class Expression;
using ExprPtr = std::shared_ptr<const Expression>;

/// Immutable expression tree over jet-space symbols and exact rationals.
/// Nodes are shared freely; every operation in the library is a pure
/// function, so expressions are safe to use from multiple threads.
class Expression {
 public:
  ExprKind kind() const { return kind_; }
  const Rational& constant_value() const { return value_; }
  Sym symbol() const { return sym_; }
  const ExprPtr& left() const { return a_; }
  const ExprPtr& right() const { return b_; }
  const ExprPtr& child() const { return a_; }  // Neg, Pow
  int exponent() const { return exponent_; }

  static ExprPtr constant(Rational v) {
    auto e = node(ExprKind::Constant);
    e->value_ = std::move(v);
    return e;
  }
  static ExprPtr constant(long v) { return constant(Rational(v)); }

  static ExprPtr symbol(Sym s) {
    auto e = node(ExprKind::Symbol);
    e->sym_ = s;
    return e;
  }

  static ExprPtr add(ExprPtr a, ExprPtr b) { return binary(ExprKind::Add, std::move(a), std::move(b)); }
  static ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(ExprKind::Mul, std::move(a), std::move(b)); }
  static ExprPtr div(ExprPtr a, ExprPtr b) { return binary(ExprKind::Div, std::move(a), std::move(b)); }

  static ExprPtr neg(ExprPtr a) {
    auto e = node(ExprKind::Neg);
    e->a_ = std::move(a);
    return e;
  }

  static ExprPtr pow(ExprPtr base, int exponent) {
    auto e = node(ExprKind::Pow);
    e->a_ = std::move(base);
    e->exponent_ = exponent;
    return e;
  }

 private:
  static std::shared_ptr<Expression> node(ExprKind k) {
    auto e = std::make_shared<Expression>();
    e->kind_ = k;
    return e;
  }
  static ExprPtr binary(ExprKind k, ExprPtr a, ExprPtr b) {
    auto e = node(k);
    e->a_ = std::move(a);
    e->b_ = std::move(b);
    return e;
  }

  ExprKind kind_ = ExprKind::Constant;
  int exponent_ = 0;
  Rational value_;
  Sym sym_;
  ExprPtr a_, b_;
};

inline ExprPtr operator+(const ExprPtr& a, const ExprPtr& b) { return Expression::add(a, b); }
inline ExprPtr operator-(const ExprPtr& a, const ExprPtr& b) { return Expression::add(a, Expression::neg(b)); }
inline ExprPtr operator*(const ExprPtr& a, const ExprPtr& b) { return Expression::mul(a, b); }
inline ExprPtr operator/(const ExprPtr& a, const ExprPtr& b) { return Expression::div(a, b); }
inline ExprPtr operator-(const ExprPtr& a) { return Expression::neg(a); }

inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case ExprKind::Constant:
      return a->constant_value() == b->constant_value();
    case ExprKind::Symbol:
      return a->symbol() == b->symbol();
    case ExprKind::Neg:
      return structurally_equal(a->child(), b->child());
    case ExprKind::Pow:
      return a->exponent() == b->exponent() && structurally_equal(a->child(), b->child());
    default:
      return structurally_equal(a->left(), b->left()) &&
             structurally_equal(a->right(), b->right());
  }
}

inline void collect_symbols(const ExprPtr& e, std::set<Sym>& out) {
  if (!e) return;
  switch (e->kind()) {
    case ExprKind::Constant:
      return;
    case ExprKind::Symbol:
      out.insert(e->symbol());
      return;
    case ExprKind::Neg:
    case ExprKind::Pow:
      collect_symbols(e->child(), out);
      return;
    default:
      collect_symbols(e->left(), out);
      collect_symbols(e->right(), out);
  }
}

inline std::set<Sym> symbols(const ExprPtr& e) {
  std::set<Sym> out;
  collect_symbols(e, out);
  return out;
}

inline bool depends_on(const ExprPtr& e, Sym s) {
  return symbols(e).count(s) > 0;
}

/// Maximal derivative order |J| over all jet coordinates in e; 0 when no
/// jet coordinate occurs. Always finite.
inline int max_derivative_order(const ExprPtr& e) {
  int best = 0;
  for (const Sym& s : symbols(e))
    if (s.is_jet()) best = std::max(best, s.derivative_order());
  return best;
}

namespace detail {

// Printing precedence: Add = 1, Mul/Div = 2, unary minus = 2, Pow = 3.
inline void print_expr(const ExprPtr& e, const BundleSpec& bundle, int parent_prec,
                       std::string& out);

// True when the printed form of e starts with a minus sign that the Add
// printer can absorb into " - ".
inline bool leading_minus(const ExprPtr& e, ExprPtr& stripped) {
  if (e->kind() == ExprKind::Neg) {
    stripped = e->child();
    return true;
  }
  if (e->kind() == ExprKind::Constant && e->constant_value() < 0) {
    stripped = Expression::constant(-e->constant_value());
    return true;
  }
  if (e->kind() == ExprKind::Mul) {
    std::vector<ExprPtr> factors;
    ExprPtr cur = e;
    while (cur->kind() == ExprKind::Mul) {
      factors.push_back(cur->right());
      cur = cur->left();
    }
    factors.push_back(cur);
    std::reverse(factors.begin(), factors.end());
    if (factors[0]->kind() == ExprKind::Constant && factors[0]->constant_value() < 0) {
      Rational c = -factors[0]->constant_value();
      std::size_t start = 0;
      if (c == 1 && factors.size() > 1) {
        start = 1;  // the -1 factor drops out entirely
      } else {
        factors[0] = Expression::constant(c);
      }
      ExprPtr out;
      for (std::size_t i = start; i < factors.size(); ++i)
        out = out ? Expression::mul(out, factors[i]) : factors[i];
      stripped = out;
      return true;
    }
  }
  return false;
}

inline void print_expr(const ExprPtr& e, const BundleSpec& bundle, int parent_prec,
                       std::string& out) {
  switch (e->kind()) {
    case ExprKind::Constant: {
      const Rational& v = e->constant_value();
      bool wrap = v < 0 && parent_prec >= 2;
      if (wrap) out += '(';
      out += to_string(v);
      if (wrap) out += ')';
      return;
    }
    case ExprKind::Symbol:
      out += bundle.name_of(e->symbol());
      return;
    case ExprKind::Add: {
      bool wrap = parent_prec >= 2;
      if (wrap) out += '(';
      print_expr(e->left(), bundle, 1, out);
      ExprPtr stripped;
      if (leading_minus(e->right(), stripped)) {
        out += " - ";
        print_expr(stripped, bundle, 2, out);
      } else {
        out += " + ";
        print_expr(e->right(), bundle, 2, out);
      }
      if (wrap) out += ')';
      return;
    }
    case ExprKind::Mul: {
      ExprPtr stripped;
      if (leading_minus(e, stripped)) {
        bool wrap = parent_prec >= 2;
        if (wrap) out += '(';
        out += '-';
        print_expr(stripped, bundle, 2, out);
        if (wrap) out += ')';
        return;
      }
      bool wrap = parent_prec >= 3;
      if (wrap) out += '(';
      print_expr(e->left(), bundle, 2, out);
      out += '*';
      print_expr(e->right(), bundle, 3, out);
      if (wrap) out += ')';
      return;
    }
    case ExprKind::Div: {
      bool wrap = parent_prec >= 3;
      if (wrap) out += '(';
      print_expr(e->left(), bundle, 2, out);
      out += '/';
      print_expr(e->right(), bundle, 3, out);
      if (wrap) out += ')';
      return;
    }
    case ExprKind::Neg: {
      bool wrap = parent_prec >= 2;
      if (wrap) out += '(';
      out += '-';
      print_expr(e->child(), bundle, 2, out);
      if (wrap) out += ')';
      return;
    }
    case ExprKind::Pow: {
      bool base_compound = e->child()->kind() != ExprKind::Symbol &&
                           !(e->child()->kind() == ExprKind::Constant &&
                             e->child()->constant_value() >= 0);
      if (base_compound) out += '(';
      print_expr(e->child(), bundle, 3, out);
      if (base_compound) out += ')';
      out += '^';
      if (e->exponent() < 0) {
        out += '(' + std::to_string(e->exponent()) + ')';
      } else {
        out += std::to_string(e->exponent());
      }
      return;
    }
  }
}

}  // namespace detail

/// Deterministic rendering; parse(to_string(e)) normalizes equal to e.
inline std::string to_string(const ExprPtr& e, const BundleSpec& bundle) {
  std::string out;
  detail::print_expr(e, bundle, 0, out);
  return out;
}

}  // namespace jetsym
