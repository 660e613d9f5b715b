#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "jetsym/bundle.hpp"
#include "jetsym/rational.hpp"

namespace jetsym {

/// Power product over Sym, exponents > 0, factors sorted by symbol order.
class Monomial {
 public:
  Monomial() = default;

  static Monomial one() { return {}; }

  static Monomial var(Sym s, int e = 1) {
    Monomial m;
    if (e > 0) m.factors_.emplace_back(s, e);
    return m;
  }

  bool is_one() const { return factors_.empty(); }

  int total_degree() const {
    int d = 0;
    for (const auto& [s, e] : factors_) d += e;
    return d;
  }

  int exponent_of(Sym s) const {
    for (const auto& [sym, e] : factors_)
      if (sym == s) return e;
    return 0;
  }

  const std::vector<std::pair<Sym, int>>& factors() const { return factors_; }

  Monomial times(const Monomial& o) const {
    Monomial out;
    out.factors_.reserve(factors_.size() + o.factors_.size());
    std::size_t i = 0, j = 0;
    while (i < factors_.size() || j < o.factors_.size()) {
      if (j == o.factors_.size() ||
          (i < factors_.size() && factors_[i].first < o.factors_[j].first)) {
        out.factors_.push_back(factors_[i++]);
      } else if (i == factors_.size() || o.factors_[j].first < factors_[i].first) {
        out.factors_.push_back(o.factors_[j++]);
      } else {
        out.factors_.emplace_back(factors_[i].first, factors_[i].second + o.factors_[j].second);
        ++i;
        ++j;
      }
    }
    return out;
  }

  bool divides(const Monomial& o) const {
    for (const auto& [s, e] : factors_)
      if (o.exponent_of(s) < e) return false;
    return true;
  }

  /// Requires o.divides(*this).
  Monomial divided_by(const Monomial& o) const {
    Monomial out;
    for (const auto& [s, e] : factors_) {
      int r = e - o.exponent_of(s);
      if (r > 0) out.factors_.emplace_back(s, r);
    }
    return out;
  }

  static Monomial gcd(const Monomial& a, const Monomial& b) {
    Monomial out;
    for (const auto& [s, e] : a.factors_) {
      int f = std::min(e, b.exponent_of(s));
      if (f > 0) out.factors_.emplace_back(s, f);
    }
    return out;
  }

  /// Graded-lexicographic comparison: total degree first, then, on the
  /// first symbol (in enumeration order) where the exponents differ, the
  /// larger exponent wins.
  static int compare(const Monomial& a, const Monomial& b) {
    int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db ? -1 : 1;
    std::size_t i = 0, j = 0;
    while (i < a.factors_.size() && j < b.factors_.size()) {
      const auto& fa = a.factors_[i];
      const auto& fb = b.factors_[j];
      if (fa.first < fb.first) return 1;   // a has a positive exponent on an earlier symbol
      if (fb.first < fa.first) return -1;
      if (fa.second != fb.second) return fa.second < fb.second ? -1 : 1;
      ++i;
      ++j;
    }
    if (i < a.factors_.size()) return 1;
    if (j < b.factors_.size()) return -1;
    return 0;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<std::pair<Sym, int>> factors_;
};

struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return Monomial::compare(a, b) > 0;
  }
};

/// Sparse multivariate polynomial over Q with terms in descending
/// graded-lexicographic order.
class Polynomial {
 public:
  using Term = std::pair<Monomial, Rational>;

  Polynomial() = default;

  static Polynomial zero() { return {}; }
  static Polynomial one() { return constant(Rational(1)); }

  static Polynomial constant(Rational c) {
    Polynomial p;
    if (c != 0) p.terms_.emplace_back(Monomial::one(), std::move(c));
    return p;
  }

  static Polynomial variable(Sym s) {
    Polynomial p;
    p.terms_.emplace_back(Monomial::var(s), Rational(1));
    return p;
  }

  static Polynomial term(Monomial m, Rational c) {
    Polynomial p;
    if (c != 0) p.terms_.emplace_back(std::move(m), std::move(c));
    return p;
  }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one());
  }
  bool is_one() const {
    return terms_.size() == 1 && terms_[0].first.is_one() && terms_[0].second == 1;
  }
  bool is_monomial() const { return terms_.size() == 1; }

  /// Value when is_constant(); zero polynomial yields 0.
  Rational constant_value() const {
    return terms_.empty() ? Rational(0) : terms_[0].second;
  }

  const std::vector<Term>& terms() const { return terms_; }

  const Term& leading() const { return terms_.front(); }

  int total_degree() const {
    return terms_.empty() ? -1 : terms_[0].first.total_degree();
  }

  std::set<Sym> symbols() const {
    std::set<Sym> out;
    for (const auto& [m, c] : terms_)
      for (const auto& [s, e] : m.factors()) out.insert(s);
    return out;
  }

  friend Polynomial operator-(const Polynomial& p) {
    Polynomial out = p;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      int cmp;
      if (i == a.terms_.size()) {
        cmp = -1;
      } else if (j == b.terms_.size()) {
        cmp = 1;
      } else {
        cmp = Monomial::compare(a.terms_[i].first, b.terms_[j].first);
      }
      if (cmp > 0) {
        out.terms_.push_back(a.terms_[i++]);
      } else if (cmp < 0) {
        out.terms_.push_back(b.terms_[j++]);
      } else {
        Rational c = a.terms_[i].second + b.terms_[j].second;
        if (c != 0) out.terms_.emplace_back(a.terms_[i].first, std::move(c));
        ++i;
        ++j;
      }
    }
    return out;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return zero();
    std::map<Monomial, Rational, GrlexGreater> acc;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m = ma.times(mb);
        auto [it, inserted] = acc.emplace(std::move(m), ca * cb);
        if (!inserted) it->second += ca * cb;
      }
    Polynomial out;
    out.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (c != 0) out.terms_.emplace_back(m, std::move(c));
    return out;
  }

  Polynomial scaled(const Rational& c) const {
    if (c == 0) return zero();
    Polynomial out = *this;
    for (auto& [m, k] : out.terms_) k *= c;
    return out;
  }

  Polynomial times_monomial(const Monomial& m, const Rational& c) const {
    if (c == 0) return zero();
    Polynomial out = *this;
    for (auto& [mm, k] : out.terms_) {
      mm = mm.times(m);
      k *= c;
    }
    return out;
  }

  Polynomial pow(int e) const {
    if (e < 0) throw AlgebraError("negative exponent on a polynomial");
    Polynomial result = one();
    Polynomial base = *this;
    while (e > 0) {
      if (e & 1) result = result * base;
      base = e > 1 ? base * base : base;
      e >>= 1;
    }
    return result;
  }

  Polynomial derivative(Sym s) const {
    Polynomial out;
    for (const auto& [m, c] : terms_) {
      int e = m.exponent_of(s);
      if (e == 0) continue;
      Monomial reduced = m.divided_by(Monomial::var(s));
      out = out + term(std::move(reduced), c * e);
    }
    return out;
  }

  /// Signed content: gcd of all coefficients carrying the sign of the
  /// leading coefficient, so that primitive_part() has a positive leading
  /// coefficient and integer, jointly coprime coefficients.
  Rational content() const {
    if (terms_.empty()) return Rational(0);
    Rational g(0);
    for (const auto& [m, c] : terms_) g = rational_gcd(g, c);
    if (terms_[0].second < 0) g = -g;
    return g;
  }

  Polynomial primitive_part() const {
    if (terms_.empty()) return zero();
    return scaled(Rational(1) / content());
  }

  Rational evaluate(const std::map<Sym, Rational>& point) const {
    Rational total(0);
    for (const auto& [m, c] : terms_) {
      Rational v = c;
      for (const auto& [s, e] : m.factors()) {
        auto it = point.find(s);
        if (it == point.end()) throw EvalError("unassigned symbol in polynomial evaluation");
        Rational base = it->second;
        for (int k = 0; k < e; ++k) v *= base;
      }
      total += v;
    }
    return total;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<Term> terms_;
};

namespace detail {

/// View of p as a univariate polynomial in v with Polynomial coefficients.
inline std::map<int, Polynomial> collect_by(const Polynomial& p, Sym v) {
  std::map<int, Polynomial> out;
  for (const auto& [m, c] : p.terms()) {
    int e = m.exponent_of(v);
    Monomial rest = e > 0 ? m.divided_by(Monomial::var(v, e)) : m;
    out[e] = out[e] + Polynomial::term(rest, c);
  }
  return out;
}

inline int degree_in(const Polynomial& p, Sym v) {
  int d = 0;
  for (const auto& [m, c] : p.terms()) d = std::max(d, m.exponent_of(v));
  return d;
}

/// Leading coefficient of p viewed in v (a polynomial in the other symbols).
inline Polynomial leading_coeff_in(const Polynomial& p, Sym v) {
  int d = degree_in(p, v);
  Polynomial out;
  for (const auto& [m, c] : p.terms())
    if (m.exponent_of(v) == d)
      out = out + Polynomial::term(d > 0 ? m.divided_by(Monomial::var(v, d)) : m, c);
  return out;
}

}  // namespace detail

/// Exact multivariate division: returns q with a = q * b. Throws
/// AlgebraError when b does not divide a (internal misuse).
inline Polynomial exact_divide(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw AlgebraError("division by the zero polynomial");
  if (a.is_zero()) return Polynomial::zero();
  if (b.is_constant()) return a.scaled(Rational(1) / b.constant_value());
  Polynomial rem = a;
  Polynomial quot;
  const auto& [lm, lc] = b.leading();
  while (!rem.is_zero()) {
    const auto& [rm, rc] = rem.leading();
    if (!lm.divides(rm)) throw AlgebraError("inexact polynomial division");
    Monomial qm = rm.divided_by(lm);
    Rational qc = rc / lc;
    quot = quot + Polynomial::term(qm, qc);
    rem = rem - b.times_monomial(qm, qc);
  }
  return quot;
}

namespace detail {

inline Polynomial primitive_gcd(Polynomial a, Polynomial b);

/// Pseudo-remainder of a by b with respect to v (both with positive degree
/// in v, deg_v(a) >= deg_v(b)). Only used inside the primitive PRS, so the
/// extraneous lc(b)-power factors are immaterial.
inline Polynomial pseudo_rem(Polynomial a, const Polynomial& b, Sym v) {
  const int db = degree_in(b, v);
  const Polynomial lb = leading_coeff_in(b, v);
  int guard = degree_in(a, v) - db + 1;
  while (!a.is_zero()) {
    int da = degree_in(a, v);
    if (da < db) break;
    if (--guard < 0) throw AlgebraError("pseudo-division failed to reduce degree");
    Polynomial la = leading_coeff_in(a, v);
    Polynomial shift = Polynomial::variable(v).pow(da - db);
    a = a * lb - b * la * shift;
  }
  return a;
}

/// gcd of the coefficient polynomials of p viewed in v.
inline Polynomial coefficient_gcd(const Polynomial& p, Sym v) {
  Polynomial g;
  for (auto& [e, coeff] : collect_by(p, v)) {
    g = primitive_gcd(g, coeff);
    if (g.is_one()) break;
  }
  return g;
}

/// Primitive multivariate gcd over Q via the primitive polynomial remainder
/// sequence. Result is primitive with positive leading coefficient (1 for
/// coprime inputs); gcd(0, p) is the primitive part of p.
inline Polynomial primitive_gcd(Polynomial a, Polynomial b) {
  if (a.is_zero()) return b.is_zero() ? b : b.primitive_part();
  if (b.is_zero()) return a.primitive_part();
  a = a.primitive_part();
  b = b.primitive_part();
  if (a == b) return a;
  if (a.is_constant() || b.is_constant()) return Polynomial::one();

  // Monomial fast path.
  if (a.is_monomial() || b.is_monomial()) {
    Monomial g = a.leading().first;
    for (const auto& [m, c] : b.terms()) g = Monomial::gcd(g, m);
    if (!a.is_monomial())
      for (const auto& [m, c] : a.terms()) g = Monomial::gcd(g, m);
    return Polynomial::term(g, Rational(1));
  }

  std::set<Sym> vars = a.symbols();
  for (Sym s : b.symbols()) vars.insert(s);
  Sym v = *vars.begin();

  const int da = degree_in(a, v), db = degree_in(b, v);
  if (da == 0) return primitive_gcd(a, coefficient_gcd(b, v));
  if (db == 0) return primitive_gcd(coefficient_gcd(a, v), b);

  Polynomial ca = coefficient_gcd(a, v);
  Polynomial cb = coefficient_gcd(b, v);
  Polynomial cont = primitive_gcd(ca, cb);
  Polynomial pa = exact_divide(a, ca);
  Polynomial pb = exact_divide(b, cb);
  if (degree_in(pa, v) < degree_in(pb, v)) std::swap(pa, pb);

  while (true) {
    Polynomial r = pseudo_rem(pa, pb, v);
    if (r.is_zero()) {
      Polynomial g = pb.primitive_part();
      // Strip any residual coefficient content in v.
      g = exact_divide(g, coefficient_gcd(g, v)).primitive_part();
      return (cont * g).primitive_part();
    }
    if (degree_in(r, v) == 0) return cont.primitive_part();
    pa = std::move(pb);
    pb = exact_divide(r, coefficient_gcd(r, v)).primitive_part();
  }
}

}  // namespace detail

/// Primitive gcd (positive leading coefficient); scalar content is the
/// caller's concern.
inline Polynomial poly_gcd(const Polynomial& a, const Polynomial& b) {
  return detail::primitive_gcd(a, b);
}

}  // namespace jetsym
