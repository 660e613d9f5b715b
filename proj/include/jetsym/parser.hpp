#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "jetsym/expression.hpp"

namespace jetsym {

namespace detail {

/// Recursive-descent parser for the expression grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | postfix
///   postfix:= atom ('^' int)?
///   atom   := integer | identifier | '(' expr ')'
/// Identifiers resolve against the bundle; a trailing _<suffix> over the
/// independent-variable names denotes a jet coordinate, order-insensitive
/// (x_zt and x_tz name the same symbol).
class ExprParser {
 public:
  ExprParser(std::string_view src, const BundleSpec& bundle)
      : src_(src), bundle_(bundle) {}

  ExprPtr parse() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError("unexpected trailing input '" + std::string(src_.substr(pos_)) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (true) {
      if (eat('+')) {
        e = Expression::add(e, parse_term());
      } else if (eat('-')) {
        e = Expression::add(e, Expression::neg(parse_term()));
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    while (true) {
      if (eat('*')) {
        e = Expression::mul(e, parse_unary());
      } else if (eat('/')) {
        e = Expression::div(e, parse_unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_unary() {
    if (eat('-')) return Expression::neg(parse_unary());
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_atom();
    if (eat('^')) return Expression::pow(e, parse_exponent());
    return e;
  }

  int parse_exponent() {
    skip_ws();
    bool paren = eat('(');
    skip_ws();
    bool negative = eat('-');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected integer exponent", start);
    long value = 0;
    try {
      value = std::stol(std::string(src_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      throw ParseError("exponent out of range", start);
    }
    if (paren && !eat(')')) throw ParseError("expected ')'", pos_);
    return static_cast<int>(negative ? -value : value);
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  ExprPtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    return Expression::constant(Rational(Integer(std::string(src_.substr(start, pos_ - start)))));
  }

  ExprPtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);
    return Expression::symbol(resolve(name, start));
  }

  Sym resolve(std::string_view name, std::size_t at) const {
    if (auto i = bundle_.independent_index(name)) return Sym::indep(*i);
    if (auto d = bundle_.dependent_index(name)) return Sym::jet(*d, 0, 0);
    auto underscore = name.rfind('_');
    if (underscore != std::string_view::npos && underscore > 0) {
      std::string_view head = name.substr(0, underscore);
      std::string_view suffix = name.substr(underscore + 1);
      if (auto d = bundle_.dependent_index(head)) {
        int jz = 0, jt = 0;
        std::size_t p = 0;
        while (p < suffix.size()) {
          // Greedy longest match among the two independent-variable names.
          bool matched = false;
          for (int i : {0, 1}) {
            const std::string& iv = bundle_.independent_name(i);
            std::string_view other = bundle_.independent_name(1 - i);
            if (suffix.substr(p).starts_with(iv) &&
                (iv.size() >= other.size() || !suffix.substr(p).starts_with(other))) {
              (i == 0 ? jz : jt) += 1;
              p += iv.size();
              matched = true;
              break;
            }
          }
          if (!matched)
            throw ParseError("malformed derivative suffix '" + std::string(suffix) +
                                 "' on '" + std::string(head) + "'",
                             at + underscore + 1);
        }
        if (jz + jt == 0)
          throw ParseError("empty derivative suffix on '" + std::string(head) + "'",
                           at + underscore);
        return Sym::jet(*d, jz, jt);
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", at);
  }

  std::string_view src_;
  const BundleSpec& bundle_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses src against the given bundle. Throws ParseError with the byte
/// position on syntax errors, unknown identifiers, and malformed
/// derivative suffixes.
inline ExprPtr parse(std::string_view src, const BundleSpec& bundle) {
  return detail::ExprParser(src, bundle).parse();
}

}  // namespace jetsym
