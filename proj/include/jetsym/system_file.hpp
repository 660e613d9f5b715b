#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jetsym/analysis.hpp"
#include "jetsym/parser.hpp"

namespace jetsym {

/// A parsed system-definition file: the system plus named vector fields and
/// named initial profiles (one expression in z per dependent variable).
struct SystemFile {
  SystemDefinition system;
  std::vector<std::pair<std::string, GeneralizedVectorField>> fields;
  std::vector<std::pair<std::string, std::vector<ExprPtr>>> profiles;

  const GeneralizedVectorField* field(const std::string& name) const {
    for (const auto& [n, f] : fields)
      if (n == name) return &f;
    return nullptr;
  }

  const std::vector<ExprPtr>* profile(const std::string& name) const {
    for (const auto& [n, p] : profiles)
      if (n == name) return &p;
    return nullptr;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

/// Splits "name=value" (e.g. "z=1") and checks the name.
inline Rational parse_location(const std::string& text, const BundleSpec& bundle, int line) {
  auto eq = text.find('=');
  if (eq == std::string::npos)
    throw SystemFileError("expected <" + bundle.spatial_name() + ">=<value>", line);
  std::string name = trim(text.substr(0, eq));
  if (name != bundle.spatial_name())
    throw SystemFileError("locations must use the spatial variable '" +
                              bundle.spatial_name() + "'",
                          line);
  try {
    return parse_rational(trim(text.substr(eq + 1)));
  } catch (const ParseError& e) {
    throw SystemFileError(e.what(), line);
  }
}

inline ExprPtr parse_expr_line(const std::string& text, const BundleSpec& bundle, int line) {
  try {
    return parse(text, bundle);
  } catch (const ParseError& e) {
    throw SystemFileError(std::string(e.what()), line);
  }
}

/// Splits a field declaration "e1 d/dz + e2 d/dt + e3 d/dx" into
/// (expression, direction-name) pairs; "d/d<name>" is matched at paren
/// depth zero.
inline std::vector<std::pair<std::string, std::string>> split_field_components(
    const std::string& text, int line) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t start = 0;
  int depth = 0;
  std::size_t i = 0;
  auto is_ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    bool boundary_ok = i == 0 || !is_ident_char(text[i - 1]);
    if (depth == 0 && boundary_ok && text.compare(i, 3, "d/d") == 0 && i + 3 < text.size() &&
        is_ident_char(text[i + 3])) {
      std::string expr = trim(text.substr(start, i - start));
      std::size_t j = i + 3;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      std::string dir = text.substr(i + 3, j - i - 3);
      if (expr.empty()) throw SystemFileError("missing expression before d/d" + dir, line);
      out.emplace_back(expr, dir);
      // Expect '+' (or end) between components.
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size()) {
        if (text[j] != '+')
          throw SystemFileError("expected '+' between field components", line);
        ++j;
      }
      start = j;
      i = j;
      continue;
    }
    ++i;
  }
  if (!trim(text.substr(start)).empty())
    throw SystemFileError("trailing text after the last field component", line);
  if (out.empty()) throw SystemFileError("field declaration has no components", line);
  return out;
}

}  // namespace detail

/// Parses a system-definition document (one declaration per line, '#'
/// comments). Diagnostics carry 1-based line numbers.
inline SystemFile parse_system_file(const std::string& text) {
  std::optional<BundleSpec> bundle;
  std::optional<DomainSpec> domain;
  std::vector<SolvedPde> pdes;
  std::vector<BoundaryCondition> bcs;
  std::vector<OutputFunctional> outputs;
  std::vector<std::pair<std::string, GeneralizedVectorField>> fields;
  std::vector<std::pair<std::string, std::vector<ExprPtr>>> profiles;
  std::array<std::string, 2> indep_names;
  std::vector<std::string> dep_names;

  auto require_bundle = [&](int line) -> const BundleSpec& {
    if (!bundle)
      throw SystemFileError("independent/dependent variables must be declared first", line);
    return *bundle;
  };
  auto require_domain = [&](int line) -> const DomainSpec& {
    if (!domain) throw SystemFileError("domain must be declared first", line);
    return *domain;
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    std::string rest = detail::trim(line.substr(keyword.size()));

    if (keyword == "independent") {
      auto names = detail::split_ws(rest);
      if (names.size() != 2)
        throw SystemFileError("expected exactly two independent variables", line_no);
      for (const auto& n : names)
        if (n == "d")
          throw SystemFileError("'d' is reserved for field directions d/d<var>", line_no);
      indep_names = {names[0], names[1]};
      if (!dep_names.empty()) bundle.emplace(indep_names, dep_names);
    } else if (keyword == "dependent") {
      dep_names = detail::split_ws(rest);
      if (dep_names.empty())
        throw SystemFileError("expected at least one dependent variable", line_no);
      if (indep_names[0].empty())
        throw SystemFileError("declare independent variables before dependent ones", line_no);
      for (const auto& n : dep_names)
        if (n == "d")
          throw SystemFileError("'d' is reserved for field directions d/d<var>", line_no);
      try {
        bundle.emplace(indep_names, dep_names);
      } catch (const Error& e) {
        throw SystemFileError(e.what(), line_no);
      }
    } else if (keyword == "domain") {
      auto parts = detail::split_ws(rest);
      if (parts.size() != 2) throw SystemFileError("expected: domain <z_min> <z_max>", line_no);
      try {
        domain.emplace(parse_rational(parts[0]), parse_rational(parts[1]));
      } catch (const Error& e) {
        throw SystemFileError(e.what(), line_no);
      }
    } else if (keyword == "pde") {
      const BundleSpec& b = require_bundle(line_no);
      auto eq = rest.find('=');
      if (eq == std::string::npos) throw SystemFileError("expected: pde <jet> = <expr>", line_no);
      ExprPtr lhs = detail::parse_expr_line(detail::trim(rest.substr(0, eq)), b, line_no);
      if (lhs->kind() != ExprKind::Symbol || !lhs->symbol().is_jet() ||
          lhs->symbol().derivative_order() == 0)
        throw SystemFileError("pde left-hand side must be a single derivative coordinate",
                              line_no);
      ExprPtr rhs = detail::parse_expr_line(detail::trim(rest.substr(eq + 1)), b, line_no);
      JetCoordinate principal = lhs->symbol().jet_coordinate();
      for (const auto& p : pdes)
        if (p.principal == principal)
          throw SystemFileError("duplicate principal derivative on pde left-hand side", line_no);
      pdes.push_back({principal, rhs});
    } else if (keyword == "boundary") {
      const BundleSpec& b = require_bundle(line_no);
      const DomainSpec& dom = require_domain(line_no);
      auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw SystemFileError("expected: boundary z=<value> : <expr> [= <expr>]", line_no);
      Rational loc = detail::parse_location(detail::trim(rest.substr(0, colon)), b, line_no);
      if (!dom.is_endpoint(loc))
        throw SystemFileError("boundary location is not a domain endpoint", line_no);
      std::string body = detail::trim(rest.substr(colon + 1));
      ExprPtr expr;
      if (auto eq = body.find('='); eq != std::string::npos) {
        ExprPtr lhs = detail::parse_expr_line(detail::trim(body.substr(0, eq)), b, line_no);
        ExprPtr rhs = detail::parse_expr_line(detail::trim(body.substr(eq + 1)), b, line_no);
        expr = Expression::add(lhs, Expression::neg(rhs));
      } else {
        expr = detail::parse_expr_line(body, b, line_no);
      }
      bcs.push_back({loc, expr});
    } else if (keyword == "output") {
      const BundleSpec& b = require_bundle(line_no);
      const DomainSpec& dom = require_domain(line_no);
      auto at = rest.find('@');
      auto colon = rest.find(':', at == std::string::npos ? 0 : at);
      if (at == std::string::npos || colon == std::string::npos)
        throw SystemFileError("expected: output <name> @ z=<value> : <expr>", line_no);
      std::string name = detail::trim(rest.substr(0, at));
      if (!is_identifier(name)) throw SystemFileError("invalid output name", line_no);
      Rational loc =
          detail::parse_location(detail::trim(rest.substr(at + 1, colon - at - 1)), b, line_no);
      if (loc < dom.z_min || loc > dom.z_max)
        throw SystemFileError("output location lies outside the domain closure", line_no);
      ExprPtr expr = detail::parse_expr_line(detail::trim(rest.substr(colon + 1)), b, line_no);
      for (const auto& y : outputs)
        if (y.name == name) throw SystemFileError("duplicate output name", line_no);
      outputs.push_back({name, expr, loc});
    } else if (keyword == "field") {
      const BundleSpec& b = require_bundle(line_no);
      auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw SystemFileError("expected: field <name> : <components>", line_no);
      std::string name = detail::trim(rest.substr(0, colon));
      if (!is_identifier(name)) throw SystemFileError("invalid field name", line_no);
      GeneralizedVectorField f = zero_field(b.dependent_count());
      std::vector<std::string> seen;
      for (auto& [expr_text, dir] :
           detail::split_field_components(detail::trim(rest.substr(colon + 1)), line_no)) {
        for (const auto& s : seen)
          if (s == dir) throw SystemFileError("duplicate field component d/d" + dir, line_no);
        seen.push_back(dir);
        ExprPtr comp = detail::parse_expr_line(expr_text, b, line_no);
        if (auto i = b.independent_index(dir)) {
          (*i == 0 ? f.v_z : f.v_t) = comp;
        } else if (auto d = b.dependent_index(dir)) {
          f.v_x[*d] = comp;
        } else {
          throw SystemFileError("unknown field direction d/d" + dir, line_no);
        }
      }
      for (const auto& [n, unused] : fields)
        if (n == name) throw SystemFileError("duplicate field name", line_no);
      fields.emplace_back(name, std::move(f));
    } else if (keyword == "profile") {
      const BundleSpec& b = require_bundle(line_no);
      auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw SystemFileError("expected: profile <name> : <expr>[, <expr>...]", line_no);
      std::string name = detail::trim(rest.substr(0, colon));
      if (!is_identifier(name)) throw SystemFileError("invalid profile name", line_no);
      std::string body = detail::trim(rest.substr(colon + 1));
      std::vector<ExprPtr> exprs;
      std::size_t start = 0;
      int depth = 0;
      for (std::size_t i = 0; i <= body.size(); ++i) {
        if (i < body.size() && body[i] == '(') ++depth;
        if (i < body.size() && body[i] == ')') --depth;
        if (i == body.size() || (depth == 0 && body[i] == ',')) {
          exprs.push_back(
              detail::parse_expr_line(detail::trim(body.substr(start, i - start)), b, line_no));
          start = i + 1;
        }
      }
      if (static_cast<int>(exprs.size()) != b.dependent_count())
        throw SystemFileError("profile needs one expression per dependent variable", line_no);
      for (const ExprPtr& e : exprs)
        for (const Sym& s : symbols(e))
          if (!(s.is_independent() && s.indep_index() == 0))
            throw SystemFileError("profiles may depend on the spatial variable only", line_no);
      for (const auto& [n, unused] : profiles)
        if (n == name) throw SystemFileError("duplicate profile name", line_no);
      profiles.emplace_back(name, std::move(exprs));
    } else {
      throw SystemFileError("unknown declaration '" + keyword + "'", line_no);
    }
  }

  if (!bundle) throw SystemFileError("no variables declared", line_no == 0 ? 1 : line_no);
  if (!domain) throw SystemFileError("no domain declared", line_no);
  if (pdes.empty()) throw SystemFileError("no pde declared", line_no);

  SystemFile out{SystemDefinition{*bundle, *domain, std::move(pdes), std::move(bcs),
                                  std::move(outputs)},
                 std::move(fields), std::move(profiles)};
  return out;
}

inline SystemFile load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open system file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_file(buf.str());
}

/// Canonical re-emission (expressions normalized); the result re-parses to
/// an equivalent file and printing it again is a fixed point.
inline std::string print_system_file(const SystemFile& sf) {
  const BundleSpec& b = sf.system.bundle;
  std::ostringstream out;
  out << "independent " << b.independent_name(0) << " " << b.independent_name(1) << "\n";
  out << "dependent";
  for (const auto& n : b.dependent_names()) out << " " << n;
  out << "\n";
  out << "domain " << to_string(sf.system.domain.z_min) << " "
      << to_string(sf.system.domain.z_max) << "\n";
  for (const auto& pde : sf.system.pdes)
    out << "pde " << b.name_of(Sym::jet(pde.principal)) << " = "
        << to_string(normalize(pde.rhs), b) << "\n";
  for (const auto& bc : sf.system.bcs)
    out << "boundary " << b.spatial_name() << "=" << to_string(bc.location) << " : "
        << to_string(normalize(bc.expr), b) << " = 0\n";
  for (const auto& y : sf.system.outputs)
    out << "output " << y.name << " @ " << b.spatial_name() << "=" << to_string(y.location)
        << " : " << to_string(normalize(y.expr), b) << "\n";
  for (const auto& [name, f] : sf.fields) {
    out << "field " << name << " : " << to_string(normalize(f.v_z), b) << " d/d"
        << b.independent_name(0) << " + " << to_string(normalize(f.v_t), b) << " d/d"
        << b.independent_name(1);
    for (int a = 0; a < f.dependent_count(); ++a)
      out << " + " << to_string(normalize(f.v_x[a]), b) << " d/d" << b.dependent_name(a);
    out << "\n";
  }
  for (const auto& [name, exprs] : sf.profiles) {
    out << "profile " << name << " : ";
    for (std::size_t i = 0; i < exprs.size(); ++i) {
      if (i) out << ", ";
      out << to_string(normalize(exprs[i]), b);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace jetsym
