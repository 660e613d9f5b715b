#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "jetsym/calculus.hpp"

namespace jetsym {

/// One PDE in solved form: principal jet coordinate = rhs, encoding
/// Delta = principal - rhs = 0. The rhs must not involve the principal
/// coordinate or any of its total-derivative descendants once fully
/// reduced against the other equations.
struct SolvedPde {
  JetCoordinate principal;
  ExprPtr rhs;
};

struct DomainSpec {
  Rational z_min;
  Rational z_max;

  DomainSpec(Rational lo, Rational hi) : z_min(std::move(lo)), z_max(std::move(hi)) {
    if (!(z_min < z_max)) throw Error("domain requires z_min < z_max");
  }

  bool is_endpoint(const Rational& z) const { return z == z_min || z == z_max; }
};

/// Boundary condition Delta_BC = 0 imposed on {z = location}.
struct BoundaryCondition {
  Rational location;
  ExprPtr expr;
};

namespace detail {

/// Rewrites expressions to a normal form modulo a solved-form system and
/// its differential consequences. Rules are built lazily and memoized; the
/// rule set is exposed for report auditing.
class SolutionReducer {
 public:
  explicit SolutionReducer(std::vector<SolvedPde> system) : system_(std::move(system)) {
    std::set<JetCoordinate> seen;
    for (const auto& pde : system_) {
      if (!seen.insert(pde.principal).second)
        throw ReductionError("duplicate principal derivative in solved system");
    }
    // Validate: every rhs must reduce to a form free of principal
    // descendants; cycles among the principals are detected on the way.
    for (const auto& pde : system_) ensure_rule(pde.principal);
  }

  /// Index of a pde whose principal divides c (componentwise), if any.
  int reducible_by(const JetCoordinate& c) const {
    for (std::size_t i = 0; i < system_.size(); ++i) {
      const JetCoordinate& p = system_[i].principal;
      if (p.dep == c.dep && p.index.leq(c.index)) return static_cast<int>(i);
    }
    return -1;
  }

  ExprPtr reduce(const ExprPtr& e) {
    ExprPtr cur = e;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
      std::map<Sym, ExprPtr> step;
      for (const Sym& s : symbols(cur)) {
        if (!s.is_jet()) continue;
        JetCoordinate c = s.jet_coordinate();
        if (reducible_by(c) >= 0) step.emplace(s, ensure_rule(c));
      }
      if (step.empty()) return normalize(cur);
      cur = normalize(substitute(cur, step));
    }
    throw ReductionError("reduction failed to terminate; system is not triangular");
  }

  /// All rules built so far (principals and their derivative descendants).
  const std::map<JetCoordinate, ExprPtr>& rules() const { return rules_; }

  /// Materializes every descendant rule x^a_{J+K}, |K| <= order.
  void ensure_order(int order) {
    for (const auto& pde : system_) {
      for (int kt = 0; kt <= order; ++kt)
        for (int kz = 0; kz + kt <= order; ++kz)
          ensure_rule({pde.principal.dep,
                       {pde.principal.index.jz + kz, pde.principal.index.jt + kt}});
    }
  }

  const std::vector<SolvedPde>& system() const { return system_; }

 private:
  ExprPtr ensure_rule(const JetCoordinate& c) {
    if (auto it = rules_.find(c); it != rules_.end()) return it->second;
    if (in_progress_.count(c))
      throw ReductionError("circular dependency among principal derivatives");
    in_progress_.insert(c);
    int idx = reducible_by(c);
    if (idx < 0) throw ReductionError("internal: no rule source for coordinate");
    const SolvedPde& pde = system_[idx];
    ExprPtr raw;
    if (c == pde.principal) {
      raw = pde.rhs;
    } else if (c.index.jz > pde.principal.index.jz) {
      raw = total_derivative(ensure_rule({c.dep, {c.index.jz - 1, c.index.jt}}), 0);
    } else {
      raw = total_derivative(ensure_rule({c.dep, {c.index.jz, c.index.jt - 1}}), 1);
    }
    ExprPtr reduced = reduce(raw);
    in_progress_.erase(c);
    rules_.emplace(c, reduced);
    return reduced;
  }

  static constexpr int kMaxPasses = 256;

  std::vector<SolvedPde> system_;
  std::map<JetCoordinate, ExprPtr> rules_;
  std::set<JetCoordinate> in_progress_;
};

}  // namespace detail

/// Rewrite map sending every descendant x^a_{J+K}, |K| <= order, of each
/// principal x^a_J to its fully reduced total derivative of the solved rhs.
/// Right-hand sides contain no principal descendants (triangular map).
inline std::map<JetCoordinate, ExprPtr> differential_consequences(
    const std::vector<SolvedPde>& system, int order) {
  detail::SolutionReducer reducer(system);
  reducer.ensure_order(order);
  return reducer.rules();
}

/// Normal form of e modulo the system and its differential consequences:
/// the result contains no principal coordinate or descendant, and is 0
/// exactly when e vanishes on every formal solution of the solved system.
inline ExprPtr reduce_to_normal_form(const ExprPtr& e, const std::vector<SolvedPde>& system) {
  if (system.empty()) return normalize(e);
  detail::SolutionReducer reducer(system);
  return reducer.reduce(e);
}

namespace detail {

/// A boundary relation solved for one designated coordinate, closed under
/// tangential (temporal) differentiation: x^a_{(jz, jt0+m)} -> g_m with
/// g_0 the solved right-hand side and g_{m+1} = D_t(g_m).
struct BoundaryRule {
  JetCoordinate designated;
  std::vector<ExprPtr> shifts;  // shifts[m] rewrites the m-th t-derivative

  bool matches(const JetCoordinate& c) const {
    return c.dep == designated.dep && c.index.jz == designated.index.jz &&
           c.index.jt >= designated.index.jt;
  }

  const ExprPtr& shift(int m) {
    while (static_cast<int>(shifts.size()) <= m)
      shifts.push_back(total_derivative(shifts.back(), 1));
    return shifts[m];
  }
};

/// Solve expr = 0 for coordinate c: expr must be linear in c with a
/// c-free, nonzero coefficient. Returns the solution or null.
inline ExprPtr solve_linear_for(const ExprPtr& expr, Sym c) {
  ExprPtr coeff = normalize(partial(expr, c));
  if (is_identically_zero(coeff) || depends_on(coeff, c)) return nullptr;
  ExprPtr rest = substitute(expr, {{c, Expression::constant(0)}});
  // Linearity check: expr == coeff*c + rest.
  ExprPtr recomposed = Expression::add(Expression::mul(coeff, Expression::symbol(c)), rest);
  if (!is_identically_zero(Expression::add(expr, Expression::neg(recomposed)))) return nullptr;
  return normalize(Expression::div(Expression::neg(rest), coeff));
}

}  // namespace detail

/// Restriction of e to the boundary {z = location} of solutions satisfying
/// the given boundary conditions: (i) reduce modulo the system, (ii)
/// substitute z -> location, (iii) rewrite modulo each boundary relation
/// solved for a designated coordinate together with its D_t-consequences
/// (tangential derivatives remain valid on the boundary), (iv) normalize.
/// Only temporal consequences of the boundary relations are used; normal
/// (z-)derivatives are not implied by a relation holding on {z = location}.
/// When used_rules is given, every boundary rewrite rule that was
/// materialized is appended to it for report auditing.
inline ExprPtr restrict_to_boundary(
    const ExprPtr& e, const Rational& location, const std::vector<BoundaryCondition>& bcs,
    const std::vector<SolvedPde>& system,
    std::vector<std::pair<JetCoordinate, ExprPtr>>* used_rules = nullptr) {
  for (const auto& bc : bcs)
    if (bc.location != location)
      throw ReductionError("boundary conditions passed to restrict_to_boundary must share one location");

  std::optional<detail::SolutionReducer> reducer;
  if (!system.empty()) reducer.emplace(system);

  auto system_reduce = [&](const ExprPtr& x) { return reducer ? reducer->reduce(x) : normalize(x); };

  const Sym z = Sym::indep(0);
  const std::map<Sym, ExprPtr> z_rule{{z, Expression::constant(location)}};
  auto at_boundary = [&](const ExprPtr& x) { return normalize(substitute(x, z_rule)); };

  ExprPtr cur = at_boundary(system_reduce(e));

  // Solve each boundary relation for its designated coordinate: by default
  // the lowest-order jet coordinate occurring, skipping coordinates already
  // designated by an earlier relation.
  std::vector<detail::BoundaryRule> rules;
  for (const auto& bc : bcs) {
    ExprPtr local = at_boundary(system_reduce(bc.expr));
    if (is_identically_zero(local)) continue;  // vacuous on the boundary
    std::vector<Sym> candidates;
    for (const Sym& s : symbols(local))
      if (s.is_jet()) candidates.push_back(s);
    std::sort(candidates.begin(), candidates.end(), [](Sym a, Sym b) {
      if (a.derivative_order() != b.derivative_order())
        return a.derivative_order() < b.derivative_order();
      return a < b;
    });
    ExprPtr solved;
    Sym designated;
    for (Sym s : candidates) {
      bool taken = false;
      for (const auto& r : rules)
        if (Sym::jet(r.designated) == s) taken = true;
      if (taken) continue;
      solved = detail::solve_linear_for(local, s);
      if (solved) {
        designated = s;
        break;
      }
    }
    if (!solved)
      throw ReductionError("boundary condition not solvable for any jet coordinate");
    rules.push_back({designated.jet_coordinate(), {solved}});
  }

  // Rewrite until no reducible coordinate remains: boundary-designated
  // t-shifts and (z-substituted) system consequences introduced by D_t.
  auto finish = [&](const ExprPtr& result) {
    if (used_rules) {
      for (auto& rule : rules)
        for (std::size_t m = 0; m < rule.shifts.size(); ++m)
          used_rules->emplace_back(
              JetCoordinate{rule.designated.dep,
                            {rule.designated.index.jz,
                             rule.designated.index.jt + static_cast<int>(m)}},
              rule.shifts[m]);
    }
    return result;
  };
  for (int pass = 0; pass < 256; ++pass) {
    std::map<Sym, ExprPtr> step;
    for (const Sym& s : symbols(cur)) {
      if (!s.is_jet()) continue;
      JetCoordinate c = s.jet_coordinate();
      bool handled = false;
      for (auto& rule : rules) {
        if (rule.matches(c)) {
          ExprPtr g = rule.shift(c.index.jt - rule.designated.index.jt);
          step.emplace(s, at_boundary(system_reduce(g)));
          handled = true;
          break;
        }
      }
      if (!handled && reducer && reducer->reducible_by(c) >= 0)
        step.emplace(s, at_boundary(reducer->reduce(Expression::symbol(s))));
    }
    if (step.empty()) return finish(normalize(cur));
    cur = normalize(substitute(cur, step));
  }
  throw ReductionError("boundary reduction failed to terminate");
}

}  // namespace jetsym
