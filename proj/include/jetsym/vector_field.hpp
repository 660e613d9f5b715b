#pragma once

#include <map>
#include <vector>

#include "jetsym/calculus.hpp"

namespace jetsym {

/// Generalized vector field v = v_z d/dz + v_t d/dt + sum_a v_x^a d/dx^a.
/// Components may depend on jet coordinates of any finite order.
struct GeneralizedVectorField {
  ExprPtr v_z;
  ExprPtr v_t;
  std::vector<ExprPtr> v_x;  // one per dependent variable

  int dependent_count() const { return static_cast<int>(v_x.size()); }
};

/// Vertical field with characteristics Q^a; v_z = v_t = 0 implicitly.
struct EvolutionaryField {
  std::vector<ExprPtr> q;

  int dependent_count() const { return static_cast<int>(q.size()); }
};

/// Prolongation of a field to jet order `order`. For an evolutionary base
/// the coefficient of x^a_J is D_J Q^a; a non-vertical base contributes the
/// extra advection terms v_z D_z + v_t D_t recorded separately.
struct ProlongedField {
  EvolutionaryField characteristics;
  int order = 0;
  std::map<JetCoordinate, ExprPtr> coefficients;
  ExprPtr advect_z;  // null for a purely evolutionary prolongation
  ExprPtr advect_t;
};

inline GeneralizedVectorField zero_field(int q) {
  GeneralizedVectorField v;
  v.v_z = Expression::constant(0);
  v.v_t = Expression::constant(0);
  v.v_x.assign(q, Expression::constant(0));
  return v;
}

inline bool is_zero_field(const GeneralizedVectorField& v) {
  if (!is_identically_zero(v.v_z) || !is_identically_zero(v.v_t)) return false;
  for (const auto& c : v.v_x)
    if (!is_identically_zero(c)) return false;
  return true;
}

inline bool is_vertical(const GeneralizedVectorField& v) {
  return is_identically_zero(v.v_z) && is_identically_zero(v.v_t);
}

/// Characteristics Q^a = v_x^a - v_z x^a_z - v_t x^a_t. A vertical field is
/// a fixed point of this construction.
inline EvolutionaryField evolutionary_form(const GeneralizedVectorField& v) {
  EvolutionaryField out;
  out.q.reserve(v.v_x.size());
  for (int a = 0; a < v.dependent_count(); ++a) {
    ExprPtr xz = Expression::symbol(Sym::jet(a, 1, 0));
    ExprPtr xt = Expression::symbol(Sym::jet(a, 0, 1));
    out.q.push_back(normalize(
        v.v_x[a] - Expression::mul(v.v_z, xz) - Expression::mul(v.v_t, xt)));
  }
  return out;
}

/// Coefficients D_J Q^a for all |J| <= order, built along the recursion
/// D_{J+1_z} Q = D_z(D_J Q).
inline ProlongedField prolong(const EvolutionaryField& f, int order) {
  if (order < 0) throw AlgebraError("prolongation order must be nonnegative");
  ProlongedField out;
  out.characteristics = f;
  out.order = order;
  for (int a = 0; a < f.dependent_count(); ++a) {
    // Fill by increasing t-order, then z-order, so the predecessor is present.
    for (int jt = 0; jt <= order; ++jt) {
      for (int jz = 0; jz + jt <= order; ++jz) {
        JetCoordinate c{a, {jz, jt}};
        ExprPtr value;
        if (jz == 0 && jt == 0) {
          value = normalize(f.q[a]);
        } else if (jz > 0) {
          value = total_derivative(out.coefficients.at({a, {jz - 1, jt}}), 0);
        } else {
          value = total_derivative(out.coefficients.at({a, {0, jt - 1}}), 1);
        }
        out.coefficients.emplace(c, std::move(value));
      }
    }
  }
  return out;
}

/// Non-vertical prolongation via the evolutionary decomposition
/// pr v = pr v_Q + v_z D_z + v_t D_t.
inline ProlongedField prolong(const GeneralizedVectorField& v, int order) {
  ProlongedField out = prolong(evolutionary_form(v), order);
  out.advect_z = v.v_z;
  out.advect_t = v.v_t;
  return out;
}

/// Lie derivative of e along the prolonged evolutionary field:
/// sum over the jet coordinates of e of D_J Q^a * de/dx^a_J.
/// The prolongation order is the maximal derivative order of e.
inline ExprPtr lie_derivative(const EvolutionaryField& f, const ExprPtr& e) {
  for (const Sym& s : symbols(e))
    if (s.is_jet() && s.jet_coordinate().dep >= f.dependent_count())
      throw AlgebraError("expression references a dependent variable the field lacks");
  ProlongedField pr = prolong(f, max_derivative_order(e));
  ExprPtr sum = Expression::constant(0);
  for (const Sym& s : symbols(e)) {
    if (!s.is_jet()) continue;
    const ExprPtr& coeff = pr.coefficients.at(s.jet_coordinate());
    sum = detail::s_add(sum, detail::s_mul(coeff, partial(e, s)));
  }
  return normalize(sum);
}

/// Lie derivative along the prolongation of a generalized vector field,
/// computed as L_{v_Q} e + v_z D_z(e) + v_t D_t(e).
inline ExprPtr lie_derivative(const GeneralizedVectorField& v, const ExprPtr& e) {
  ExprPtr vertical = lie_derivative(evolutionary_form(v), e);
  ExprPtr advection = detail::s_add(detail::s_mul(v.v_z, total_derivative(e, 0)),
                                    detail::s_mul(v.v_t, total_derivative(e, 1)));
  return normalize(Expression::add(vertical, advection));
}

}  // namespace jetsym
