#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "jetsym/analysis.hpp"
#include "jetsym/parser.hpp"

namespace jetsym::testing {

inline const BundleSpec& bundle() {
  static BundleSpec b({"z", "t"}, {"x"});
  return b;
}

inline const BundleSpec& bundle2() {
  static BundleSpec b({"z", "t"}, {"x", "u"});
  return b;
}

inline ExprPtr P(const std::string& src) { return parse(src, bundle()); }
inline ExprPtr P2(const std::string& src) { return parse(src, bundle2()); }

inline const Sym kZ = Sym::indep(0);
inline const Sym kT = Sym::indep(1);
inline const Sym kX = Sym::jet(0, 0, 0);
inline const Sym kXz = Sym::jet(0, 1, 0);
inline const Sym kXt = Sym::jet(0, 0, 1);
inline const Sym kXzz = Sym::jet(0, 2, 0);
inline const Sym kXzt = Sym::jet(0, 1, 1);
inline const Sym kXtt = Sym::jet(0, 0, 2);

/// The running example: x_t = (x+1) x_z on (0,1), x(1,t) = 0, y = x_z/x at 0.
inline SystemDefinition example_system() {
  return SystemDefinition{bundle(),
                          DomainSpec(Rational(0), Rational(1)),
                          {SolvedPde{JetCoordinate{0, {0, 1}}, P("(x+1)*x_z")}},
                          {BoundaryCondition{Rational(1), P("x")}},
                          {OutputFunctional{"y", P("x_z / x"), Rational(0)}}};
}

inline GeneralizedVectorField example_field() {
  return GeneralizedVectorField{P("z*x"), P("0"), {P("(x+1)*x")}};
}

inline GeneralizedVectorField shift_field() {
  return GeneralizedVectorField{P("0"), P("0"), {P("1")}};
}

inline GeneralizedVectorField time_translation() {
  return GeneralizedVectorField{P("0"), P("1"), {P("0")}};
}

inline ExprPtr example_profile() { return P("(1/2)*(1-z)"); }

// ---------------------------------------------------------------------------
// Characteristics oracle for the example, derived independently of the
// solver. Along dz/dt = -(x+1) the solution is constant, so a characteristic
// through (z0, 0) carries x0 = 0.5 (1 - z0) and reaches
//   z(t) = z0 - (1 + x0) t  =>  z0 = (z + 1.5 t) / (1 + 0.5 t).
// Points with z > 1 - t are fed from the x = 0 boundary at z = 1. Hence
//   x(z,t) = 0.5 (1 - t - z) / (1 + 0.5 t)  for z <= 1 - t, else 0,
//   y(t)   = x_z / x |_{z=0} = -1 / (1 - t).
// ---------------------------------------------------------------------------
inline double oracle_x(double z, double t) {
  return z <= 1.0 - t ? 0.5 * (1.0 - t - z) / (1.0 + 0.5 * t) : 0.0;
}

inline double oracle_y(double t) { return -1.0 / (1.0 - t); }

// ---------------------------------------------------------------------------
// Finite-difference oracle for total derivatives: a concrete smooth sample
// gamma(z,t) with hand-written partial derivatives up to total order four.
// jet_point() fills every jet coordinate from those derivatives, so
// evaluate(total_derivative(e, dir), jet) can be compared against a central
// difference of evaluate(e, jet) along the base variable.
// ---------------------------------------------------------------------------
struct SmoothSample {
  // gamma = (z^2 + 1)(t + 2) + z t^3 / 4
  static double value(double z, double t) {
    return (z * z + 1) * (t + 2) + z * t * t * t / 4;
  }
  static double deriv(int jz, int jt, double z, double t) {
    // Hand-derived partial derivatives; zero beyond the stated orders.
    if (jz == 0 && jt == 0) return value(z, t);
    if (jz == 1 && jt == 0) return 2 * z * (t + 2) + t * t * t / 4;
    if (jz == 2 && jt == 0) return 2 * (t + 2);
    if (jz == 0 && jt == 1) return z * z + 1 + 3 * z * t * t / 4;
    if (jz == 0 && jt == 2) return 3 * z * t / 2;
    if (jz == 0 && jt == 3) return 3 * z / 2;
    if (jz == 1 && jt == 1) return 2 * z + 3 * t * t / 4;
    if (jz == 2 && jt == 1) return 2;
    if (jz == 1 && jt == 2) return 3 * t / 2;
    if (jz == 1 && jt == 3) return 1.5;
    return 0;
  }
};

/// Evaluates e at the jet of the smooth sample, in doubles.
inline double eval_on_sample(const ExprPtr& e, double z, double t) {
  std::function<double(const ExprPtr&)> go = [&](const ExprPtr& n) -> double {
    switch (n->kind()) {
      case ExprKind::Constant:
        return to_double(n->constant_value());
      case ExprKind::Symbol: {
        Sym s = n->symbol();
        if (s.is_independent()) return s.indep_index() == 0 ? z : t;
        JetCoordinate c = s.jet_coordinate();
        return SmoothSample::deriv(c.index.jz, c.index.jt, z, t);
      }
      case ExprKind::Add:
        return go(n->left()) + go(n->right());
      case ExprKind::Mul:
        return go(n->left()) * go(n->right());
      case ExprKind::Div:
        return go(n->left()) / go(n->right());
      case ExprKind::Neg:
        return -go(n->child());
      case ExprKind::Pow:
        return std::pow(go(n->child()), n->exponent());
    }
    return 0;
  };
  return go(e);
}

/// Central-difference derivative of e along z or t on the smooth sample.
inline double sample_derivative(const ExprPtr& e, int dir, double z, double t,
                                double h = 1e-5) {
  double zp = dir == 0 ? z + h : z, zm = dir == 0 ? z - h : z;
  double tp = dir == 1 ? t + h : t, tm = dir == 1 ? t - h : t;
  return (eval_on_sample(e, zp, tp) - eval_on_sample(e, zm, tm)) / (2 * h);
}

// ---------------------------------------------------------------------------
// Random expression generator (deterministic seed per test site).
// ---------------------------------------------------------------------------
class RandomExpr {
 public:
  explicit RandomExpr(std::uint64_t seed, bool allow_quotients = true,
                      bool spatial_jets_only = false)
      : rng_(seed), allow_quotients_(allow_quotients), spatial_only_(spatial_jets_only) {}

  ExprPtr gen(int depth = 3) {
    if (depth <= 0) return leaf();
    switch (pick(allow_quotients_ ? 12 : 10)) {
      case 0:
      case 1:
      case 2:
        return Expression::add(gen(depth - 1), gen(depth - 1));
      case 3:
      case 4:
      case 5:
        return Expression::mul(gen(depth - 1), gen(depth - 1));
      case 6:
        return Expression::neg(gen(depth - 1));
      case 7:
        return Expression::pow(gen(depth - 2 > 0 ? depth - 2 : 0), 2 + pick(2));
      case 8:
      case 9:
        return leaf();
      case 10:
      case 11:
        return Expression::div(gen(depth - 1), denominator());
      default:
        return leaf();
    }
  }

  /// Polynomial-only generator (no quotients, small powers).
  ExprPtr gen_poly(int depth = 3) {
    if (depth <= 0) return leaf();
    switch (pick(8)) {
      case 0:
      case 1:
      case 2:
        return Expression::add(gen_poly(depth - 1), gen_poly(depth - 1));
      case 3:
      case 4:
        return Expression::mul(gen_poly(depth - 1), gen_poly(depth - 1));
      case 5:
        return Expression::neg(gen_poly(depth - 1));
      case 6:
        return Expression::pow(leaf(), 2);
      default:
        return leaf();
    }
  }

  Rational rational() {
    int num = static_cast<int>(pick(13)) - 6;
    int den = 1 + static_cast<int>(pick(4));
    return Rational(num, den);
  }

  Rational nonzero_rational() {
    Rational r = rational();
    return r == 0 ? Rational(1, 2) : r;
  }

  Sym symbol() {
    if (spatial_only_) {
      switch (pick(5)) {
        case 0:
          return Sym::indep(0);
        case 1:
          return Sym::indep(1);
        case 2:
          return Sym::jet(0, 0, 0);
        case 3:
          return Sym::jet(0, 1, 0);
        default:
          return Sym::jet(0, 2 + pick(2), 0);
      }
    }
    switch (pick(6)) {
      case 0:
        return Sym::indep(0);
      case 1:
        return Sym::indep(1);
      case 2:
        return Sym::jet(0, 0, 0);
      case 3:
        return Sym::jet(0, 1, 0);
      case 4:
        return Sym::jet(0, 0, 1);
      default:
        return Sym::jet(0, 1 + pick(2), pick(2));
    }
  }

  std::size_t pick(std::size_t n) { return rng_() % n; }

 private:
  ExprPtr leaf() {
    if (pick(3) == 0) return Expression::constant(rational());
    return Expression::symbol(symbol());
  }

  /// Denominators from a pool that is never identically zero.
  ExprPtr denominator() {
    static const char* pool[] = {"x", "x+1", "z+2", "x_z+1", "2", "x^2+1"};
    return parse(pool[pick(std::size(pool))], bundle());
  }

  std::mt19937_64 rng_;
  bool allow_quotients_;
  bool spatial_only_ = false;
};

/// Random rational point covering the symbols of the given expressions;
/// returns false if evaluation keeps hitting a zero denominator.
inline bool random_point(RandomExpr& gen, const std::vector<ExprPtr>& exprs,
                         std::map<Sym, Rational>& out, int retries = 20) {
  std::set<Sym> syms;
  for (const auto& e : exprs) collect_symbols(e, syms);
  for (int attempt = 0; attempt < retries; ++attempt) {
    out.clear();
    for (Sym s : syms) out[s] = gen.nonzero_rational();
    bool ok = true;
    for (const auto& e : exprs) {
      try {
        (void)evaluate(e, out);
      } catch (const EvalError&) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace jetsym::testing
