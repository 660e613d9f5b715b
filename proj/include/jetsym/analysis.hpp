#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jetsym/reduction.hpp"
#include "jetsym/vector_field.hpp"

namespace jetsym {

/// Point output y = c(x, x_z, ...) evaluated at {z = location}.
struct OutputFunctional {
  std::string name;
  ExprPtr expr;
  Rational location;
};

/// A PDE system with boundary conditions and point outputs over one bundle.
struct SystemDefinition {
  BundleSpec bundle;
  DomainSpec domain;
  std::vector<SolvedPde> pdes;
  std::vector<BoundaryCondition> bcs;
  std::vector<OutputFunctional> outputs;

  std::vector<BoundaryCondition> bcs_at(const Rational& z) const {
    std::vector<BoundaryCondition> out;
    for (const auto& bc : bcs)
      if (bc.location == z) out.push_back(bc);
    return out;
  }

  /// Delta = principal - rhs for pde nu.
  ExprPtr pde_residual_function(int nu) const {
    const SolvedPde& p = pdes.at(nu);
    return Expression::add(Expression::symbol(Sym::jet(p.principal)),
                           Expression::neg(p.rhs));
  }
};

enum class Verdict { Pass, Fail };

inline const char* to_string(Verdict v) { return v == Verdict::Pass ? "pass" : "fail"; }

/// Result of one infinitesimal check. Residuals are fully reduced; the
/// check passes exactly when every residual is the zero expression.
struct CheckResult {
  Verdict verdict = Verdict::Pass;
  std::vector<ExprPtr> residuals;
  std::vector<std::string> labels;  // aligned with residuals
  bool generic_point = false;       // output check only: nontrivial denominator
  // Boundary rewrite rules the restriction relied on, for auditing.
  std::vector<std::string> boundary_rules;

  void record(std::string label, ExprPtr residual) {
    if (!is_identically_zero(residual)) verdict = Verdict::Fail;
    labels.push_back(std::move(label));
    residuals.push_back(std::move(residual));
  }
};

/// Aggregated verdict of the three infinitesimal conditions. The
/// certificate is infinitesimal by construction: it asserts nothing about
/// the existence of the generated group action.
struct CertificateReport {
  CheckResult pde_check;
  CheckResult bc_check;      // one entry per boundary condition
  CheckResult output_check;  // one entry per output functional
  Verdict overall = Verdict::Fail;
  std::string caveat;
  std::string fail_reason;  // set for degenerate fields

  bool passed() const { return overall == Verdict::Pass; }
};

inline constexpr const char* kCertificateCaveat =
    "Infinitesimal certificate: the verdict assumes the symmetry group "
    "action generated by the field exists; existence is not verified by "
    "this tool.";

/// Checks that the prolonged Lie derivative of every PDE residual function
/// vanishes on the solution manifold, along both the field itself and its
/// evolutionary form. The two routes must agree; disagreement indicates an
/// internal defect and throws.
inline CheckResult check_pde_symmetry(const SystemDefinition& sys,
                                      const GeneralizedVectorField& v) {
  CheckResult out;
  EvolutionaryField vq = evolutionary_form(v);
  for (int nu = 0; nu < static_cast<int>(sys.pdes.size()); ++nu) {
    ExprPtr delta = sys.pde_residual_function(nu);
    ExprPtr via_field = reduce_to_normal_form(lie_derivative(v, delta), sys.pdes);
    ExprPtr via_evolutionary = reduce_to_normal_form(lie_derivative(vq, delta), sys.pdes);
    if (is_identically_zero(via_field) != is_identically_zero(via_evolutionary))
      throw Error("internal: pde symmetry verdicts via v and v_Q disagree");
    out.record("pde[" + std::to_string(nu) + "] via field", via_field);
    out.record("pde[" + std::to_string(nu) + "] via evolutionary form", via_evolutionary);
  }
  return out;
}

/// Checks the boundary conditions along the evolutionary form (using v_Q is
/// essential here even for non-vertical fields): each Lie derivative must
/// vanish on solutions satisfying the boundary conditions at that location.
inline CheckResult check_bc_symmetry(const SystemDefinition& sys,
                                     const GeneralizedVectorField& v) {
  CheckResult out;
  EvolutionaryField vq = evolutionary_form(v);
  for (std::size_t i = 0; i < sys.bcs.size(); ++i) {
    const BoundaryCondition& bc = sys.bcs[i];
    ExprPtr lie = lie_derivative(vq, bc.expr);
    std::vector<std::pair<JetCoordinate, ExprPtr>> used;
    ExprPtr residual =
        restrict_to_boundary(lie, bc.location, sys.bcs_at(bc.location), sys.pdes, &used);
    out.record("bc[" + std::to_string(i) + "] at " + sys.bundle.spatial_name() + "=" +
                   to_string(bc.location),
               residual);
    for (const auto& [coord, rhs] : used)
      out.boundary_rules.push_back(sys.bundle.name_of(Sym::jet(coord)) + " -> " +
                                   to_string(rhs, sys.bundle) + " at " +
                                   sys.bundle.spatial_name() + "=" + to_string(bc.location));
  }
  return out;
}

/// Checks that each output functional is infinitesimally invariant: the
/// Lie derivative along v_Q, restricted to the output location (with any
/// boundary conditions there), vanishes.
inline CheckResult check_output_invariance(const SystemDefinition& sys,
                                           const GeneralizedVectorField& v) {
  CheckResult out;
  EvolutionaryField vq = evolutionary_form(v);
  for (const OutputFunctional& y : sys.outputs) {
    ExprPtr lie = lie_derivative(vq, y.expr);
    std::vector<std::pair<JetCoordinate, ExprPtr>> used;
    ExprPtr residual =
        restrict_to_boundary(lie, y.location, sys.bcs_at(y.location), sys.pdes, &used);
    out.record("output " + y.name + " at " + sys.bundle.spatial_name() + "=" +
                   to_string(y.location),
               residual);
    for (const auto& [coord, rhs] : used)
      out.boundary_rules.push_back(sys.bundle.name_of(Sym::jet(coord)) + " -> " +
                                   to_string(rhs, sys.bundle) + " at " +
                                   sys.bundle.spatial_name() + "=" + to_string(y.location));
    // Rational normal forms treat denominators formally; flag outputs whose
    // denominator could vanish on a solution.
    if (!to_rational_form(y.expr).den.is_constant()) out.generic_point = true;
  }
  return out;
}

/// Runs the three checks and aggregates. A pass additionally requires the
/// field to act nontrivially: a field whose characteristics all reduce to
/// zero on solutions transforms no solution and certifies nothing.
inline CertificateReport certify_nonobservability(const SystemDefinition& sys,
                                                  const GeneralizedVectorField& v) {
  CertificateReport report;
  report.caveat = kCertificateCaveat;
  report.pde_check = check_pde_symmetry(sys, v);
  report.bc_check = check_bc_symmetry(sys, v);
  report.output_check = check_output_invariance(sys, v);

  bool trivial = true;
  for (const ExprPtr& q : evolutionary_form(v).q)
    if (!is_identically_zero(reduce_to_normal_form(q, sys.pdes))) trivial = false;

  bool all_pass = report.pde_check.verdict == Verdict::Pass &&
                  report.bc_check.verdict == Verdict::Pass &&
                  report.output_check.verdict == Verdict::Pass;

  if (trivial) {
    report.overall = Verdict::Fail;
    report.fail_reason =
        "trivial symmetry: the characteristics vanish on every solution, so "
        "the field produces no distinct indistinguishable pair";
  } else {
    report.overall = all_pass ? Verdict::Pass : Verdict::Fail;
    if (!all_pass) report.fail_reason = "an infinitesimal condition has a nonzero residual";
  }
  return report;
}

}  // namespace jetsym
