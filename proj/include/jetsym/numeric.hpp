#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jetsym/analysis.hpp"

namespace jetsym {

/// Uniform spatial grid with n >= 3 nodes.
struct Grid {
  int n;
  double z_min;
  double z_max;
  double dz;

  static Grid uniform(int n, const DomainSpec& domain) {
    if (n < 3) throw NumericError("grid needs at least 3 nodes");
    double lo = to_double(domain.z_min), hi = to_double(domain.z_max);
    return Grid{n, lo, hi, (hi - lo) / (n - 1)};
  }

  double z(int i) const { return z_min + i * dz; }
};

/// Discrete field values per dependent variable at the grid nodes.
struct FieldState {
  std::vector<std::vector<double>> values;  // [dep][node]
  double time = 0.0;

  int dependent_count() const { return static_cast<int>(values.size()); }
  int nodes() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }

  double max_norm() const {
    double m = 0;
    for (const auto& u : values)
      for (double v : u) m = std::max(m, std::abs(v));
    return m;
  }
};

inline double max_abs_difference(const FieldState& a, const FieldState& b) {
  double m = 0;
  for (int d = 0; d < a.dependent_count(); ++d)
    for (int i = 0; i < a.nodes(); ++i)
      m = std::max(m, std::abs(a.values[d][i] - b.values[d][i]));
  return m;
}

/// Method-of-lines trajectory with per-step output samples. Output entries
/// are NaN where the output denominator fell under the guard threshold.
struct Trajectory {
  std::vector<double> times;
  std::vector<FieldState> states;
  std::vector<std::string> output_names;
  std::vector<std::vector<double>> outputs;  // [output][step]
};

struct FlowResult {
  double epsilon = 0.0;
  FieldState transformed;
};

namespace detail {

/// Slot layout for compiled numeric evaluation: 0 = z, 1 = t, then spatial
/// jets (dep, order) row-major. Temporal jets are rejected; callers reduce
/// modulo the system first.
struct JetSlots {
  int deps = 0;
  int max_order = 0;

  int count() const { return 2 + deps * (max_order + 1); }

  int slot_of(Sym s) const {
    if (s.is_independent()) return s.indep_index();
    JetCoordinate c = s.jet_coordinate();
    if (c.index.jt != 0)
      throw NumericError("expression still contains a temporal jet; reduce modulo the system first");
    if (c.index.jz > max_order || c.dep >= deps)
      throw NumericError("internal: jet outside the compiled slot table");
    return 2 + c.dep * (max_order + 1) + c.index.jz;
  }
};

/// Expression compiled to a postfix program over a slot vector.
class CompiledExpr {
 public:
  CompiledExpr() = default;

  CompiledExpr(const ExprPtr& e, const JetSlots& slots) { emit(e, slots); }

  double eval(const std::vector<double>& slots) const {
    stack_.clear();
    for (const Op& op : ops_) {
      switch (op.code) {
        case Code::Const:
          stack_.push_back(op.value);
          break;
        case Code::Slot:
          stack_.push_back(slots[op.slot]);
          break;
        case Code::Add: {
          double b = pop();
          stack_.back() += b;
          break;
        }
        case Code::Mul: {
          double b = pop();
          stack_.back() *= b;
          break;
        }
        case Code::Div: {
          double b = pop();
          stack_.back() /= b;
          break;
        }
        case Code::Neg:
          stack_.back() = -stack_.back();
          break;
        case Code::Pow:
          stack_.back() = std::pow(stack_.back(), op.slot);
          break;
      }
    }
    return stack_.empty() ? 0.0 : stack_.back();
  }

  bool uses_slot(int slot) const {
    for (const Op& op : ops_)
      if (op.code == Code::Slot && op.slot == slot) return true;
    return false;
  }

 private:
  enum class Code { Const, Slot, Add, Mul, Div, Neg, Pow };
  struct Op {
    Code code;
    int slot = 0;
    double value = 0.0;
  };

  double pop() const {
    double v = stack_.back();
    stack_.pop_back();
    return v;
  }

  void emit(const ExprPtr& e, const JetSlots& slots) {
    switch (e->kind()) {
      case ExprKind::Constant:
        ops_.push_back({Code::Const, 0, to_double(e->constant_value())});
        return;
      case ExprKind::Symbol:
        ops_.push_back({Code::Slot, slots.slot_of(e->symbol()), 0.0});
        return;
      case ExprKind::Add:
        emit(e->left(), slots);
        emit(e->right(), slots);
        ops_.push_back({Code::Add});
        return;
      case ExprKind::Mul:
        emit(e->left(), slots);
        emit(e->right(), slots);
        ops_.push_back({Code::Mul});
        return;
      case ExprKind::Div:
        emit(e->left(), slots);
        emit(e->right(), slots);
        ops_.push_back({Code::Div});
        return;
      case ExprKind::Neg:
        emit(e->child(), slots);
        ops_.push_back({Code::Neg});
        return;
      case ExprKind::Pow:
        emit(e->child(), slots);
        ops_.push_back({Code::Pow, e->exponent()});
        return;
    }
  }

  std::vector<Op> ops_;
  mutable std::vector<double> stack_;
};

/// Spatial derivative arrays d[k][i] up to max_order: second-order central
/// differences in the interior, second-order one-sided at both ends, each
/// order obtained by differencing the previous one.
inline std::vector<std::vector<double>> spatial_jets(const std::vector<double>& u,
                                                     double dz, int max_order) {
  std::vector<std::vector<double>> d;
  d.reserve(max_order + 1);
  d.push_back(u);
  const int n = static_cast<int>(u.size());
  for (int k = 1; k <= max_order; ++k) {
    const std::vector<double>& p = d.back();
    std::vector<double> next(n);
    next[0] = (-3 * p[0] + 4 * p[1] - p[2]) / (2 * dz);
    next[n - 1] = (3 * p[n - 1] - 4 * p[n - 2] + p[n - 3]) / (2 * dz);
    for (int i = 1; i < n - 1; ++i) next[i] = (p[i + 1] - p[i - 1]) / (2 * dz);
    d.push_back(std::move(next));
  }
  return d;
}

/// Numeric boundary handler: a boundary condition solved for the node value
/// of one dependent variable at one endpoint.
struct NodeBc {
  int dep = 0;
  int node = 0;  // 0 or n-1
  CompiledExpr value;
};

struct OutputEvaluator {
  std::string name;
  int node = 0;
  CompiledExpr num;
  CompiledExpr den;
  bool den_constant = true;
};

/// Shared machinery for both the time evolution and the group flow: slot
/// tables, compiled right-hand sides, boundary handlers, output stencils.
class Discretization {
 public:
  Discretization(const SystemDefinition& sys, const Grid& grid,
                 const std::vector<ExprPtr>& rhs_per_dep, int extra_order = 0)
      : grid_(grid), deps_(sys.bundle.dependent_count()) {
    int max_order = extra_order;
    for (const auto& r : rhs_per_dep) max_order = std::max(max_order, max_derivative_order(r));
    for (const auto& y : sys.outputs) max_order = std::max(max_order, max_derivative_order(y.expr));
    slots_ = JetSlots{deps_, std::max(1, max_order)};

    rhs_.reserve(rhs_per_dep.size());
    speed_.resize(rhs_per_dep.size());
    uses_own_first_derivative_.resize(rhs_per_dep.size(), false);
    for (int a = 0; a < static_cast<int>(rhs_per_dep.size()); ++a) {
      rhs_.emplace_back(rhs_per_dep[a], slots_);
      Sym own_xz = Sym::jet(a, 1, 0);
      if (depends_on(rhs_per_dep[a], own_xz)) {
        uses_own_first_derivative_[a] = true;
        speed_[a] = CompiledExpr(normalize(Expression::neg(partial(rhs_per_dep[a], own_xz))), slots_);
      }
      // Every first-derivative sensitivity drhs^a/dx^b_z enters the step
      // bound, so cross-coupled systems get a finite dt as well.
      for (int b = 0; b < deps_; ++b) {
        Sym xz = Sym::jet(b, 1, 0);
        if (depends_on(rhs_per_dep[a], xz))
          cfl_sensitivities_.emplace_back(normalize(partial(rhs_per_dep[a], xz)), slots_);
      }
    }

    for (const auto& bc : sys.bcs) {
      ExprPtr local = normalize(substitute(
          reduce_to_normal_form(bc.expr, sys.pdes),
          {{Sym::indep(0), Expression::constant(bc.location)}}));
      if (is_identically_zero(local)) continue;
      NodeBc handler;
      handler.node = bc.location == sys.domain.z_min ? 0 : grid.n - 1;
      ExprPtr solved;
      for (const Sym& s : symbols(local)) {
        if (!s.is_jet() || s.derivative_order() != 0) continue;
        solved = solve_linear_for(local, s);
        if (solved) {
          handler.dep = s.jet_coordinate().dep;
          break;
        }
      }
      if (!solved)
        throw NumericError("boundary condition not solvable for a boundary node value");
      handler.value = CompiledExpr(solved, slots_);
      bcs_.push_back(std::move(handler));
    }

    for (const auto& y : sys.outputs) {
      ExprPtr local = normalize(substitute(
          reduce_to_normal_form(y.expr, sys.pdes),
          {{Sym::indep(0), Expression::constant(y.location)}}));
      RationalForm rf = to_rational_form(local);
      OutputEvaluator ev;
      ev.name = y.name;
      double zo = to_double(y.location);
      ev.node = static_cast<int>(std::lround((zo - grid.z_min) / grid.dz));
      ev.node = std::min(std::max(ev.node, 0), grid.n - 1);
      ev.num = CompiledExpr(polynomial_to_expression(rf.num), slots_);
      ev.den = CompiledExpr(polynomial_to_expression(rf.den), slots_);
      ev.den_constant = rf.den.is_constant();
      outputs_.push_back(std::move(ev));
    }
  }

  const Grid& grid() const { return grid_; }
  const JetSlots& slots() const { return slots_; }
  int dependent_count() const { return deps_; }
  const std::vector<OutputEvaluator>& outputs() const { return outputs_; }

  /// Per-dependent derivative tables for the current values.
  std::vector<std::vector<std::vector<double>>> jets(const FieldState& s) const {
    std::vector<std::vector<std::vector<double>>> out;
    out.reserve(deps_);
    for (int a = 0; a < deps_; ++a)
      out.push_back(spatial_jets(s.values[a], grid_.dz, slots_.max_order));
    return out;
  }

  void fill_slots(const std::vector<std::vector<std::vector<double>>>& jets, double t,
                  int node, std::vector<double>& slots) const {
    slots.assign(slots_.count(), 0.0);
    slots[0] = grid_.z(node);
    slots[1] = t;
    for (int a = 0; a < deps_; ++a)
      for (int k = 0; k <= slots_.max_order; ++k)
        slots[2 + a * (slots_.max_order + 1) + k] = jets[a][k][node];
  }

  /// Semi-discrete right-hand side. The slot for a variable's own first
  /// z-derivative is replaced per node by an upwind difference chosen from
  /// the sign of the local characteristic speed; all other derivative slots
  /// use the central tables.
  void eval_rhs(const FieldState& s, std::vector<std::vector<double>>& out) const {
    auto tables = jets(s);
    const int n = grid_.n;
    out.assign(deps_, std::vector<double>(n, 0.0));
    std::vector<double> slots;
    for (int a = 0; a < static_cast<int>(rhs_.size()); ++a) {
      const int own_slot = 2 + a * (slots_.max_order + 1) + 1;
      for (int i = 0; i < n; ++i) {
        if (is_bc_node(a, i)) continue;
        fill_slots(tables, s.time, i, slots);
        if (uses_own_first_derivative_[a]) {
          double speed = speed_[a].eval(slots);
          const std::vector<double>& u = s.values[a];
          double upwind;
          if (i == 0) {
            upwind = (u[1] - u[0]) / grid_.dz;
          } else if (i == n - 1) {
            upwind = (u[n - 1] - u[n - 2]) / grid_.dz;
          } else if (speed > kSpeedTol) {
            upwind = (u[i] - u[i - 1]) / grid_.dz;
          } else if (speed < -kSpeedTol) {
            upwind = (u[i + 1] - u[i]) / grid_.dz;
          } else {
            upwind = slots[own_slot];  // stagnation: keep the central value
          }
          slots[own_slot] = upwind;
        }
        out[a][i] = rhs_[a].eval(slots);
      }
    }
  }

  bool is_bc_node(int dep, int node) const {
    for (const auto& bc : bcs_)
      if (bc.dep == dep && bc.node == node) return true;
    return false;
  }

  void impose_bcs(FieldState& s) const {
    if (bcs_.empty()) return;
    auto tables = jets(s);
    std::vector<double> slots;
    for (const auto& bc : bcs_) {
      fill_slots(tables, s.time, bc.node, slots);
      s.values[bc.dep][bc.node] = bc.value.eval(slots);
    }
  }

  /// Largest first-derivative sensitivity over the grid: bounds the
  /// characteristic speeds of the semi-discrete system for the step rule.
  double max_speed(const FieldState& s) const {
    if (cfl_sensitivities_.empty()) return 0;
    auto tables = jets(s);
    std::vector<double> slots;
    double m = 0;
    for (int i = 0; i < grid_.n; ++i) {
      fill_slots(tables, s.time, i, slots);
      for (const auto& sens : cfl_sensitivities_)
        m = std::max(m, std::abs(sens.eval(slots)));
    }
    return m;
  }

  std::vector<double> evaluate_outputs(const FieldState& s, double guard_scale) const {
    auto tables = jets(s);
    std::vector<double> slots;
    std::vector<double> out;
    out.reserve(outputs_.size());
    for (const auto& y : outputs_) {
      fill_slots(tables, s.time, y.node, slots);
      double num = y.num.eval(slots);
      double den = y.den.eval(slots);
      double value = num / den;
      if (!y.den_constant && std::abs(den) < kDenominatorGuard * guard_scale)
        value = std::numeric_limits<double>::quiet_NaN();
      out.push_back(std::isfinite(value) ? value
                                         : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
  }

  static constexpr double kSpeedTol = 1e-12;
  static constexpr double kDenominatorGuard = 1e-6;

 private:
  Grid grid_;
  int deps_;
  JetSlots slots_;
  std::vector<CompiledExpr> rhs_;
  std::vector<CompiledExpr> speed_;
  std::vector<CompiledExpr> cfl_sensitivities_;
  std::vector<bool> uses_own_first_derivative_;
  std::vector<NodeBc> bcs_;
  std::vector<OutputEvaluator> outputs_;
};

inline void rk4_step(const Discretization& disc, FieldState& s, double h) {
  auto axpy = [](const FieldState& base, const std::vector<std::vector<double>>& k,
                 double c, double t) {
    FieldState out = base;
    out.time = t;
    for (std::size_t a = 0; a < k.size(); ++a)
      for (std::size_t i = 0; i < k[a].size(); ++i) out.values[a][i] += c * k[a][i];
    return out;
  };
  std::vector<std::vector<double>> k1, k2, k3, k4;
  disc.eval_rhs(s, k1);
  FieldState s2 = axpy(s, k1, h / 2, s.time + h / 2);
  disc.impose_bcs(s2);
  disc.eval_rhs(s2, k2);
  FieldState s3 = axpy(s, k2, h / 2, s.time + h / 2);
  disc.impose_bcs(s3);
  disc.eval_rhs(s3, k3);
  FieldState s4 = axpy(s, k3, h, s.time + h);
  disc.impose_bcs(s4);
  disc.eval_rhs(s4, k4);
  for (std::size_t a = 0; a < k1.size(); ++a)
    for (std::size_t i = 0; i < k1[a].size(); ++i)
      s.values[a][i] += h / 6 * (k1[a][i] + 2 * k2[a][i] + 2 * k3[a][i] + k4[a][i]);
  s.time += h;
  disc.impose_bcs(s);
}

/// Fully reduced right-hand sides of an evolution system (principals
/// x^a_{(0,1)}, one per dependent variable, no temporal jets remaining).
inline std::vector<ExprPtr> evolution_rhs(const SystemDefinition& sys) {
  const int q = sys.bundle.dependent_count();
  std::vector<ExprPtr> rhs(q);
  if (static_cast<int>(sys.pdes.size()) != q)
    throw NumericError("simulation needs exactly one evolution equation per dependent variable");
  SolutionReducer reducer(sys.pdes);
  for (const auto& pde : sys.pdes) {
    if (pde.principal.index.jz != 0 || pde.principal.index.jt != 1)
      throw NumericError("simulation requires solved evolution form x_t = f(...)");
    if (rhs[pde.principal.dep])
      throw NumericError("two evolution equations for one dependent variable");
    ExprPtr r = reducer.reduce(pde.rhs);
    for (const Sym& s : symbols(r))
      if (s.is_jet() && s.jet_coordinate().index.jt != 0)
        throw NumericError("right-hand side is not expressible in spatial jets");
    rhs[pde.principal.dep] = r;
  }
  return rhs;
}

}  // namespace detail

inline constexpr double kCflSafety = 0.5;
inline constexpr double kBlowupGuard = 1e6;

/// Output-trajectory distances below this are indistinguishable from
/// floating-point accumulation and count as converged to zero.
inline constexpr double kConvergenceFloor = 1e-10;

/// Samples profile expressions (in z only) onto the grid and imposes the
/// boundary conditions.
inline FieldState make_initial_state(const SystemDefinition& sys,
                                     const std::vector<ExprPtr>& profiles, const Grid& grid,
                                     double time = 0.0) {
  const int q = sys.bundle.dependent_count();
  if (static_cast<int>(profiles.size()) != q)
    throw NumericError("need one initial profile per dependent variable");
  FieldState s;
  s.time = time;
  s.values.assign(q, std::vector<double>(grid.n, 0.0));
  detail::JetSlots zslot{0, 0};
  for (int a = 0; a < q; ++a) {
    for (const Sym& sym : symbols(profiles[a]))
      if (!(sym.is_independent() && sym.indep_index() == 0))
        throw NumericError("initial profiles may depend on the spatial variable only");
    detail::CompiledExpr c(profiles[a], zslot);
    std::vector<double> slots(2, 0.0);
    for (int i = 0; i < grid.n; ++i) {
      slots[0] = grid.z(i);
      s.values[a][i] = c.eval(slots);
    }
  }
  detail::Discretization disc(sys, grid, detail::evolution_rhs(sys));
  disc.impose_bcs(s);
  return s;
}

/// Method-of-lines simulation of a solved evolution system on [initial.time,
/// t_end]: upwind first differences for each equation's own advection term,
/// classic fourth-order Runge-Kutta in time with dt <= 0.5 dz / max|speed|,
/// boundary nodes overwritten from the boundary conditions every step,
/// outputs sampled every step with one-sided stencils at the ends.
inline Trajectory simulate(const SystemDefinition& sys, const FieldState& initial,
                           double t_end, const Grid& grid, double dt = 0.0) {
  detail::Discretization disc(sys, grid, detail::evolution_rhs(sys));

  const double span = t_end - initial.time;
  if (span <= 0) throw NumericError("t_end must exceed the initial time");
  double bound = kCflSafety * grid.dz / std::max(disc.max_speed(initial), 1e-12);
  if (dt > 0 && dt > bound * (1 + 1e-9))
    throw NumericError("dt exceeds the stability bound " + std::to_string(bound));
  double step = dt > 0 ? dt : bound;
  int steps = std::max(1, static_cast<int>(std::ceil(span / step - 1e-12)));
  step = span / steps;

  FieldState s = initial;
  disc.impose_bcs(s);
  const double guard = kBlowupGuard * (1 + s.max_norm());
  const double output_scale = std::max(s.max_norm(), 1e-12);

  Trajectory traj;
  for (const auto& y : disc.outputs()) traj.output_names.push_back(y.name);
  traj.outputs.resize(disc.outputs().size());

  auto record = [&](const FieldState& state) {
    traj.times.push_back(state.time);
    traj.states.push_back(state);
    std::vector<double> ys = disc.evaluate_outputs(state, output_scale);
    for (std::size_t k = 0; k < ys.size(); ++k) traj.outputs[k].push_back(ys[k]);
  };

  record(s);
  for (int k = 0; k < steps; ++k) {
    detail::rk4_step(disc, s, step);
    if (s.max_norm() > guard)
      throw NumericError("simulation instability detected at t = " + std::to_string(s.time));
    record(s);
  }
  return traj;
}

/// Integrates the symmetry-group flow d/d_eps x = Q(z, x, x_z, ...) nodewise
/// with central spatial differences, re-imposing the boundary conditions
/// after every step. Q must reduce to first order in z-derivatives (higher
/// order is outside this release) and contain no temporal jets after
/// reduction. flow(state, 0) is the exact identity.
inline FlowResult flow(const SystemDefinition& sys, const GeneralizedVectorField& v,
                       const FieldState& state, const Grid& grid, double epsilon,
                       double d_eps = 0.0) {
  if (epsilon == 0.0) return {0.0, state};

  EvolutionaryField vq = evolutionary_form(v);
  std::vector<ExprPtr> q(vq.q.size());
  for (std::size_t a = 0; a < vq.q.size(); ++a) {
    q[a] = reduce_to_normal_form(vq.q[a], sys.pdes);
    for (const Sym& s : symbols(q[a])) {
      if (!s.is_jet()) continue;
      JetCoordinate c = s.jet_coordinate();
      if (c.index.jt != 0)
        throw NumericError("flow characteristics contain temporal jets after reduction");
      if (c.index.jz > 1)
        throw NumericError(
            "flow supports characteristics of first order in z-derivatives only");
    }
  }

  detail::Discretization disc(sys, grid, q);

  // Stability bound for the eps-evolution, from the advection coefficient
  // dQ/dx_z of each characteristic.
  double bound = kCflSafety * grid.dz / std::max(disc.max_speed(state), 1e-12);
  bound = std::min(bound, std::abs(epsilon));
  if (d_eps > 0 && d_eps > bound * (1 + 1e-9))
    throw NumericError("d_eps exceeds the stability bound " + std::to_string(bound) +
                       "; retry with a smaller step");
  double step = d_eps > 0 ? d_eps : bound;
  int steps = std::max(1, static_cast<int>(std::ceil(std::abs(epsilon) / step - 1e-12)));
  double h = epsilon / steps;

  FieldState s = state;
  const double t_frozen = state.time;
  const double guard = kBlowupGuard * (1 + s.max_norm());
  for (int k = 0; k < steps; ++k) {
    detail::rk4_step(disc, s, h);
    s.time = t_frozen;  // the group parameter, not time, advances
    if (s.max_norm() > guard)
      throw NumericError("flow instability at eps step " + std::to_string(k + 1) +
                         "; retry with a smaller d_eps");
  }
  disc.impose_bcs(s);
  return {epsilon, s};
}

/// Outcome of the first-order flow-response check: the symmetric difference
/// [c(flow(+eps)) - c(flow(-eps))] / (2 eps) against the compiled Lie
/// derivative evaluated on the finite-difference jet of the state.
struct LieCheckReport {
  double eps = 0.0;
  double dz = 0.0;
  std::vector<int> probe_nodes;
  std::vector<double> estimate;  // per probe
  std::vector<double> analytic;  // per probe
  double max_abs_error = 0.0;
  double scale = 1.0;
  double max_rel_error = 0.0;
  double max_abs_estimate = 0.0;
  double observed_coefficient = 0.0;  // max_abs_error / (eps^2 + dz)
};

namespace detail {

inline LieCheckReport lie_check_impl(const SystemDefinition& sys,
                                     const GeneralizedVectorField& v, const ExprPtr& target,
                                     const FieldState& state, const Grid& grid,
                                     std::vector<int> probes, double eps, double d_eps) {
  ExprPtr c_red = reduce_to_normal_form(target, sys.pdes);
  ExprPtr lie = reduce_to_normal_form(
      lie_derivative(evolutionary_form(v), target), sys.pdes);

  std::vector<ExprPtr> rhs = evolution_rhs(sys);
  int order = std::max(max_derivative_order(c_red), max_derivative_order(lie));
  Discretization disc(sys, grid, rhs, order);

  FieldState plus = flow(sys, v, state, grid, eps, d_eps).transformed;
  FieldState minus = flow(sys, v, state, grid, -eps, d_eps).transformed;

  CompiledExpr c_fn(c_red, disc.slots());
  CompiledExpr lie_fn(lie, disc.slots());

  auto base_jets = disc.jets(state);
  auto plus_jets = disc.jets(plus);
  auto minus_jets = disc.jets(minus);

  LieCheckReport report;
  report.eps = eps;
  report.dz = grid.dz;
  report.probe_nodes = std::move(probes);
  std::vector<double> slots;
  for (int i : report.probe_nodes) {
    disc.fill_slots(plus_jets, state.time, i, slots);
    double cp = c_fn.eval(slots);
    disc.fill_slots(minus_jets, state.time, i, slots);
    double cm = c_fn.eval(slots);
    disc.fill_slots(base_jets, state.time, i, slots);
    double ana = lie_fn.eval(slots);
    double est = (cp - cm) / (2 * eps);
    report.estimate.push_back(est);
    report.analytic.push_back(ana);
    report.max_abs_error = std::max(report.max_abs_error, std::abs(est - ana));
    report.max_abs_estimate = std::max(report.max_abs_estimate, std::abs(est));
    report.scale = std::max(report.scale, std::abs(ana));
  }
  report.max_rel_error = report.max_abs_error / report.scale;
  report.observed_coefficient = report.max_abs_error / (eps * eps + grid.dz);
  return report;
}

}  // namespace detail

/// Checks the first-order response of a jet expression at interior nodes.
inline LieCheckReport finite_difference_lie_check(const SystemDefinition& sys,
                                                  const GeneralizedVectorField& v,
                                                  const ExprPtr& target,
                                                  const FieldState& state, const Grid& grid,
                                                  double eps, double d_eps = 0.0) {
  std::vector<int> probes;
  const int margin = 3;
  for (int i = margin; i < grid.n - margin; ++i) probes.push_back(i);
  if (probes.empty()) throw NumericError("grid too small for interior probes");
  return detail::lie_check_impl(sys, v, target, state, grid, std::move(probes), eps, d_eps);
}

/// Checks the first-order response of a point output at its location.
inline LieCheckReport finite_difference_lie_check(const SystemDefinition& sys,
                                                  const GeneralizedVectorField& v,
                                                  const OutputFunctional& y,
                                                  const FieldState& state, const Grid& grid,
                                                  double eps, double d_eps = 0.0) {
  ExprPtr local = normalize(
      substitute(y.expr, {{Sym::indep(0), Expression::constant(y.location)}}));
  int node = static_cast<int>(
      std::lround((to_double(y.location) - grid.z_min) / grid.dz));
  node = std::min(std::max(node, 0), grid.n - 1);
  return detail::lie_check_impl(sys, v, local, state, grid, {node}, eps, d_eps);
}

/// Report of the end-to-end indistinguishability experiment: flow the
/// initial profile by epsilon, simulate both, compare output trajectories
/// under grid refinement.
struct ExperimentReport {
  double epsilon = 0.0;
  double t_end = 0.0;
  std::vector<int> grids;
  std::vector<double> d_init_per_grid;
  std::vector<double> d_out_per_grid;
  std::vector<double> convergence_ratios;  // d_out[g] / d_out[g+1]
  double d_init = 0.0;                     // finest grid
  double d_out = 0.0;                      // finest grid
  bool supports_nonobservability = false;
  std::vector<std::pair<double, double>> undefined_intervals;
};

/// Runs the experiment on each grid: d_init is the max-norm distance of the
/// two initial profiles, d_out the max over time of the output distance.
/// The verdict "supports non-observability" requires d_out to decrease
/// under refinement while d_init stays bounded away from zero.
inline ExperimentReport indistinguishability_experiment(
    const SystemDefinition& sys, const GeneralizedVectorField& v,
    const std::vector<ExprPtr>& profiles, double epsilon, double t_end,
    const std::vector<int>& grid_sizes, double dt = 0.0, double d_eps = 0.0) {
  if (sys.outputs.empty()) throw NumericError("experiment needs at least one output");
  ExperimentReport report;
  report.epsilon = epsilon;
  report.t_end = t_end;
  report.grids = grid_sizes;

  for (int n : grid_sizes) {
    Grid grid = Grid::uniform(n, sys.domain);
    FieldState base = make_initial_state(sys, profiles, grid);
    FieldState moved = flow(sys, v, base, grid, epsilon, d_eps).transformed;
    report.d_init_per_grid.push_back(max_abs_difference(base, moved));

    // One shared dt keeps the two trajectories aligned in time.
    detail::Discretization disc(sys, grid, detail::evolution_rhs(sys));
    double bound = kCflSafety * grid.dz /
                   std::max(std::max(disc.max_speed(base), disc.max_speed(moved)), 1e-12);
    double step = dt > 0 ? std::min(dt, bound) : bound;

    Trajectory a = simulate(sys, base, t_end, grid, step);
    Trajectory b = simulate(sys, moved, t_end, grid, step);

    double worst = 0.0;
    bool in_gap = false;
    double gap_start = 0.0;
    for (std::size_t k = 0; k < a.times.size(); ++k) {
      bool defined = true;
      double local = 0.0;
      for (std::size_t j = 0; j < a.outputs.size(); ++j) {
        double ya = a.outputs[j][k], yb = b.outputs[j][k];
        if (!std::isfinite(ya) || !std::isfinite(yb)) {
          defined = false;
          break;
        }
        local = std::max(local, std::abs(ya - yb));
      }
      if (defined) {
        worst = std::max(worst, local);
        if (in_gap) {
          report.undefined_intervals.emplace_back(gap_start, a.times[k]);
          in_gap = false;
        }
      } else if (!in_gap) {
        in_gap = true;
        gap_start = a.times[k];
      }
    }
    if (in_gap) report.undefined_intervals.emplace_back(gap_start, t_end);
    report.d_out_per_grid.push_back(worst);
  }

  for (std::size_t g = 0; g + 1 < report.d_out_per_grid.size(); ++g)
    report.convergence_ratios.push_back(report.d_out_per_grid[g] /
                                        std::max(report.d_out_per_grid[g + 1], 1e-300));

  report.d_init = report.d_init_per_grid.empty() ? 0.0 : report.d_init_per_grid.back();
  report.d_out = report.d_out_per_grid.empty() ? 0.0 : report.d_out_per_grid.back();

  // Supports non-observability when d_out decreases under refinement (values
  // under the floating-point floor count as converged) while d_init stays
  // bounded away from zero.
  bool decreasing = report.d_out_per_grid.size() > 1;
  for (std::size_t g = 0; g + 1 < report.d_out_per_grid.size(); ++g)
    decreasing = decreasing &&
                 report.d_out_per_grid[g + 1] <=
                     std::max(0.9 * report.d_out_per_grid[g], kConvergenceFloor);
  report.supports_nonobservability =
      decreasing && report.d_init >= 5 * std::max(report.d_out, kConvergenceFloor);
  return report;
}

}  // namespace jetsym
