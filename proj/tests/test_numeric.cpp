#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jetsym/numeric.hpp"
#include "jetsym/parser.hpp"
#include "support/test_helpers.hpp"

using namespace jetsym;
using namespace jetsym::testing;

namespace {

FieldState initial_state(const SystemDefinition& sys, const Grid& grid) {
  return make_initial_state(sys, {example_profile()}, grid);
}

}  // namespace

TEST_CASE("characteristics oracle sanity") {
  REQUIRE(oracle_x(0.0, 0.0) == Catch::Approx(0.5));
  REQUIRE(oracle_x(1.0, 0.0) == Catch::Approx(0.0));
  REQUIRE(oracle_x(0.0, 0.5) == Catch::Approx(0.2));
  REQUIRE(oracle_y(0.5) == Catch::Approx(-2.0));
  // The smooth branch satisfies the pde: x_t - (x+1) x_z = 0.
  for (double z : {0.1, 0.3, 0.4}) {
    for (double t : {0.1, 0.2, 0.4}) {
      const double h = 1e-6;
      double xt = (oracle_x(z, t + h) - oracle_x(z, t - h)) / (2 * h);
      double xz = (oracle_x(z + h, t) - oracle_x(z - h, t)) / (2 * h);
      double x = oracle_x(z, t);
      REQUIRE(std::abs(xt - (x + 1) * xz) < 1e-8);
    }
  }
}

TEST_CASE("simulation converges to the characteristics oracle") {
  SystemDefinition sys = example_system();
  std::vector<double> l1_errors;
  for (int n : {51, 101, 201}) {
    Grid grid = Grid::uniform(n, sys.domain);
    Trajectory traj = simulate(sys, initial_state(sys, grid), 0.5, grid);
    const FieldState& last = traj.states.back();
    double l1 = 0;
    for (int i = 0; i < grid.n; ++i)
      l1 += std::abs(last.values[0][i] - oracle_x(grid.z(i), 0.5));
    l1_errors.push_back(l1 / grid.n);
    REQUIRE(std::abs(last.values[0][0] - 0.2) < 0.01);
    REQUIRE(std::abs(traj.outputs[0].back() - (-2.0)) < 0.05);
  }
  // First order in dz.
  REQUIRE(l1_errors[0] / l1_errors[1] > 1.6);
  REQUIRE(l1_errors[1] / l1_errors[2] > 1.6);
}

TEST_CASE("the zero profile is a fixed point with undefined output") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(51, sys.domain);
  FieldState zero = make_initial_state(sys, {P("0")}, grid);
  Trajectory traj = simulate(sys, zero, 0.2, grid);
  REQUIRE(traj.states.back().max_norm() == 0.0);
  for (double y : traj.outputs[0]) REQUIRE(std::isnan(y));
}

TEST_CASE("dt above the stability bound is rejected") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(51, sys.domain);
  REQUIRE_THROWS_AS(simulate(sys, initial_state(sys, grid), 0.5, grid, 0.05),
                    NumericError);
}

TEST_CASE("simulation requires evolution form") {
  SystemDefinition sys = example_system();
  sys.pdes[0].principal = JetCoordinate{0, {2, 0}};  // x_zz principal
  Grid grid = Grid::uniform(51, sys.domain);
  FieldState s{{std::vector<double>(51, 0.0)}, 0.0};
  REQUIRE_THROWS_AS(simulate(sys, s, 0.1, grid), NumericError);
}

TEST_CASE("flow first-order response matches the hand value") {
  // At x = (1-z)/2 the characteristic is Q = 0.75 (1-z).
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(101, sys.domain);
  FieldState base = initial_state(sys, grid);
  FlowResult plus = flow(sys, example_field(), base, grid, 1e-4, 1e-5);
  FlowResult minus = flow(sys, example_field(), base, grid, -1e-4, 1e-5);
  for (int i = 0; i < grid.n; i += 10) {
    double response =
        (plus.transformed.values[0][i] - minus.transformed.values[0][i]) / 2e-4;
    REQUIRE(std::abs(response - 0.75 * (1 - grid.z(i))) < 1e-6);
  }
}

TEST_CASE("flow identity and zero field") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(101, sys.domain);
  FieldState base = initial_state(sys, grid);
  FlowResult id = flow(sys, example_field(), base, grid, 0.0);
  REQUIRE(max_abs_difference(base, id.transformed) == 0.0);
  FlowResult frozen = flow(sys, zero_field(1), base, grid, 0.3, 0.05);
  REQUIRE(max_abs_difference(base, frozen.transformed) < 1e-14);
}

TEST_CASE("flow preserves the boundary condition") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(101, sys.domain);
  FieldState base = initial_state(sys, grid);
  FlowResult moved = flow(sys, example_field(), base, grid, 0.1, 1e-3);
  REQUIRE(std::abs(moved.transformed.values[0][grid.n - 1]) < 1e-14);
}

TEST_CASE("flow composition approximates the group property") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(101, sys.domain);
  FieldState base = initial_state(sys, grid);
  FlowResult one = flow(sys, example_field(), base, grid, 1e-2, 1e-4);
  FlowResult first = flow(sys, example_field(), base, grid, 4e-3, 1e-4);
  FlowResult second = flow(sys, example_field(), first.transformed, grid, 6e-3, 1e-4);
  REQUIRE(max_abs_difference(one.transformed, second.transformed) <= 1e-6);
}

TEST_CASE("flow rejects characteristics beyond first z-order") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(51, sys.domain);
  FieldState base = initial_state(sys, grid);
  GeneralizedVectorField v{P("0"), P("0"), {P("x_zz")}};
  REQUIRE_THROWS_AS(flow(sys, v, base, grid, 0.1), NumericError);
}

TEST_CASE("flow handles temporal jets by reducing through the system") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(101, sys.domain);
  FieldState base = initial_state(sys, grid);
  // Q = -x_t reduces to -(x+1) x_z: the flow transports the profile the way
  // time translation does, backwards. Away from the clamped right boundary
  // the flowed state must match the characteristics oracle at t = -eps.
  FlowResult moved = flow(sys, time_translation(), base, grid, 0.05, 1e-3);
  for (int i = 0; i < grid.n; ++i) {
    double z = grid.z(i);
    if (z > 0.8) continue;
    REQUIRE(std::abs(moved.transformed.values[0][i] - oracle_x(z, -0.05)) < 1e-6);
  }
}

TEST_CASE("finite-difference lie check: interior expression") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(101, sys.domain);
  FieldState base = initial_state(sys, grid);
  LieCheckReport rep =
      finite_difference_lie_check(sys, example_field(), P("x"), base, grid, 1e-2, 1e-4);
  // Analytic value at z = 0.5 is Q(0.5) = 0.375.
  bool saw_midpoint = false;
  for (std::size_t k = 0; k < rep.probe_nodes.size(); ++k) {
    if (grid.z(rep.probe_nodes[k]) == Catch::Approx(0.5)) {
      REQUIRE(rep.analytic[k] == Catch::Approx(0.375).margin(1e-9));
      REQUIRE(rep.estimate[k] == Catch::Approx(0.375).margin(1e-4));
      saw_midpoint = true;
    }
  }
  REQUIRE(saw_midpoint);
  REQUIRE(rep.max_abs_error < 1e-3);
}

TEST_CASE("finite-difference lie check: output at its location") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(101, sys.domain);
  FieldState base = initial_state(sys, grid);
  LieCheckReport rep = finite_difference_lie_check(sys, example_field(), sys.outputs[0],
                                                   base, grid, 1e-2, 1e-4);
  REQUIRE(rep.probe_nodes.size() == 1);
  REQUIRE(std::abs(rep.analytic[0]) < 1e-12);  // -z x_zz at z = 0
  REQUIRE(rep.max_abs_estimate < 1e-3);
}

TEST_CASE("finite-difference lie check: zero field") {
  SystemDefinition sys = example_system();
  Grid grid = Grid::uniform(51, sys.domain);
  FieldState base = initial_state(sys, grid);
  LieCheckReport rep =
      finite_difference_lie_check(sys, zero_field(1), P("x"), base, grid, 1e-3, 1e-4);
  REQUIRE(rep.max_abs_error < 1e-14);
}

TEST_CASE("neumann-style boundary data is rejected by the solver") {
  SystemDefinition sys = example_system();
  sys.bcs = {BoundaryCondition{Rational(1), P("x_z")}};
  Grid grid = Grid::uniform(51, sys.domain);
  REQUIRE_THROWS_AS(make_initial_state(sys, {example_profile()}, grid), NumericError);
}

TEST_CASE("cross-coupled system simulates stably") {
  // First-order wave system: x_t = u_z, u_t = x_z with a bump initially at
  // rest. Short horizon, so only interior dynamics matter.
  BundleSpec b2({"z", "t"}, {"x", "u"});
  SystemDefinition sys{b2,
                       DomainSpec(Rational(0), Rational(1)),
                       {SolvedPde{JetCoordinate{0, {0, 1}}, parse("u_z", b2)},
                        SolvedPde{JetCoordinate{1, {0, 1}}, parse("x_z", b2)}},
                       {},
                       {}};
  Grid grid = Grid::uniform(101, sys.domain);
  FieldState s0 = make_initial_state(
      sys, {parse("16*z^2*(1-z)^2", b2), parse("0", b2)}, grid);
  Trajectory traj = simulate(sys, s0, 0.1, grid);
  REQUIRE(traj.states.back().max_norm() < 2.0);
  REQUIRE(traj.states.back().max_norm() > 0.1);
  // Energy-like sanity: the peak does not grow.
  REQUIRE(traj.states.back().max_norm() <= s0.max_norm() * 1.05);
}

TEST_CASE("indistinguishability experiment on the example") {
  SystemDefinition sys = example_system();
  ExperimentReport rep = indistinguishability_experiment(
      sys, example_field(), {example_profile()}, 0.1, 0.5, {51, 101, 201});
  REQUIRE(rep.d_init > 0.05);
  REQUIRE(rep.d_out_per_grid.back() < 2e-2);
  REQUIRE(rep.supports_nonobservability);
  REQUIRE(rep.undefined_intervals.empty());
}

TEST_CASE("experiment with eps = 0 gives exactly zero distances") {
  SystemDefinition sys = example_system();
  ExperimentReport rep = indistinguishability_experiment(
      sys, example_field(), {example_profile()}, 0.0, 0.3, {51, 101});
  REQUIRE(rep.d_init == 0.0);
  for (double d : rep.d_out_per_grid) REQUIRE(d == 0.0);
  REQUIRE_FALSE(rep.supports_nonobservability);
}

TEST_CASE("experiment negative control: the constant shift is detectable") {
  SystemDefinition sys = example_system();
  ExperimentReport rep = indistinguishability_experiment(
      sys, shift_field(), {example_profile()}, 0.1, 0.5, {51, 101, 201});
  for (double d : rep.d_out_per_grid) REQUIRE(d > 0.1);
  REQUIRE_FALSE(rep.supports_nonobservability);
}
