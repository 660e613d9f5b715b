// jetsym command-line front end: load a system-definition file, run the
// symbolic certificate checks or the numeric cross-validation, and emit
// human-readable text plus optional JSON/CSV reports.
//
// Exit codes: 0 pass/success, 1 fail verdict, 2 usage or input error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "jetsym/report.hpp"
#include "jetsym/system_file.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw jetsym::Error("cannot write '" + path + "'");
  out << content;
}

const jetsym::GeneralizedVectorField& need_field(const jetsym::SystemFile& sf,
                                                 const std::string& name) {
  const auto* f = sf.field(name);
  if (!f) throw jetsym::Error("no field named '" + name + "' in the system file");
  return *f;
}

const std::vector<jetsym::ExprPtr>& need_profile(const jetsym::SystemFile& sf,
                                                 const std::string& name) {
  const auto* p = sf.profile(name);
  if (!p) throw jetsym::Error("no profile named '" + name + "' in the system file");
  return *p;
}

int run_check(const std::string& file, const std::string& field_name,
              const std::string& json_path) {
  jetsym::SystemFile sf = jetsym::load_system_file(file);
  const auto& v = need_field(sf, field_name);
  jetsym::CertificateReport report = jetsym::certify_nonobservability(sf.system, v);
  const auto& bundle = sf.system.bundle;

  auto show = [&](const char* title, const jetsym::CheckResult& c) {
    std::cout << title << ": " << jetsym::to_string(c.verdict) << "\n";
    for (std::size_t i = 0; i < c.residuals.size(); ++i)
      std::cout << "  " << c.labels[i] << ": residual "
                << jetsym::to_string(c.residuals[i], bundle) << "\n";
  };
  show("pde symmetry", report.pde_check);
  show("boundary conditions", report.bc_check);
  show("output invariance", report.output_check);
  for (const auto& rule : report.bc_check.boundary_rules)
    std::cout << "  using boundary consequence " << rule << "\n";
  for (const auto& rule : report.output_check.boundary_rules)
    std::cout << "  using boundary consequence " << rule << "\n";
  if (report.output_check.generic_point)
    std::cout << "note: output has a nonconstant denominator; verdict holds at "
                 "generic points\n";
  std::cout << "overall: " << jetsym::to_string(report.overall) << "\n";
  if (report.passed())
    std::cout << "caveat: " << report.caveat << "\n";
  else if (!report.fail_reason.empty())
    std::cout << "reason: " << report.fail_reason << "\n";

  if (!json_path.empty()) write_file(json_path, jetsym::to_json(report, bundle).dump(2));
  return report.passed() ? kExitPass : kExitFail;
}

int run_simulate(const std::string& file, const std::string& profile_name, double t_end,
                 const std::vector<int>& grids, double dt, const std::string& csv_path,
                 const std::string& json_path) {
  jetsym::SystemFile sf = jetsym::load_system_file(file);
  const auto& profile = need_profile(sf, profile_name);
  int n = grids.empty() ? 101 : grids.front();
  jetsym::Grid grid = jetsym::Grid::uniform(n, sf.system.domain);
  jetsym::FieldState initial = jetsym::make_initial_state(sf.system, profile, grid);
  jetsym::Trajectory traj = jetsym::simulate(sf.system, initial, t_end, grid, dt);

  std::cout << "simulated " << traj.times.size() - 1 << " steps on " << n << " nodes to t = "
            << jetsym::Json::format_double(traj.times.back()) << "\n";
  for (std::size_t k = 0; k < traj.output_names.size(); ++k) {
    double v = traj.outputs[k].back();
    std::cout << "  " << traj.output_names[k] << "(t_end) = "
              << (std::isfinite(v) ? jetsym::Json::format_double(v) : "undefined") << "\n";
  }

  if (!csv_path.empty()) write_file(csv_path, jetsym::trajectory_csv(traj, grid));
  if (!json_path.empty()) {
    jetsym::Json j = jetsym::Json::object();
    j.set("grid", jetsym::Json::number(n));
    j.set("t_end", jetsym::Json::number(traj.times.back()));
    j.set("steps", jetsym::Json::number(static_cast<int>(traj.times.size()) - 1));
    jetsym::Json outs = jetsym::Json::object();
    for (std::size_t k = 0; k < traj.output_names.size(); ++k)
      outs.set(traj.output_names[k], jetsym::Json::number(traj.outputs[k].back()));
    j.set("outputs_at_t_end", std::move(outs));
    write_file(json_path, j.dump(2));
  }
  return kExitPass;
}

int run_flow(const std::string& file, const std::string& field_name,
             const std::string& profile_name, double eps, double d_eps,
             const std::vector<int>& grids, const std::string& csv_path,
             const std::string& json_path) {
  jetsym::SystemFile sf = jetsym::load_system_file(file);
  const auto& v = need_field(sf, field_name);
  const auto& profile = need_profile(sf, profile_name);
  int n = grids.empty() ? 101 : grids.front();
  jetsym::Grid grid = jetsym::Grid::uniform(n, sf.system.domain);
  jetsym::FieldState before = jetsym::make_initial_state(sf.system, profile, grid);
  jetsym::FlowResult result = jetsym::flow(sf.system, v, before, grid, eps, d_eps);

  double moved = jetsym::max_abs_difference(before, result.transformed);
  std::cout << "flow to eps = " << jetsym::Json::format_double(eps)
            << ": max profile change = " << jetsym::Json::format_double(moved) << "\n";

  if (!csv_path.empty())
    write_file(csv_path,
               jetsym::flow_csv(before, result.transformed, grid, sf.system.bundle));
  if (!json_path.empty()) {
    jetsym::Json j = jetsym::Json::object();
    j.set("epsilon", jetsym::Json::number(eps));
    j.set("grid", jetsym::Json::number(n));
    j.set("max_profile_change", jetsym::Json::number(moved));
    write_file(json_path, j.dump(2));
  }
  return kExitPass;
}

int run_experiment(const std::string& file, const std::string& field_name,
                   const std::string& profile_name, double eps, double t_end,
                   const std::vector<int>& grids, double dt, double d_eps,
                   const std::string& csv_path, const std::string& json_path) {
  jetsym::SystemFile sf = jetsym::load_system_file(file);
  const auto& v = need_field(sf, field_name);
  const auto& profile = need_profile(sf, profile_name);

  jetsym::CertificateReport cert = jetsym::certify_nonobservability(sf.system, v);
  if (!cert.passed())
    std::cout << "warning: the field is not a certified symmetry (" << cert.fail_reason
              << "); running the experiment anyway\n";

  std::vector<int> ns = grids.empty() ? std::vector<int>{101, 201, 401} : grids;
  jetsym::ExperimentReport report = jetsym::indistinguishability_experiment(
      sf.system, v, profile, eps, t_end, ns, dt, d_eps);

  std::cout << "d_init = " << jetsym::Json::format_double(report.d_init) << "\n";
  for (std::size_t g = 0; g < report.grids.size(); ++g)
    std::cout << "d_out[n=" << report.grids[g]
              << "] = " << jetsym::Json::format_double(report.d_out_per_grid[g]) << "\n";
  for (std::size_t g = 0; g < report.convergence_ratios.size(); ++g)
    std::cout << "ratio " << report.grids[g] << "->" << report.grids[g + 1] << " = "
              << jetsym::Json::format_double(report.convergence_ratios[g]) << "\n";
  std::cout << "verdict: "
            << (report.supports_nonobservability ? "supports non-observability"
                                                 : "inconclusive")
            << "\n";

  if (!csv_path.empty()) write_file(csv_path, jetsym::experiment_csv(report));
  if (!json_path.empty()) write_file(json_path, jetsym::to_json(report).dump(2));
  return report.supports_nonobservability ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetry certificates and numeric cross-validation for 1+1D PDE systems"};
  app.require_subcommand(1);

  std::string file, field_name, profile_name, json_path, csv_path;
  double eps = 0.1, t_end = 0.5, dt = 0.0, d_eps = 0.0;
  std::vector<int> grids;

  CLI::App* check = app.add_subcommand("check", "verify the infinitesimal symmetry conditions");
  check->add_option("file", file, "system-definition file")->required();
  check->add_option("--field", field_name, "vector field name")->required();
  check->add_option("--json", json_path, "write a JSON report");

  CLI::App* simulate = app.add_subcommand("simulate", "method-of-lines simulation");
  simulate->add_option("file", file)->required();
  simulate->add_option("--profile", profile_name, "initial profile name")->required();
  simulate->add_option("--t-end", t_end, "final time");
  simulate->add_option("--grids", grids, "grid sizes; simulate uses the first")->delimiter(',');
  simulate->add_option("--dt", dt, "time step (default: stability bound)");
  simulate->add_option("--csv", csv_path, "write the trajectory as CSV");
  simulate->add_option("--json", json_path, "write a JSON summary");

  CLI::App* flow = app.add_subcommand("flow", "integrate the symmetry group flow");
  flow->add_option("file", file)->required();
  flow->add_option("--field", field_name)->required();
  flow->add_option("--profile", profile_name)->required();
  flow->add_option("--eps", eps, "group parameter")->required();
  flow->add_option("--d-eps", d_eps, "flow step (default: stability bound)");
  flow->add_option("--grids", grids, "grid sizes; flow uses the first")->delimiter(',');
  flow->add_option("--csv", csv_path, "write before/after profiles as CSV");
  flow->add_option("--json", json_path, "write a JSON summary");

  CLI::App* experiment =
      app.add_subcommand("experiment", "end-to-end indistinguishability experiment");
  experiment->add_option("file", file)->required();
  experiment->add_option("--field", field_name)->required();
  experiment->add_option("--profile", profile_name)->required();
  experiment->add_option("--eps", eps, "group parameter");
  experiment->add_option("--t-end", t_end, "final time");
  experiment->add_option("--grids", grids, "comma-separated grid sizes")->delimiter(',');
  experiment->add_option("--dt", dt, "time step (default: stability bound)");
  experiment->add_option("--d-eps", d_eps, "flow step (default: stability bound)");
  experiment->add_option("--csv", csv_path, "write per-grid distances as CSV");
  experiment->add_option("--json", json_path, "write the experiment report as JSON");

  CLI::App* print = app.add_subcommand("print", "re-emit the system file canonically");
  print->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (check->parsed()) return run_check(file, field_name, json_path);
    if (simulate->parsed())
      return run_simulate(file, profile_name, t_end, grids, dt, csv_path, json_path);
    if (flow->parsed())
      return run_flow(file, field_name, profile_name, eps, d_eps, grids, csv_path, json_path);
    if (experiment->parsed())
      return run_experiment(file, field_name, profile_name, eps, t_end, grids, dt, d_eps,
                            csv_path, json_path);
    if (print->parsed()) {
      std::cout << jetsym::print_system_file(jetsym::load_system_file(file));
      return kExitPass;
    }
  } catch (const jetsym::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
