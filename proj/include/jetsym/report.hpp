#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jetsym/analysis.hpp"
#include "jetsym/numeric.hpp"

namespace jetsym {

/// Deterministic JSON: members keep insertion order, floats are rendered
/// with 12 significant digits, so identical reports are byte-identical.
class Json {
 public:
  static Json object() {
    Json j;
    j.value_ = Members{};
    return j;
  }
  static Json array() {
    Json j;
    j.value_ = Items{};
    return j;
  }
  static Json string(std::string s) {
    Json j;
    j.value_ = std::move(s);
    return j;
  }
  static Json number(double v) {
    Json j;
    j.value_ = v;
    return j;
  }
  static Json number(int v) {
    Json j;
    j.value_ = static_cast<long long>(v);
    return j;
  }
  static Json boolean(bool v) {
    Json j;
    j.value_ = v;
    return j;
  }
  static Json null() { return Json{}; }

  Json& set(const std::string& key, Json v) {
    std::get<Members>(value_).emplace_back(key, std::move(v));
    return *this;
  }

  Json& push(Json v) {
    std::get<Items>(value_).push_back(std::move(v));
    return *this;
  }

  std::string dump(int indent = 0) const {
    std::string out;
    write(out, indent, 0);
    out += '\n';
    return out;
  }

  static std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
  }

 private:
  struct Null {};
  using Members = std::vector<std::pair<std::string, Json>>;
  using Items = std::vector<Json>;
  std::variant<Null, bool, long long, double, std::string, Items, Members> value_;

  static void escape(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
          } else {
            out += c;
          }
      }
    }
    out += '"';
  }

  void write(std::string& out, int indent, int depth) const {
    std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    std::string pad1(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    if (std::holds_alternative<Null>(value_)) {
      out += "null";
    } else if (auto* b = std::get_if<bool>(&value_)) {
      out += *b ? "true" : "false";
    } else if (auto* i = std::get_if<long long>(&value_)) {
      out += std::to_string(*i);
    } else if (auto* d = std::get_if<double>(&value_)) {
      out += format_double(*d);
    } else if (auto* s = std::get_if<std::string>(&value_)) {
      escape(*s, out);
    } else if (auto* items = std::get_if<Items>(&value_)) {
      if (items->empty()) {
        out += "[]";
        return;
      }
      out += '[';
      out += nl;
      for (std::size_t k = 0; k < items->size(); ++k) {
        out += pad1;
        (*items)[k].write(out, indent, depth + 1);
        if (k + 1 < items->size()) out += ',';
        out += nl;
      }
      out += pad;
      out += ']';
    } else if (auto* members = std::get_if<Members>(&value_)) {
      if (members->empty()) {
        out += "{}";
        return;
      }
      out += '{';
      out += nl;
      for (std::size_t k = 0; k < members->size(); ++k) {
        out += pad1;
        escape((*members)[k].first, out);
        out += indent > 0 ? ": " : ":";
        (*members)[k].second.write(out, indent, depth + 1);
        if (k + 1 < members->size()) out += ',';
        out += nl;
      }
      out += pad;
      out += '}';
    }
  }
};

inline Json to_json(const CheckResult& c, const BundleSpec& bundle) {
  Json j = Json::object();
  j.set("verdict", Json::string(to_string(c.verdict)));
  Json items = Json::array();
  for (std::size_t i = 0; i < c.residuals.size(); ++i) {
    Json item = Json::object();
    item.set("label", Json::string(c.labels[i]));
    item.set("residual", Json::string(to_string(c.residuals[i], bundle)));
    item.set("verdict",
             Json::string(is_identically_zero(c.residuals[i]) ? "pass" : "fail"));
    items.push(std::move(item));
  }
  j.set("residuals", std::move(items));
  if (c.generic_point) j.set("generic_point", Json::boolean(true));
  return j;
}

inline Json to_json(const CertificateReport& r, const BundleSpec& bundle) {
  Json j = Json::object();
  j.set("pde_check", to_json(r.pde_check, bundle));
  Json bcs = Json::array();
  for (std::size_t i = 0; i < r.bc_check.residuals.size(); ++i) {
    Json item = Json::object();
    item.set("label", Json::string(r.bc_check.labels[i]));
    item.set("residual", Json::string(to_string(r.bc_check.residuals[i], bundle)));
    item.set("verdict",
             Json::string(is_identically_zero(r.bc_check.residuals[i]) ? "pass" : "fail"));
    bcs.push(std::move(item));
  }
  j.set("bc_checks", std::move(bcs));
  Json outs = Json::array();
  for (std::size_t i = 0; i < r.output_check.residuals.size(); ++i) {
    Json item = Json::object();
    item.set("label", Json::string(r.output_check.labels[i]));
    item.set("residual", Json::string(to_string(r.output_check.residuals[i], bundle)));
    item.set("verdict", Json::string(
                            is_identically_zero(r.output_check.residuals[i]) ? "pass" : "fail"));
    if (r.output_check.generic_point) item.set("generic_point", Json::boolean(true));
    outs.push(std::move(item));
  }
  j.set("output_checks", std::move(outs));
  j.set("overall", Json::string(to_string(r.overall)));
  j.set("caveat", Json::string(r.caveat));
  if (!r.fail_reason.empty()) j.set("reason", Json::string(r.fail_reason));
  Json residuals = Json::object();
  auto dump_check = [&](const CheckResult& c) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < c.residuals.size(); ++i)
      arr.push(Json::string(c.labels[i] + ": " + to_string(c.residuals[i], bundle)));
    return arr;
  };
  residuals.set("pde", dump_check(r.pde_check));
  residuals.set("bc", dump_check(r.bc_check));
  residuals.set("output", dump_check(r.output_check));
  j.set("residuals", std::move(residuals));
  Json rules = Json::array();
  for (const auto& s : r.bc_check.boundary_rules) rules.push(Json::string(s));
  for (const auto& s : r.output_check.boundary_rules) rules.push(Json::string(s));
  j.set("boundary_consequences", std::move(rules));
  return j;
}

inline Json to_json(const ExperimentReport& r) {
  Json j = Json::object();
  j.set("epsilon", Json::number(r.epsilon));
  j.set("t_end", Json::number(r.t_end));
  Json grids = Json::array();
  for (int n : r.grids) grids.push(Json::number(n));
  j.set("grids", std::move(grids));
  j.set("d_init", Json::number(r.d_init));
  Json d_init_pg = Json::array();
  for (double v : r.d_init_per_grid) d_init_pg.push(Json::number(v));
  j.set("d_init_per_grid", std::move(d_init_pg));
  Json d_out = Json::array();
  for (double v : r.d_out_per_grid) d_out.push(Json::number(v));
  j.set("d_out_per_grid", std::move(d_out));
  Json ratios = Json::array();
  for (double v : r.convergence_ratios) ratios.push(Json::number(v));
  j.set("convergence_ratios", std::move(ratios));
  j.set("verdict", Json::string(r.supports_nonobservability ? "supports non-observability"
                                                            : "inconclusive"));
  if (!r.undefined_intervals.empty()) {
    Json gaps = Json::array();
    for (const auto& [a, b] : r.undefined_intervals) {
      Json gap = Json::array();
      gap.push(Json::number(a));
      gap.push(Json::number(b));
      gaps.push(std::move(gap));
    }
    j.set("undefined_output_intervals", std::move(gaps));
  }
  return j;
}

inline Json to_json(const LieCheckReport& r) {
  Json j = Json::object();
  j.set("eps", Json::number(r.eps));
  j.set("dz", Json::number(r.dz));
  j.set("max_abs_error", Json::number(r.max_abs_error));
  j.set("max_rel_error", Json::number(r.max_rel_error));
  j.set("max_abs_estimate", Json::number(r.max_abs_estimate));
  j.set("observed_coefficient", Json::number(r.observed_coefficient));
  j.set("probes", Json::number(static_cast<int>(r.probe_nodes.size())));
  return j;
}

/// Trajectory CSV: a t column followed by one column per output when
/// outputs exist, otherwise one column per grid node.
inline std::string trajectory_csv(const Trajectory& traj, const Grid& grid) {
  std::string out;
  if (!traj.outputs.empty()) {
    out += "t";
    for (const auto& name : traj.output_names) out += "," + name;
    out += "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      out += Json::format_double(traj.times[k]) == "null"
                 ? "nan"
                 : Json::format_double(traj.times[k]);
      for (const auto& ys : traj.outputs) {
        double v = ys[k];
        out += ",";
        out += std::isfinite(v) ? Json::format_double(v) : "nan";
      }
      out += "\n";
    }
    return out;
  }
  out += "t";
  for (int i = 0; i < grid.n; ++i) out += ",z" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += Json::format_double(traj.times[k]);
    for (int i = 0; i < grid.n; ++i)
      out += "," + Json::format_double(traj.states[k].values[0][i]);
    out += "\n";
  }
  return out;
}

/// Flow CSV: node coordinates with the original and transformed values.
inline std::string flow_csv(const FieldState& before, const FieldState& after,
                            const Grid& grid, const BundleSpec& bundle) {
  std::string out = "z";
  for (int a = 0; a < before.dependent_count(); ++a) {
    out += "," + bundle.dependent_name(a);
    out += "," + bundle.dependent_name(a) + "_eps";
  }
  out += "\n";
  for (int i = 0; i < grid.n; ++i) {
    out += Json::format_double(grid.z(i));
    for (int a = 0; a < before.dependent_count(); ++a) {
      out += "," + Json::format_double(before.values[a][i]);
      out += "," + Json::format_double(after.values[a][i]);
    }
    out += "\n";
  }
  return out;
}

/// Experiment CSV: one row per grid.
inline std::string experiment_csv(const ExperimentReport& r) {
  std::string out = "grid,d_init,d_out\n";
  for (std::size_t g = 0; g < r.grids.size(); ++g) {
    out += std::to_string(r.grids[g]);
    out += "," + Json::format_double(r.d_init_per_grid[g]);
    out += "," + Json::format_double(r.d_out_per_grid[g]);
    out += "\n";
  }
  return out;
}

}  // namespace jetsym
