#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "homog/bench.hpp"
#include "homog/report.hpp"

namespace homog::cli {

/// Fully resolved settings of one command; every report embeds it.
struct RunConfig {
  std::string command = "cell";
  FieldSpec field{};
  SourceSpec source{};
  double l = 1.0;
  double D = 0.0;         // 0: l * d_over_l
  double d_over_l = 64.0;
  int n = 128;            // cell resolution for `cell`
  int cells_per_period = 16;
  int cell_n = 0;         // 0: cells_per_period
  int k_min = 0;          // sweep D/l = 2^k; 0: default for the dimension
  int k_max = 0;
  double rel_tol = 1e-10;
  int max_iter = 0;
  unsigned workers = default_workers();

  double domain() const { return D > 0.0 ? D : l * d_over_l; }

  SolveOptions solver() const {
    SolveOptions s;
    s.rel_tol = rel_tol;
    s.max_iter = max_iter;
    return s;
  }

  std::pair<int, int> sweep_range() const {
    const int lo = k_min > 0 ? k_min : 3;
    const int hi = k_max > 0 ? k_max : (field.dim == 1 ? 7 : 5);
    return {lo, hi};
  }

  void validate() const {
    static const std::vector<std::string> commands{"cell", "solve", "sweep", "example1d"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
      throw ValidationError("unknown command '" + command + "'");
    const auto& fn = field_names();
    if (std::find(fn.begin(), fn.end(), field.name) == fn.end())
      throw ValidationError("unknown field '" + field.name + "'");
    const auto& sn = source_names();
    if (std::find(sn.begin(), sn.end(), source.name) == sn.end())
      throw ValidationError("unknown source '" + source.name + "'");
    check_dim(field.dim);
    if (!(l > 0.0)) throw ValidationError("l must be positive");
    if (D < 0.0 || !(d_over_l > 0.0)) throw ValidationError("D and D/l must be positive");
    if (n < 8) throw ValidationError("cell resolution n must be at least 8");
    if (cells_per_period < 1 || cell_n < 0) throw ValidationError("resolutions must be positive");
    if (!(rel_tol > 0.0) || max_iter < 0) throw ValidationError("invalid solver tolerance");
    if (workers < 1) throw ValidationError("workers must be at least 1");
    const auto [lo, hi] = sweep_range();
    if (command == "sweep" && (lo < 2 || hi - lo < 2))
      throw ValidationError("a sweep needs at least 3 points with D/l >= 4 (k_max - k_min >= 2, k_min >= 2)");
  }

  json to_json() const {
    json j{{"command", command},
           {"field", {{"name", field.name}, {"dim", field.dim}, {"value", field.value}, {"contrast", field.contrast},
                      {"shear", field.shear}}},
           {"source", {{"name", source.name}, {"flux_shift", homog::to_json(source.flux_shift, field.dim)}}},
           {"l", l},
           {"D", domain()},
           {"n", n},
           {"cells_per_period", cells_per_period},
           {"cell_n", cell_n > 0 ? cell_n : cells_per_period},
           {"rel_tol", rel_tol},
           {"max_iter", max_iter},
           {"workers", workers}};
    if (command == "sweep") {
      const auto [lo, hi] = sweep_range();
      j["k_min"] = lo;
      j["k_max"] = hi;
    }
    return j;
  }
};

enum ExitCode : int { kPass = 0, kValidation = 1, kConvergence = 2, kAcceptance = 3 };

struct CommandResult {
  json report;
  int exit_code = kPass;
  std::string table;  // human-readable summary for standard output
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

namespace detail {

inline std::string row(const std::string& name, double value, const std::string& reference, bool pass) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-34s %14.6e  %-28s %s\n", name.c_str(), value, reference.c_str(),
                pass ? "PASS" : "FAIL");
  return buf;
}

inline std::string range(double lo, double hi) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%.4g, %.4g]", lo, hi);
  return buf;
}

}  // namespace detail

/// Effective tensor with residuals, mass-balance defects for each unit direction, and the
/// Voigt-Reuss bracket.
inline CommandResult cmd_cell(const RunConfig& cfg) {
  cfg.validate();
  const auto field = make_coefficient(cfg.field);
  validate(field, std::min(cfg.n, 256));
  const auto cell = solve_cell(field, cfg.n, cfg.solver());
  const auto model = make_effective_model(cell);
  const Bounds bounds = voigt_reuss(*cell.problem);

  CommandResult out;
  bool pass = true;
  json mb = json::array();
  for (int a = 0; a < field.dim(); ++a) {
    Vec eta{0.0, 0.0};
    eta[a] = 1.0;
    const auto m = mass_balance_check(field, cfg.n, eta, cfg.solver());
    const bool ok = m.defect < 1e-8;
    pass = pass && ok;
    mb.push_back({{"eta", homog::to_json(eta, field.dim())}, {"defect", m.defect}, {"pass", ok}});
    out.table += detail::row("mass balance e" + std::to_string(a + 1), m.defect, "< 1e-8", ok);
  }
  const double scale = model.K0.max_abs();
  const bool in_bounds = within_bounds(model.K0, bounds, 1e-10 * scale);
  const bool symmetric = model.K0.asymmetry() <= 1e-8 * scale;
  const bool spd = model.K0.eigenvalues().first > 0.0;
  pass = pass && in_bounds && symmetric && spd;
  out.table += detail::row("K0 asymmetry", model.K0.asymmetry(), "<= 1e-8 |K0|", symmetric);
  out.table += detail::row("K0 smallest eigenvalue", model.K0.eigenvalues().first, "> 0", spd);
  out.table += detail::row("Voigt-Reuss slack (lower)", (model.K0 - bounds.harmonic).eigenvalues().first, ">= 0",
                           in_bounds);

  out.report = {{"config", cfg.to_json()},
                {"model", to_json(model)},
                {"mass_balance", mb},
                {"voigt_reuss",
                 {{"arithmetic", to_json(bounds.arithmetic)}, {"harmonic", to_json(bounds.harmonic)}, {"pass", in_bounds}}},
                {"symmetric", symmetric},
                {"spd", spd},
                {"pass", pass}};
  out.exit_code = pass ? kPass : kAcceptance;
  return out;
}

inline RunSpec run_spec(const RunConfig& cfg) {
  return {cfg.field, cfg.source, cfg.l, cfg.domain(), cfg.cells_per_period, cfg.cell_n, cfg.solver()};
}

/// Fine solve, cell pipeline, homogenized solve and first-order approximation with the error report.
inline CommandResult cmd_solve(const RunConfig& cfg) {
  cfg.validate();
  const auto run = run_two_scale(run_spec(cfg));
  CommandResult out;
  out.report = {{"config", cfg.to_json()},
                {"K0", to_json(run.K0)},
                {"C", run.C},
                {"cell_aligned", run.cell_aligned},
                {"error_report", to_json(run.report)}};
  out.table += detail::row("e_L2", run.report.e_L2, "", true);
  out.table += detail::row("e_H1", run.report.e_H1, "", true);
  out.table += detail::row("e_energy", run.report.e_energy, "", true);
  out.files.emplace_back("fields.csv", fields_csv(run));
  out.files.emplace_back("errors.csv", std::string(error_report_header) + '\n' + csv_row(run.report) + '\n');
  return out;
}

inline SweepPlan sweep_plan(const RunConfig& cfg) {
  SweepPlan plan;
  plan.field = cfg.field;
  plan.source = cfg.source;
  plan.l = cfg.l;
  plan.cells_per_period = cfg.cells_per_period;
  plan.cell_n = cfg.cell_n;
  plan.solver = cfg.solver();
  plan.ratios.clear();
  const auto [lo, hi] = cfg.sweep_range();
  for (int k = lo; k <= hi; ++k) plan.ratios.push_back(std::ldexp(1.0, k));
  return plan;
}

/// Runs the sweep and judges fitted rates; failed points stay in the CSV, flagged.
inline CommandResult cmd_sweep(const RunConfig& cfg) {
  cfg.validate();
  const SweepPlan plan = sweep_plan(cfg);
  const auto result = run_sweep(plan, cfg.workers);
  CommandResult out;
  json points = json::array();
  for (const auto& pt : result.points) {
    json p{{"ok", pt.ok}};
    if (pt.ok)
      p["report"] = to_json(pt.report);
    else
      p["error"] = pt.error;
    points.push_back(std::move(p));
  }
  json verdicts = json::array();
  for (const auto& v : result.verdicts) {
    verdicts.push_back(to_json(v));
    const std::string ref = v.expected.mode == "equal"      ? detail::range(v.expected.rate - v.expected.tolerance,
                                                                            v.expected.rate + v.expected.tolerance)
                            : v.expected.mode == "at_least" ? ">= " + format_number(v.expected.rate)
                                                            : "informational";
    out.table += detail::row("rate " + v.expected.metric, v.fit ? v.fit->rate : NAN, ref, v.pass);
  }
  if (plan.field.dim == 2)
    out.table += detail::row("corrector improves e_H1", result.corrector_improves ? 1.0 : 0.0, "every point",
                             result.corrector_improves);
  out.report = {{"config", cfg.to_json()},
                {"points", points},
                {"verdicts", verdicts},
                {"corrector_improves", result.corrector_improves},
                {"pass", result.pass}};
  out.files.emplace_back("sweep.csv", sweep_csv(plan, result));
  out.exit_code = result.pass ? kPass : kAcceptance;
  return out;
}

/// Closed-form one-dimensional example against the solver, pointwise and in all three metrics.
inline CommandResult cmd_example1d(RunConfig cfg) {
  cfg.field = FieldSpec{"paper1d", 1};
  cfg.source = SourceSpec{"paper1d"};
  cfg.validate();
  const double D = cfg.domain();
  const auto run = run_two_scale(run_spec(cfg));
  const AnalyticOracle1D oracle(cfg.l, D);

  double err_p = 0.0, err_p0 = 0.0, err_p1 = 0.0;
  const auto& g = run.p.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto o = oracle.eval(g.coordinate(i)[0]);
    err_p = std::max(err_p, std::abs(run.p[i] - o.p));
    err_p0 = std::max(err_p0, std::abs(run.p0[i] - o.p0));
    err_p1 = std::max(err_p1, std::abs(run.p1[i] - o.p1));
  }
  const double c16 = cfg.cells_per_period / 16.0;
  const double tol = 5e-3 * D * D / (c16 * c16);

  CommandResult out;
  json checks = json::array();
  bool pass = true;
  auto check = [&](const std::string& name, double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    pass = pass && ok;
    checks.push_back({{"name", name}, {"value", value}, {"lower", lo}, {"upper", hi}, {"pass", ok}});
    out.table += detail::row(name, value, detail::range(lo, hi), ok);
  };
  check("max |p - p_oracle|", err_p, 0.0, tol);
  check("max |p0 - p0_oracle|", err_p0, 0.0, tol);
  check("max |p1 - p1_oracle|", err_p1, 0.0, tol);

  json predicted = nullptr;
  if (oracle.integer_ratio()) {
    const auto c = predicted_constants(cfg.l, D);
    const double D2 = D * D;
    check("e_L2 / (c_L2 / D^2)", run.report.e_L2 / (c.c_L2 / D2), 0.95, 1.05);
    check("e_H1 / (c_H1 / D^2)", run.report.e_H1 / (c.c_H1 / D2), 0.95, 1.05);
    check("|E - E0| / (c_E / D^2)", run.report.e_energy / (c.c_E / D2), 0.9, 1.1);
    predicted = {{"c_L2", c.c_L2}, {"c_H1", c.c_H1}, {"c_E", c.c_E}};
  } else {
    check("e_L2 / oracle", run.report.e_L2 / oracle.l2_metric(), 0.9, 1.1);
    check("e_H1 / oracle", run.report.e_H1 / oracle.h1_metric(), 0.9, 1.1);
    check("|E - E0| / oracle", run.report.e_energy / oracle.energy_gap(), 0.9, 1.1);
  }
  const auto readings = oracle.gap_offset_readings();
  out.report = {{"config", cfg.to_json()},
                {"C", oracle.C()},
                {"integer_ratio", oracle.integer_ratio()},
                {"error_report", to_json(run.report)},
                {"oracle",
                 {{"e_L2", oracle.l2_metric()},
                  {"e_H1", oracle.h1_metric()},
                  {"energy_gap", oracle.energy_gap()},
                  {"gap_offset_readings", {{"C/(2D)", readings[0]}, {"C/D^2", readings[1]}}}}},
                {"predicted_constants", predicted},
                {"checks", checks},
                {"pass", pass}};
  out.files.emplace_back("fields.csv", fields_csv(run));
  out.exit_code = pass ? kPass : kAcceptance;
  return out;
}

/// Dispatches on cfg.command and maps failures to exit codes.
inline CommandResult run_command(const RunConfig& cfg) {
  try {
    if (cfg.command == "cell") return cmd_cell(cfg);
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg);
    if (cfg.command == "example1d") return cmd_example1d(cfg);
    throw ValidationError("unknown command '" + cfg.command + "'");
  } catch (const ValidationError& e) {
    return {{{"config", cfg.to_json()}, {"error", e.what()}, {"kind", "validation"}}, kValidation, {}, {}};
  } catch (const Error& e) {
    return {{{"config", cfg.to_json()}, {"error", e.what()}, {"kind", "convergence"}}, kConvergence, {}, {}};
  }
}

}  // namespace homog::cli
