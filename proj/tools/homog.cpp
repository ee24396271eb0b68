// homog: cell solves, fine-vs-homogenized comparisons, rate sweeps and the closed-form 1D example.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>

#include "homog/cli.hpp"

namespace {

using homog::cli::RunConfig;

void add_common(CLI::App& cmd, RunConfig& cfg, std::string& out_dir) {
  cmd.add_option("--field", cfg.field.name, "coefficient field")
      ->check(CLI::IsMember(homog::field_names()))
      ->capture_default_str();
  cmd.add_option("--dim", cfg.field.dim, "spatial dimension")->check(CLI::Range(1, 2))->capture_default_str();
  cmd.add_option("--value", cfg.field.value, "value of the constant field")->capture_default_str();
  cmd.add_option("--contrast", cfg.field.contrast, "checkerboard contrast")->capture_default_str();
  cmd.add_option("--shear", cfg.field.shear, "tilted laminate shear")->capture_default_str();
  cmd.add_option("--rel-tol", cfg.rel_tol, "CG relative residual tolerance")->capture_default_str();
  cmd.add_option("--max-iter", cfg.max_iter, "CG iteration cap (0: automatic)")->capture_default_str();
  cmd.add_option("--out", out_dir, "output directory")->capture_default_str();
}

void add_macro(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--source", cfg.source.name, "micro-structured source")
      ->check(CLI::IsMember(homog::source_names()))
      ->capture_default_str();
  cmd.add_option("--flux-shift-x", cfg.source.flux_shift[0], "constant added to F_1")->capture_default_str();
  cmd.add_option("--flux-shift-y", cfg.source.flux_shift[1], "constant added to F_2")->capture_default_str();
  cmd.add_option("--l", cfg.l, "micro period")->capture_default_str();
  cmd.add_option("--cells-per-period", cfg.cells_per_period, "macro grid cells per period")->capture_default_str();
  cmd.add_option("--cell-n", cfg.cell_n, "cell grid resolution (0: cells per period)")->capture_default_str();
}

void write_outputs(const homog::cli::CommandResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.json") << homog::dump_json(r.report);
  for (const auto& [name, contents] : r.files) std::ofstream(dir / name) << contents;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic homogenization: effective tensors, correctors and convergence checks"};
  app.set_config("--config", "", "INI file with one section per command");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  std::map<std::string, RunConfig> configs;
  std::map<std::string, std::string> out_dirs;
  for (const char* name : {"cell", "solve", "sweep", "example1d"}) {
    configs[name].command = name;
    out_dirs[name] = ".";
  }

  auto* cell = app.add_subcommand("cell", "effective tensor, mass balance and Voigt-Reuss bounds");
  add_common(*cell, configs["cell"], out_dirs["cell"]);
  cell->add_option("--n", configs["cell"].n, "cell nodes per axis")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "fine and homogenized solves with error metrics");
  add_common(*solve, configs["solve"], out_dirs["solve"]);
  add_macro(*solve, configs["solve"]);
  solve->add_option("--D", configs["solve"].D, "domain size (0: l * D-over-l)")->capture_default_str();
  solve->add_option("--D-over-l", configs["solve"].d_over_l, "periods per domain")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "rate sweep over D/l = 2^k");
  add_common(*sweep, configs["sweep"], out_dirs["sweep"]);
  add_macro(*sweep, configs["sweep"]);
  sweep->add_option("--k-min", configs["sweep"].k_min, "smallest exponent (0: default)")->capture_default_str();
  sweep->add_option("--k-max", configs["sweep"].k_max, "largest exponent (0: default)")->capture_default_str();
  sweep->add_option("--workers", configs["sweep"].workers, "worker threads")->capture_default_str();

  auto* ex = app.add_subcommand("example1d", "closed-form 1D example against the solver");
  auto& exc = configs["example1d"];
  ex->add_option("--l", exc.l, "micro period")->capture_default_str();
  ex->add_option("--D-over-l", exc.d_over_l, "periods per domain")->capture_default_str();
  ex->add_option("--cells-per-period", exc.cells_per_period, "macro grid cells per period")->capture_default_str();
  ex->add_option("--rel-tol", exc.rel_tol, "CG relative residual tolerance")->capture_default_str();
  ex->add_option("--out", out_dirs["example1d"], "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : homog::cli::kValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto result = homog::cli::run_command(configs[command]);
  if (result.report.contains("error")) std::cerr << "error: " << result.report["error"].get<std::string>() << '\n';
  std::cout << result.table;
  try {
    write_outputs(result, out_dirs[command]);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write outputs: " << e.what() << '\n';
    return homog::cli::kValidation;
  }
  return result.exit_code;
}
