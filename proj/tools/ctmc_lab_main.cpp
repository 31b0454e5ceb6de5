// ctmc-lab: command-line front end for the sampling laboratory.
//
// Subcommands: run, sweep, validate, fit. Exit codes: 0 success, 2 invalid
// config/request, 3 runtime sampler failure. All records go to stdout (and
// optionally files); timing goes to stderr so records stay byte-stable.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctmc/errors.hpp"
#include "ctmc/harness.hpp"

namespace {

void report_wall(double seconds) {
  std::fprintf(stderr, "[wall] %.3f s\n", seconds);
}

int do_run(const std::string& config_path) {
  ctmc::ExperimentConfig config = ctmc::load_experiment_config(config_path);
  ctmc::RunReport report =
      ctmc::run_experiment(config, ctmc::thread_cap_from_env());
  std::string line = report.record.dump();
  std::cout << line << "\n";
  if (!config.output_jsonl.empty()) {
    std::ofstream out(config.output_jsonl, std::ios::app);
    ctmc::require(static_cast<bool>(out), ctmc::ErrorCode::invalid_input,
                  "cannot open jsonl path \"" + config.output_jsonl + "\"");
    out << line << "\n";
  }
  report_wall(report.wall_seconds);
  return 0;
}

int do_sweep(const std::string& spec_path) {
  ctmc::SweepSpec spec = ctmc::load_sweep_spec(spec_path);
  auto start = std::chrono::steady_clock::now();
  ctmc::SweepResult result =
      ctmc::run_sweep(spec, ctmc::thread_cap_from_env());
  ctmc::write_csv(result, std::cout);
  if (!spec.output_csv.empty()) {
    std::ofstream out(spec.output_csv);
    ctmc::require(static_cast<bool>(out), ctmc::ErrorCode::invalid_input,
                  "cannot open csv path \"" + spec.output_csv + "\"");
    ctmc::write_csv(result, out);
  }
  report_wall(std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count());
  return 0;
}

int do_validate(const std::string& config_path) {
  ctmc::ExperimentConfig config = ctmc::load_experiment_config(config_path);
  std::cout << "valid config_hash=" << ctmc::config_hash_hex(config.normalized)
            << "\n";
  return 0;
}

int do_fit(const std::string& csv_path, const std::string& x_col,
           const std::string& y_col) {
  std::ifstream in(csv_path);
  ctmc::require(static_cast<bool>(in), ctmc::ErrorCode::invalid_input,
                "cannot open \"" + csv_path + "\"");
  ctmc::CsvTable table = ctmc::read_csv(in);
  ctmc::FitReport report = ctmc::fit_csv(table, x_col, y_col);
  int dropped = report.parse_dropped + report.fit.dropped;
  if (dropped > 0)
    std::fprintf(stderr,
                 "warning: dropped %d row(s) with non-numeric or "
                 "non-positive values\n",
                 dropped);
  nlohmann::ordered_json out;
  out["slope"] = report.fit.slope;
  out["intercept"] = report.fit.intercept;
  out["r2"] = report.fit.r2;
  out["rows_used"] = report.fit.used;
  out["rows_dropped"] = dropped;
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ctmc-lab: discrete-diffusion reverse-sampling laboratory"};
  app.require_subcommand(1);

  std::string config_path, sweep_path, csv_path, x_col, y_col;

  CLI::App* run = app.add_subcommand("run", "Execute one experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();

  CLI::App* sweep =
      app.add_subcommand("sweep", "Execute a sweep spec (CSV to stdout)");
  sweep->add_option("spec", sweep_path, "JSON sweep spec")->required();

  CLI::App* validate =
      app.add_subcommand("validate", "Schema-check a config and print its hash");
  validate->add_option("config", config_path, "JSON experiment config")
      ->required();

  CLI::App* fit =
      app.add_subcommand("fit", "Least-squares slope of log(y) on log(x)");
  fit->add_option("csv", csv_path, "CSV table")->required();
  fit->add_option("--x", x_col, "x column name")->required();
  fit->add_option("--y", y_col, "y column name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are config-class errors
  }

  try {
    if (run->parsed()) return do_run(config_path);
    if (sweep->parsed()) return do_sweep(sweep_path);
    if (validate->parsed()) return do_validate(config_path);
    if (fit->parsed()) return do_fit(csv_path, x_col, y_col);
  } catch (const ctmc::Error& e) {
    std::cerr << e.what() << "\n";
    return ctmc::is_config_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
