// Experiment runner: JSON experiment configs, single runs, axis sweeps with
// a worker pool, CSV/JSONL emission, and the log-log slope fit.
//
// Determinism contract: every byte of the JSONL record and the sweep CSV is
// a pure function of (config file, master seed). Wall-clock timing is
// reported separately (stderr) and never enters the records. Monte-Carlo
// runs derive one RNG stream per trajectory, so results are independent of
// the worker-thread count.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctmc/linalg.hpp"
#include "ctmc/metrics.hpp"
#include "ctmc/samplers.hpp"
#include "ctmc/schedule.hpp"
#include "ctmc/score.hpp"
#include "ctmc/state_space.hpp"

namespace ctmc {

struct ExperimentConfig {
  // space
  int S = 2;
  int d = 1;
  std::int64_t exact_cap = kDefaultExactCap;

  // initial data distribution q0
  enum class Q0Kind { uniform, point_mass, dirichlet };
  Q0Kind q0_kind = Q0Kind::uniform;
  std::int64_t q0_index = 0;   // point-mass
  double q0_alpha = 1.0;       // dirichlet
  std::uint64_t q0_seed = 0;   // dirichlet

  // score provider
  PerturbationSpec perturbation;
  double M = std::numeric_limits<double>::infinity();

  SamplerConfig sampler;

  // schedule
  TimeGrid::Kind schedule_kind = TimeGrid::Kind::cted;
  double T = 1.0;
  double delta = 0.01;
  double kappa = 0.1;    // cted
  std::int64_t N = 1;    // uniform

  bool monte_carlo = false;
  std::int64_t n_traj = 0;
  std::uint64_t master_seed = 0;

  // error-budget report
  bool bound_enabled = false;
  int bound_substeps = 16;
  RateMode bound_rate_mode = RateMode::frozen_per_step;

  // output
  std::string output_jsonl;
  std::string per_step_csv;

  // Canonical sorted-key JSON echo with all defaults materialized; the
  // config hash is FNV-1a over its dump().
  nlohmann::json normalized;

  Space make_space() const;
  DensePmf make_q0(const Space& space) const;
  ScoreProvider make_provider(const DensePmf& q0) const;
  TimeGrid make_grid() const;
};

// Parses and cross-validates a config object. Violations throw InvalidSpec
// with a field-path message like "config.schedule: missing required field".
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::string& root = "config");
ExperimentConfig load_experiment_config(const std::string& path);

// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);
// 16-hex-digit hash of a config's canonical dump.
std::string config_hash_hex(const nlohmann::json& normalized);

// The scalar result columns a run with these switches emits, sorted.
std::vector<std::string> report_scalar_keys(bool monte_carlo,
                                            bool bound_enabled);

struct RunReport {
  std::string config_hash;        // 16 hex digits
  nlohmann::ordered_json record;  // the JSONL record (timing-free)
  // (key, formatted value) cells matching report_scalar_keys, sorted by key.
  std::vector<std::pair<std::string, std::string>> scalars;
  double wall_seconds = 0.0;      // stderr diagnostics only, never recorded
};

// Executes one experiment end-to-end. `mc_threads` caps the Monte-Carlo
// worker count (results do not depend on it); exact mode ignores it.
RunReport run_experiment(const ExperimentConfig& config, int mc_threads);

struct SweepAxis {
  std::string name;                    // kappa | delta | S | d | c | sampler
  std::vector<nlohmann::json> values;  // in file order
};

struct SweepSpec {
  nlohmann::json base;          // experiment config object
  std::vector<SweepAxis> axes;  // sorted by name
  std::string output_csv;
};

SweepSpec parse_sweep_spec(const nlohmann::json& j);
SweepSpec load_sweep_spec(const std::string& path);

// The base config with one cross-product point applied: each axis value is
// written through to its config field and the master seed is re-derived as
// mix(base_seed, point_index).
nlohmann::json sweep_point_config(const SweepSpec& spec,
                                  const std::vector<std::size_t>& choice,
                                  std::size_t point_index);

struct SweepResult {
  std::vector<std::string> columns;            // config_hash first
  std::vector<std::vector<std::string>> rows;  // one per point, point order
};

// Runs every cross-product point (worker pool of `threads`); a failing point
// records its error message in-row and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, int threads);

void write_csv(const SweepResult& result, std::ostream& out);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Index of a column; InvalidInput if absent.
  std::size_t column_index(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

struct FitReport {
  FitResult fit;
  int parse_dropped = 0;  // cells that were empty or non-numeric
};

// Log-log slope of y_col against x_col over the table's usable rows.
FitReport fit_csv(const CsvTable& table, const std::string& x_col,
                  const std::string& y_col);

// Worker cap: CTMC_LAB_THREADS if set to a positive integer, else the
// hardware concurrency (at least 1).
int thread_cap_from_env();

}  // namespace ctmc
