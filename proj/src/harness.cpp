#include "ctmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <thread>

#include "ctmc/forward.hpp"
#include "ctmc/rng.hpp"

namespace ctmc {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  fail(ErrorCode::invalid_spec, path + ": " + what);
}

const json& get_field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) config_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) config_fail(path + "." + key, "missing required field");
  return *it;
}

const json* find_field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) config_fail(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) config_fail(path + "." + it.key(), "unknown field");
  }
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) config_fail(path, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    config_fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_seed(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  config_fail(path, "expected a non-negative integer seed");
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) config_fail(path, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) config_fail(path, "expected a boolean");
  return v.get<bool>();
}

void parse_space(const json& j, const std::string& path, ExperimentConfig& c) {
  reject_unknown(j, path, {"S", "d", "exact_cap"});
  c.S = static_cast<int>(get_integer(get_field(j, path, "S"), path + ".S"));
  c.d = static_cast<int>(get_integer(get_field(j, path, "d"), path + ".d"));
  if (c.S < 2) config_fail(path + ".S", "alphabet size must be at least 2");
  if (c.d < 1) config_fail(path + ".d", "dimension must be at least 1");
  if (const json* cap = find_field(j, path, "exact_cap")) {
    c.exact_cap = get_integer(*cap, path + ".exact_cap");
    if (c.exact_cap < 1)
      config_fail(path + ".exact_cap", "cap must be positive");
  }
  Space space(c.S, c.d, c.exact_cap);
  if (!space.exact_mode_ok())
    config_fail(path, "S^d exceeds exact_cap; the laboratory only runs dense "
                      "instances");
}

void parse_q0(const json& j, const std::string& path, ExperimentConfig& c,
              std::int64_t space_size) {
  std::string kind = get_string(get_field(j, path, "kind"), path + ".kind");
  if (kind == "uniform") {
    reject_unknown(j, path, {"kind"});
    c.q0_kind = ExperimentConfig::Q0Kind::uniform;
  } else if (kind == "point-mass") {
    reject_unknown(j, path, {"kind", "index"});
    c.q0_kind = ExperimentConfig::Q0Kind::point_mass;
    c.q0_index = get_integer(get_field(j, path, "index"), path + ".index");
    if (c.q0_index < 0 || c.q0_index >= space_size)
      config_fail(path + ".index", "state index outside [0, S^d)");
  } else if (kind == "dirichlet") {
    reject_unknown(j, path, {"kind", "alpha", "seed"});
    c.q0_kind = ExperimentConfig::Q0Kind::dirichlet;
    c.q0_alpha = get_number(get_field(j, path, "alpha"), path + ".alpha");
    if (!(c.q0_alpha > 0.0) || !std::isfinite(c.q0_alpha))
      config_fail(path + ".alpha", "concentration must be positive");
    c.q0_seed = get_seed(get_field(j, path, "seed"), path + ".seed");
  } else {
    config_fail(path + ".kind",
                "unknown kind \"" + kind +
                    "\" (expected uniform | point-mass | dirichlet)");
  }
}

void parse_provider(const json& j, const std::string& path,
                    ExperimentConfig& c) {
  std::string kind = get_string(get_field(j, path, "kind"), path + ".kind");
  if (kind == "exact") {
    reject_unknown(j, path, {"kind", "M"});
    c.perturbation.kind = PerturbationSpec::Kind::none;
  } else if (kind == "multiplicative") {
    reject_unknown(j, path, {"kind", "c", "M"});
    c.perturbation.kind = PerturbationSpec::Kind::multiplicative;
    c.perturbation.c = get_number(get_field(j, path, "c"), path + ".c");
    if (!(c.perturbation.c > 0.0) || !std::isfinite(c.perturbation.c))
      config_fail(path + ".c", "multiplicative factor must be positive");
  } else if (kind == "lognormal") {
    reject_unknown(j, path, {"kind", "sigma", "seed", "M"});
    c.perturbation.kind = PerturbationSpec::Kind::lognormal;
    c.perturbation.sigma =
        get_number(get_field(j, path, "sigma"), path + ".sigma");
    if (!(c.perturbation.sigma >= 0.0) || !std::isfinite(c.perturbation.sigma))
      config_fail(path + ".sigma", "spread must be non-negative");
    c.perturbation.seed = get_seed(get_field(j, path, "seed"), path + ".seed");
  } else {
    config_fail(path + ".kind",
                "unknown kind \"" + kind +
                    "\" (expected exact | multiplicative | lognormal)");
  }
  if (const json* m = find_field(j, path, "M")) {
    c.M = get_number(*m, path + ".M");
    if (!(c.M >= 1.0))
      config_fail(path + ".M", "clip bound must be at least 1");
  }
}

void parse_sampler(const json& j, const std::string& path,
                   ExperimentConfig& c) {
  reject_unknown(j, path, {"kind", "policy", "poisson_truncation_tail"});
  std::string tag = get_string(get_field(j, path, "kind"), path + ".kind");
  try {
    c.sampler.kind = parse_sampler_tag(tag);
  } catch (const Error&) {
    config_fail(path + ".kind", "unknown sampler tag \"" + tag + "\"");
  }
  bool is_tau = c.sampler.kind == SamplerKind::tau_leaping;
  if (const json* policy = find_field(j, path, "policy")) {
    if (!is_tau)
      config_fail(path + ".policy",
                  "only valid for the tau-leaping sampler");
    std::string ptag = get_string(*policy, path + ".policy");
    try {
      c.sampler.policy = parse_tau_policy(ptag);
    } catch (const Error&) {
      config_fail(path + ".policy", "unknown policy \"" + ptag +
                                        "\" (expected clamp | freeze)");
    }
  }
  if (const json* tail = find_field(j, path, "poisson_truncation_tail")) {
    if (!is_tau)
      config_fail(path + ".poisson_truncation_tail",
                  "only valid for the tau-leaping sampler");
    c.sampler.poisson_truncation_tail =
        get_number(*tail, path + ".poisson_truncation_tail");
  }
  try {
    c.sampler.validate();
  } catch (const Error& e) {
    config_fail(path, e.what());
  }
}

void parse_schedule(const json& j, const std::string& path,
                    ExperimentConfig& c) {
  std::string kind =
      get_string(get_field(j, path, "schedule"), path + ".schedule");
  c.T = get_number(get_field(j, path, "T"), path + ".T");
  c.delta = get_number(get_field(j, path, "delta"), path + ".delta");
  if (!(c.T > 0.0) || !std::isfinite(c.T))
    config_fail(path + ".T", "horizon must be positive and finite");
  if (!(c.delta > 0.0) || !(c.delta < c.T))
    config_fail(path + ".delta", "early-stop margin must lie in (0, T)");
  if (kind == "uniform") {
    reject_unknown(j, path, {"schedule", "T", "delta", "N"});
    c.schedule_kind = TimeGrid::Kind::uniform;
    c.N = get_integer(get_field(j, path, "N"), path + ".N");
    if (c.N < 1) config_fail(path + ".N", "need at least one step");
  } else if (kind == "cted") {
    reject_unknown(j, path, {"schedule", "T", "delta", "kappa"});
    c.schedule_kind = TimeGrid::Kind::cted;
    c.kappa = get_number(get_field(j, path, "kappa"), path + ".kappa");
    if (!(c.kappa > 0.0) || !(c.kappa < 1.0))
      config_fail(path + ".kappa", "step factor must lie in (0, 1)");
  } else {
    config_fail(path + ".schedule",
                "unknown schedule \"" + kind + "\" (expected uniform | cted)");
  }
}

void parse_bound(const json& j, const std::string& path, ExperimentConfig& c) {
  reject_unknown(j, path, {"enabled", "quadrature_substeps", "rate_mode"});
  c.bound_enabled = true;
  if (const json* enabled = find_field(j, path, "enabled"))
    c.bound_enabled = get_bool(*enabled, path + ".enabled");
  if (const json* m = find_field(j, path, "quadrature_substeps")) {
    c.bound_substeps =
        static_cast<int>(get_integer(*m, path + ".quadrature_substeps"));
    if (c.bound_substeps < 1)
      config_fail(path + ".quadrature_substeps", "need at least one substep");
  }
  if (const json* mode = find_field(j, path, "rate_mode")) {
    std::string tag = get_string(*mode, path + ".rate_mode");
    if (tag == "frozen-per-step")
      c.bound_rate_mode = RateMode::frozen_per_step;
    else if (tag == "fresh")
      c.bound_rate_mode = RateMode::fresh;
    else
      config_fail(path + ".rate_mode",
                  "unknown mode \"" + tag +
                      "\" (expected frozen-per-step | fresh)");
  }
}

json normalize(const ExperimentConfig& c) {
  json j;
  j["space"] = {{"S", c.S}, {"d", c.d}, {"exact_cap", c.exact_cap}};

  json q0;
  switch (c.q0_kind) {
    case ExperimentConfig::Q0Kind::uniform:
      q0 = {{"kind", "uniform"}};
      break;
    case ExperimentConfig::Q0Kind::point_mass:
      q0 = {{"kind", "point-mass"}, {"index", c.q0_index}};
      break;
    case ExperimentConfig::Q0Kind::dirichlet:
      q0 = {{"kind", "dirichlet"}, {"alpha", c.q0_alpha}, {"seed", c.q0_seed}};
      break;
  }
  j["q0"] = q0;

  json provider;
  switch (c.perturbation.kind) {
    case PerturbationSpec::Kind::none:
      provider = {{"kind", "exact"}};
      break;
    case PerturbationSpec::Kind::multiplicative:
      provider = {{"kind", "multiplicative"}, {"c", c.perturbation.c}};
      break;
    case PerturbationSpec::Kind::lognormal:
      provider = {{"kind", "lognormal"},
                  {"sigma", c.perturbation.sigma},
                  {"seed", c.perturbation.seed}};
      break;
  }
  if (std::isfinite(c.M)) provider["M"] = c.M;
  j["provider"] = provider;

  json sampler = {{"kind", sampler_tag(c.sampler.kind)}};
  if (c.sampler.kind == SamplerKind::tau_leaping) {
    sampler["policy"] = tau_policy_tag(c.sampler.policy);
    sampler["poisson_truncation_tail"] = c.sampler.poisson_truncation_tail;
  }
  j["sampler"] = sampler;

  json schedule = {{"T", c.T}, {"delta", c.delta}};
  if (c.schedule_kind == TimeGrid::Kind::uniform) {
    schedule["schedule"] = "uniform";
    schedule["N"] = c.N;
  } else {
    schedule["schedule"] = "cted";
    schedule["kappa"] = c.kappa;
  }
  j["schedule"] = schedule;

  j["mode"] = c.monte_carlo ? "monte-carlo" : "exact";
  if (c.monte_carlo) j["mc"] = {{"n_traj", c.n_traj}};
  j["master_seed"] = c.master_seed;
  j["bound"] = {{"enabled", c.bound_enabled},
                {"quadrature_substeps", c.bound_substeps},
                {"rate_mode", c.bound_rate_mode == RateMode::fresh
                                  ? "fresh"
                                  : "frozen-per-step"}};
  j["output"] = {{"jsonl", c.output_jsonl},
                 {"per_step_csv", c.per_step_csv}};
  return j;
}

std::string format_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string sanitize_cell(std::string text) {
  for (char& ch : text) {
    if (ch == ',') ch = ';';
    if (ch == '\n' || ch == '\r') ch = ' ';
    if (ch == '"') ch = '\'';
  }
  return text;
}

void write_per_step_csv(const std::string& path, const DensePmf& q0,
                        const TimeGrid& grid, const ExactChainResult& chain) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::invalid_input,
          "cannot open per-step csv path \"" + path + "\"");
  out << "step,t,kl_to_noised_target,tv_to_noised_target\n";
  for (std::size_t k = 0; k < grid.t.size(); ++k) {
    DensePmf target_k = forward_marginal(q0, grid.T - grid.t[k]);
    out << k << ',' << json(grid.t[k]).dump() << ','
        << json(kl(target_k, chain.marginals[k])).dump() << ','
        << json(tv(target_k, chain.marginals[k])).dump() << '\n';
  }
}

const std::vector<std::string> kAxisNames = {"S", "c", "d", "delta",
                                             "kappa", "sampler"};

void apply_axis(json& cfg, const std::string& name, const json& value) {
  if (name == "kappa") {
    cfg["schedule"]["kappa"] = value;
  } else if (name == "delta") {
    cfg["schedule"]["delta"] = value;
  } else if (name == "S") {
    cfg["space"]["S"] = value;
  } else if (name == "d") {
    cfg["space"]["d"] = value;
  } else if (name == "c") {
    cfg["provider"]["c"] = value;
  } else if (name == "sampler") {
    cfg["sampler"]["kind"] = value;
  } else {
    config_fail("sweep.axes." + name, "unknown axis");
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::invalid_input,
          "cannot open \"" + path + "\"");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::invalid_input,
         "\"" + path + "\" is not valid JSON: " + e.what());
  }
}

}  // namespace

Space ExperimentConfig::make_space() const { return Space(S, d, exact_cap); }

DensePmf ExperimentConfig::make_q0(const Space& space) const {
  switch (q0_kind) {
    case Q0Kind::uniform:
      return DensePmf::uniform(space);
    case Q0Kind::point_mass:
      return DensePmf::point_mass(space, q0_index);
    case Q0Kind::dirichlet: {
      rng::Stream stream(rng::mix({q0_seed}));
      std::vector<double> mass =
          stream.dirichlet(q0_alpha, static_cast<int>(space.size()));
      return DensePmf::from_vector(space, std::move(mass));
    }
  }
  fail(ErrorCode::invalid_spec, "unreachable q0 kind");
}

ScoreProvider ExperimentConfig::make_provider(const DensePmf& q0) const {
  ScoreProvider base = ScoreProvider::exact(q0, M);
  if (perturbation.kind == PerturbationSpec::Kind::none) return base;
  return base.perturbed(perturbation);
}

TimeGrid ExperimentConfig::make_grid() const {
  if (schedule_kind == TimeGrid::Kind::uniform)
    return uniform_grid(T, delta, N);
  return cted_grid(T, delta, kappa);
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::string& root) {
  ExperimentConfig c;
  reject_unknown(j, root, {"space", "q0", "provider", "sampler", "schedule",
                           "mode", "mc", "master_seed", "bound", "output"});

  parse_space(get_field(j, root, "space"), root + ".space", c);
  Space space(c.S, c.d, c.exact_cap);
  parse_q0(get_field(j, root, "q0"), root + ".q0", c, space.size());
  parse_provider(get_field(j, root, "provider"), root + ".provider", c);
  parse_sampler(get_field(j, root, "sampler"), root + ".sampler", c);
  parse_schedule(get_field(j, root, "schedule"), root + ".schedule", c);

  std::string mode = get_string(get_field(j, root, "mode"), root + ".mode");
  if (mode == "exact") {
    c.monte_carlo = false;
    if (find_field(j, root, "mc"))
      config_fail(root + ".mc", "only valid when mode is \"monte-carlo\"");
  } else if (mode == "monte-carlo") {
    c.monte_carlo = true;
    const json& mc = get_field(j, root, "mc");
    reject_unknown(mc, root + ".mc", {"n_traj"});
    c.n_traj = get_integer(get_field(mc, root + ".mc", "n_traj"),
                           root + ".mc.n_traj");
    if (c.n_traj < 1)
      config_fail(root + ".mc.n_traj", "need at least one trajectory");
  } else {
    config_fail(root + ".mode", "unknown mode \"" + mode +
                                    "\" (expected exact | monte-carlo)");
  }

  if (const json* seed = find_field(j, root, "master_seed"))
    c.master_seed = get_seed(*seed, root + ".master_seed");

  if (const json* bound = find_field(j, root, "bound"))
    parse_bound(*bound, root + ".bound", c);

  if (const json* output = find_field(j, root, "output")) {
    reject_unknown(*output, root + ".output", {"jsonl", "per_step_csv"});
    if (const json* p = find_field(*output, root + ".output", "jsonl"))
      c.output_jsonl = get_string(*p, root + ".output.jsonl");
    if (const json* p = find_field(*output, root + ".output", "per_step_csv"))
      c.per_step_csv = get_string(*p, root + ".output.per_step_csv");
  }

  if (c.bound_enabled && c.sampler.kind != SamplerKind::tau_leaping &&
      c.sampler.kind != SamplerKind::truncated)
    config_fail(root + ".bound",
                "the error-budget report needs a tau-leaping or truncated "
                "sampler");
  if (!c.per_step_csv.empty() && c.monte_carlo)
    config_fail(root + ".output.per_step_csv",
                "per-step marginals are only available in exact mode");

  c.normalized = normalize(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(load_json_file(path));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash_hex(const nlohmann::json& normalized) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(normalized.dump()));
  return std::string(buf);
}

std::vector<std::string> report_scalar_keys(bool monte_carlo,
                                            bool bound_enabled) {
  std::vector<std::string> keys = {"early_stop_tv", "eps_score", "final_tv",
                                   "n_steps"};
  if (!monte_carlo) keys.push_back("final_kl");
  if (bound_enabled) {
    for (const char* key : {"disc_err", "est_err", "init_err", "lhs_kl",
                            "quad_est", "rhs_total"})
      keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

RunReport run_experiment(const ExperimentConfig& config, int mc_threads) {
  auto start = std::chrono::steady_clock::now();

  Space space = config.make_space();
  require_exact_mode(space);
  DensePmf q0 = config.make_q0(space);
  ScoreProvider provider = config.make_provider(q0);
  TimeGrid grid = config.make_grid();
  DensePmf target = forward_marginal(q0, grid.delta);

  json results;  // plain json => keys serialize alphabetically
  std::map<std::string, std::string> cells;
  auto put = [&](const std::string& key, const json& v) {
    results[key] = v;
    cells[key] = v.dump();
  };

  put("early_stop_tv", early_stop_tv(q0, grid.delta));
  put("eps_score", eps_score(provider, q0, grid));
  put("n_steps", grid.steps());

  if (config.monte_carlo) {
    DensePmf p_final =
        run_chain_mc(config.sampler, space, grid, provider, config.n_traj,
                     config.master_seed, mc_threads);
    put("final_tv", tv(target, p_final));
  } else {
    ExactChainResult chain =
        run_chain_exact(config.sampler, space, grid, provider);
    put("final_kl", kl(target, chain.p_final));
    put("final_tv", tv(target, chain.p_final));
    if (!config.per_step_csv.empty())
      write_per_step_csv(config.per_step_csv, q0, grid, chain);
  }

  if (config.bound_enabled) {
    BoundReport bound =
        kl_bound_report(provider, q0, grid, config.sampler,
                        config.bound_rate_mode, config.bound_substeps);
    json b;
    b["disc_err"] = bound.disc_err;
    b["est_err"] = bound.est_err;
    b["init_err"] = bound.init_err;
    b["lhs_kl"] = bound.lhs_kl;
    b["quad_est"] = bound.quad_est;
    b["rhs_total"] = bound.rhs_total;
    results["bound"] = b;
    for (auto it = b.begin(); it != b.end(); ++it)
      cells[it.key()] = it.value().dump();
  }

  RunReport report;
  report.config_hash = config_hash_hex(config.normalized);
  nlohmann::ordered_json record;
  record["config_hash"] = report.config_hash;
  record["config"] = config.normalized;
  record["results"] = results;
  report.record = std::move(record);
  report.scalars.assign(cells.begin(), cells.end());
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

SweepSpec parse_sweep_spec(const nlohmann::json& j) {
  SweepSpec spec;
  reject_unknown(j, "sweep", {"base", "axes", "output_csv"});
  const json& base = get_field(j, "sweep", "base");
  if (!base.is_object()) config_fail("sweep.base", "expected an object");
  spec.base = base;

  const json& axes = get_field(j, "sweep", "axes");
  if (!axes.is_object() || axes.empty())
    config_fail("sweep.axes", "expected a non-empty object of value arrays");
  for (auto it = axes.begin(); it != axes.end(); ++it) {  // sorted iteration
    const std::string& name = it.key();
    if (std::find(kAxisNames.begin(), kAxisNames.end(), name) ==
        kAxisNames.end())
      config_fail("sweep.axes." + name,
                  "unknown axis (expected S | c | d | delta | kappa | "
                  "sampler)");
    if (!it.value().is_array() || it.value().empty())
      config_fail("sweep.axes." + name, "expected a non-empty array");
    SweepAxis axis;
    axis.name = name;
    for (const json& v : it.value()) axis.values.push_back(v);
    spec.axes.push_back(std::move(axis));
  }

  if (const json* out = find_field(j, "sweep", "output_csv"))
    spec.output_csv = get_string(*out, "sweep.output_csv");
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
  return parse_sweep_spec(load_json_file(path));
}

nlohmann::json sweep_point_config(const SweepSpec& spec,
                                  const std::vector<std::size_t>& choice,
                                  std::size_t point_index) {
  json cfg = spec.base;
  for (std::size_t i = 0; i < spec.axes.size(); ++i)
    apply_axis(cfg, spec.axes[i].name, spec.axes[i].values[choice[i]]);
  std::uint64_t base_seed = 0;
  if (const json* seed = find_field(cfg, "config", "master_seed"))
    base_seed = get_seed(*seed, "config.master_seed");
  cfg["master_seed"] =
      rng::mix({base_seed, static_cast<std::uint64_t>(point_index)});
  cfg["output"] = json::object();  // sweep points never write side files
  return cfg;
}

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  // Column schema: config_hash first, then the alphabetical union of axis
  // names, result scalars (fixed by the base mode/bound switches), and the
  // error column.
  bool base_mc = false;
  if (const json* mode = find_field(spec.base, "config", "mode"))
    base_mc = mode->is_string() && mode->get<std::string>() == "monte-carlo";
  bool base_bound = false;
  if (const json* bound = find_field(spec.base, "config", "bound")) {
    base_bound = true;
    if (const json* enabled = find_field(*bound, "config.bound", "enabled"))
      base_bound = enabled->is_boolean() && enabled->get<bool>();
  }

  std::vector<std::string> names;
  for (const SweepAxis& axis : spec.axes) names.push_back(axis.name);
  for (const std::string& key : report_scalar_keys(base_mc, base_bound))
    names.push_back(key);
  names.push_back("error");
  std::sort(names.begin(), names.end());

  SweepResult result;
  result.columns.push_back("config_hash");
  result.columns.insert(result.columns.end(), names.begin(), names.end());

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < result.columns.size(); ++i)
    col[result.columns[i]] = i;

  std::size_t n_points = 1;
  for (const SweepAxis& axis : spec.axes) n_points *= axis.values.size();
  result.rows.assign(n_points,
                     std::vector<std::string>(result.columns.size()));

  auto run_point = [&](std::size_t index) {
    // Decode the cross-product choice, last axis fastest.
    std::vector<std::size_t> choice(spec.axes.size());
    std::size_t rem = index;
    for (std::size_t i = spec.axes.size(); i-- > 0;) {
      choice[i] = rem % spec.axes[i].values.size();
      rem /= spec.axes[i].values.size();
    }
    std::vector<std::string>& row = result.rows[index];
    for (std::size_t i = 0; i < spec.axes.size(); ++i)
      row[col[spec.axes[i].name]] =
          sanitize_cell(format_cell(spec.axes[i].values[choice[i]]));
    try {
      json cfg_json = sweep_point_config(spec, choice, index);
      ExperimentConfig cfg = parse_experiment_config(cfg_json);
      RunReport report = run_experiment(cfg, /*mc_threads=*/1);
      row[col["config_hash"]] = report.config_hash;
      for (const auto& [key, value] : report.scalars) {
        auto it = col.find(key);
        if (it != col.end()) row[it->second] = value;
      }
    } catch (const Error& e) {
      row[col["error"]] = sanitize_cell(e.what());
    } catch (const std::exception& e) {
      row[col["error"]] = sanitize_cell(std::string("Error: ") + e.what());
    }
  };

  int workers = std::max(1, std::min<int>(threads,
                                          static_cast<int>(n_points)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n_points; ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= n_points) return;
          run_point(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  for (std::size_t i = 0; i < result.columns.size(); ++i) {
    if (i) out << ',';
    out << result.columns[i];
  }
  out << '\n';
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  fail(ErrorCode::invalid_input, "csv has no column \"" + name + "\"");
}

CsvTable read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
      if (ch == ',') {
        cells.push_back(cell);
        cell.clear();
      } else if (ch != '\r') {
        cell.push_back(ch);
      }
    }
    cells.push_back(cell);
    return cells;
  };

  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::invalid_input, "csv is empty");
  table.columns = split(line);
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    require(cells.size() == table.columns.size(), ErrorCode::invalid_input,
            "csv row " + std::to_string(row_number) + " has " +
                std::to_string(cells.size()) + " cells, expected " +
                std::to_string(table.columns.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

FitReport fit_csv(const CsvTable& table, const std::string& x_col,
                  const std::string& y_col) {
  std::size_t xi = table.column_index(x_col);
  std::size_t yi = table.column_index(y_col);

  auto parse = [](const std::string& cell, double& out) {
    if (cell.empty()) return false;
    char* end = nullptr;
    out = std::strtod(cell.c_str(), &end);
    return end == cell.c_str() + cell.size() && std::isfinite(out);
  };

  FitReport report;
  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    double x = 0.0, y = 0.0;
    if (parse(row[xi], x) && parse(row[yi], y)) {
      xs.push_back(x);
      ys.push_back(y);
    } else {
      ++report.parse_dropped;
    }
  }
  report.fit = fit_slope(xs, ys);
  return report;
}

int thread_cap_from_env() {
  if (const char* env = std::getenv("CTMC_LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0)
      return static_cast<int>(std::min<long>(v, 256));
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace ctmc
