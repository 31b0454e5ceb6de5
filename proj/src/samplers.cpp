#include "ctmc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ctmc/linalg.hpp"

namespace ctmc {

namespace {

// Frozen per-token jump rates out of state x along one dimension:
// out[a] = (1/S) * s(x with a, x), out[x_tok] = 0.
void rates_from_table(const ScoreTable& st, std::int64_t x_index, int dim,
                      int x_tok, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(st.S), 0.0);
  for (int a = 0; a < st.S; ++a) {
    if (a == x_tok) continue;
    out[static_cast<std::size_t>(a)] =
        st.value(x_index, dim, a) / static_cast<double>(st.S);
  }
}

void scores_from_table(const ScoreTable& st, std::int64_t x_index, int dim,
                       std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(st.S));
  for (int a = 0; a < st.S; ++a) {
    out[static_cast<std::size_t>(a)] = st.value(x_index, dim, a);
  }
}

int apply_policy(int raw, int x_tok, int S, TauPolicy policy) {
  if (raw >= 0 && raw < S) return raw;
  return policy == TauPolicy::clamp ? std::clamp(raw, 0, S - 1) : x_tok;
}

// Smallest cap with P(Pois(mu) > cap) <= budget.
int poisson_cap(double mu, double budget) {
  double pmf = std::exp(-mu);
  double tail = 1.0 - pmf;
  int cap = 0;
  while (tail > budget) {
    ++cap;
    pmf *= mu / cap;
    tail -= pmf;
    require(cap <= 4096, ErrorCode::truncation_overflow,
            "Poisson truncation budget unreachable (mean too large)");
  }
  return cap;
}

// Exact per-token row shared by all per-dimension samplers.
std::vector<double> token_row(const SamplerConfig& config,
                              const ScoreTable& st, std::int64_t x_index,
                              int dim, int x_tok, double dt) {
  std::vector<double> rates;
  switch (config.kind) {
    case SamplerKind::tau_leaping:
      rates_from_table(st, x_index, dim, x_tok, rates);
      return tau_leaping_exact_token_kernel(rates, x_tok, dt, config.policy,
                                            config.poisson_truncation_tail);
    case SamplerKind::euler:
      rates_from_table(st, x_index, dim, x_tok, rates);
      return euler_token_row(rates, x_tok, dt);
    case SamplerKind::truncated:
      rates_from_table(st, x_index, dim, x_tok, rates);
      return truncated_token_row(rates, x_tok, dt);
    case SamplerKind::tweedie:
      scores_from_table(st, x_index, dim, rates);
      return tweedie_token_row(rates, x_tok, dt);
    case SamplerKind::kolmogorov_ref:
      break;
  }
  fail(ErrorCode::invalid_spec,
       "kolmogorov-ref has no per-token row; use the dense kernel");
}

}  // namespace

const char* sampler_tag(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::tau_leaping: return "tau-leaping";
    case SamplerKind::euler: return "euler";
    case SamplerKind::tweedie: return "tweedie";
    case SamplerKind::truncated: return "truncated";
    case SamplerKind::kolmogorov_ref: return "kolmogorov-ref";
  }
  return "unknown";
}

SamplerKind parse_sampler_tag(const std::string& tag) {
  if (tag == "tau-leaping") return SamplerKind::tau_leaping;
  if (tag == "euler") return SamplerKind::euler;
  if (tag == "tweedie") return SamplerKind::tweedie;
  if (tag == "truncated") return SamplerKind::truncated;
  if (tag == "kolmogorov-ref") return SamplerKind::kolmogorov_ref;
  fail(ErrorCode::invalid_spec, "unknown sampler tag \"" + tag + "\"");
}

const char* tau_policy_tag(TauPolicy policy) {
  return policy == TauPolicy::clamp ? "clamp" : "freeze";
}

TauPolicy parse_tau_policy(const std::string& tag) {
  if (tag == "clamp") return TauPolicy::clamp;
  if (tag == "freeze") return TauPolicy::freeze;
  fail(ErrorCode::invalid_spec, "unknown out-of-range policy \"" + tag + "\"");
}

void SamplerConfig::validate() const {
  require(poisson_truncation_tail > 0.0 && poisson_truncation_tail <= 1e-6,
          ErrorCode::invalid_spec,
          "poisson_truncation_tail must lie in (0, 1e-6]");
}

double estimated_rate(const ScoreProvider& provider, double t_k, double T,
                      const State& x, const State& y) {
  require(T > 0.0 && t_k >= 0.0 && t_k < T, ErrorCode::invalid_time,
          "estimated rate needs reverse time t_k in [0, T)");
  const Space& space = provider.q0().space;
  int h = hamming(x, y);
  if (h >= 2) return 0.0;
  double u = T - t_k;
  if (h == 1) return provider.evaluate(u, x, y) / space.S();
  double total = 0.0;
  for (const State& nbr : neighbors(x, space)) {
    total += provider.evaluate(u, x, nbr) / space.S();
  }
  return -total;
}

std::vector<double> tau_leaping_exact_token_kernel(
    const std::vector<double>& rates, int x_tok, double dt, TauPolicy policy,
    double tail) {
  const int S = static_cast<int>(rates.size());
  require(S >= 2 && x_tok >= 0 && x_tok < S, ErrorCode::invalid_input,
          "tau token kernel needs a valid rate vector and token");
  require(dt >= 0.0, ErrorCode::invalid_time, "tau token kernel needs dt >= 0");
  require(tail > 0.0 && tail <= 1e-6, ErrorCode::invalid_spec,
          "tau truncation tail must lie in (0, 1e-6]");

  std::vector<double> row(static_cast<std::size_t>(S), 0.0);
  if (dt == 0.0) {
    row[static_cast<std::size_t>(x_tok)] = 1.0;
    return row;
  }

  // Collect the active targets and their Poisson means.
  std::vector<int> targets;
  std::vector<double> means;
  for (int a = 0; a < S; ++a) {
    if (a == x_tok) continue;
    require(rates[static_cast<std::size_t>(a)] >= 0.0, ErrorCode::invalid_rate,
            "tau token kernel needs non-negative rates");
    targets.push_back(a);
    means.push_back(rates[static_cast<std::size_t>(a)] * dt);
  }
  const int K = static_cast<int>(targets.size());

  // Per-target caps chosen so the joint neglected tail stays below `tail`.
  double per_target_budget = tail / (2.0 * K);
  std::vector<int> caps(static_cast<std::size_t>(K));
  double enumeration_size = 1.0;
  for (int j = 0; j < K; ++j) {
    caps[static_cast<std::size_t>(j)] =
        means[static_cast<std::size_t>(j)] == 0.0
            ? 0
            : poisson_cap(means[static_cast<std::size_t>(j)],
                          per_target_budget);
    enumeration_size *= caps[static_cast<std::size_t>(j)] + 1;
    require(enumeration_size <= 2e7, ErrorCode::truncation_overflow,
            "tau exact kernel enumeration too large for this rate regime");
  }

  // Tabulate Poisson pmfs up to the caps.
  std::vector<std::vector<double>> pmf(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    double mu = means[static_cast<std::size_t>(j)];
    auto& col = pmf[static_cast<std::size_t>(j)];
    col.resize(static_cast<std::size_t>(caps[static_cast<std::size_t>(j)] + 1));
    col[0] = std::exp(-mu);
    for (int m = 1; m <= caps[static_cast<std::size_t>(j)]; ++m) {
      col[static_cast<std::size_t>(m)] =
          col[static_cast<std::size_t>(m - 1)] * mu / m;
    }
  }

  // Enumerate the product of count vectors depth-first.
  double covered = 0.0;
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  auto recurse = [&](auto&& self, int j, double prob, long displacement) -> void {
    if (j == K) {
      int raw = x_tok + static_cast<int>(
                            std::clamp<long>(displacement, -(1L << 30), 1L << 30));
      int landing = apply_policy(raw, x_tok, S, policy);
      row[static_cast<std::size_t>(landing)] += prob;
      covered += prob;
      return;
    }
    for (int m = 0; m <= caps[static_cast<std::size_t>(j)]; ++m) {
      self(self, j + 1, prob * pmf[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)],
           displacement + static_cast<long>(m) * (targets[static_cast<std::size_t>(j)] - x_tok));
    }
  };
  recurse(recurse, 0, 1.0, 0);

  double residual = 1.0 - covered;
  require(residual <= tail + 1e-15, ErrorCode::truncation_overflow,
          "tau exact kernel residual exceeds the truncation budget");
  // Assign the neglected tail to the stay outcome.
  row[static_cast<std::size_t>(x_tok)] += std::max(residual, 0.0);
  return row;
}

std::vector<double> euler_token_row(const std::vector<double>& rates,
                                    int x_tok, double dt) {
  const int S = static_cast<int>(rates.size());
  require(S >= 2 && x_tok >= 0 && x_tok < S, ErrorCode::invalid_input,
          "euler row needs a valid rate vector and token");
  require(dt >= 0.0, ErrorCode::invalid_time, "euler row needs dt >= 0");
  std::vector<double> row(static_cast<std::size_t>(S), 0.0);
  double move = 0.0;
  for (int a = 0; a < S; ++a) {
    if (a == x_tok) continue;
    double p = rates[static_cast<std::size_t>(a)] * dt;
    require(p >= 0.0, ErrorCode::invalid_rate,
            "euler row needs non-negative rates");
    row[static_cast<std::size_t>(a)] = p;
    move += p;
  }
  double stay = 1.0 - move;
  require(stay >= 0.0, ErrorCode::step_too_large,
          "euler stay probability negative (total rate * dt = " +
              std::to_string(move) + "); shrink the step");
  row[static_cast<std::size_t>(x_tok)] = stay;
  return row;
}

std::vector<double> truncated_token_row(const std::vector<double>& rates,
                                        int x_tok, double dt) {
  const int S = static_cast<int>(rates.size());
  require(S >= 2 && x_tok >= 0 && x_tok < S, ErrorCode::invalid_input,
          "truncated row needs a valid rate vector and token");
  require(dt >= 0.0, ErrorCode::invalid_time, "truncated row needs dt >= 0");
  std::vector<double> row(static_cast<std::size_t>(S), 0.0);
  double rho = 0.0;
  for (int a = 0; a < S; ++a) {
    if (a == x_tok) continue;
    require(rates[static_cast<std::size_t>(a)] >= 0.0, ErrorCode::invalid_rate,
            "truncated row needs non-negative rates");
    rho += rates[static_cast<std::size_t>(a)];
  }
  if (rho == 0.0 || dt == 0.0) {
    row[static_cast<std::size_t>(x_tok)] = 1.0;
    return row;
  }
  double stay = std::exp(-rho * dt);
  double jump_mass = 1.0 - stay;
  for (int a = 0; a < S; ++a) {
    if (a == x_tok) continue;
    row[static_cast<std::size_t>(a)] =
        rates[static_cast<std::size_t>(a)] / rho * jump_mass;
  }
  row[static_cast<std::size_t>(x_tok)] = stay;
  return row;
}

std::vector<double> tweedie_token_row(const std::vector<double>& scores,
                                      int x_tok, double dt) {
  const int S = static_cast<int>(scores.size());
  require(S >= 2 && x_tok >= 0 && x_tok < S, ErrorCode::invalid_input,
          "tweedie row needs a valid score vector and token");
  require(dt >= 0.0, ErrorCode::invalid_time, "tweedie row needs dt >= 0");
  std::vector<double> row(static_cast<std::size_t>(S), 0.0);
  if (dt == 0.0) {
    row[static_cast<std::size_t>(x_tok)] = 1.0;
    return row;
  }

  // exp(-dt R_base) has diagonal (1+(S-1)e^{+dt})/S and off-diagonal
  // (1-e^{+dt})/S (negative); exp(+dt R_base) is the forward token kernel.
  double e_plus = std::exp(dt);
  double back_off = (1.0 - e_plus) / S;
  ForwardKernel fwd = token_kernel(dt, S);

  double score_sum = 0.0;
  for (double s : scores) score_sum += s;

  double move = 0.0;
  for (int a = 0; a < S; ++a) {
    if (a == x_tok) continue;
    // back_diag - back_off simplifies to e^{+dt}.
    double inner = back_off * score_sum +
                   e_plus * scores[static_cast<std::size_t>(a)];
    double p = inner * fwd.offdiag;
    require(p >= 0.0, ErrorCode::negative_mass,
            "tweedie row produced negative mass (strongly perturbed scores "
            "with dt = " + std::to_string(dt) + ")");
    row[static_cast<std::size_t>(a)] = p;
    move += p;
  }
  double stay = 1.0 - move;
  if (stay < 0.0) {
    require(stay >= -1e-12, ErrorCode::step_too_large,
            "tweedie move mass exceeds 1 (total = " + std::to_string(move) +
                ")");
    stay = 0.0;
  }
  row[static_cast<std::size_t>(x_tok)] = stay;
  return row;
}

StepKernel kolmogorov_reference_step_kernel(const Space& space, double t_k,
                                            double t_k1, double T,
                                            const ScoreProvider& provider) {
  require_exact_mode(space);
  require(t_k1 >= t_k && t_k >= 0.0 && t_k1 <= T, ErrorCode::invalid_time,
          "reference step needs 0 <= t_k <= t_{k+1} <= T");
  const std::int64_t n = space.size();
  double dt = t_k1 - t_k;

  StepKernel kernel;
  kernel.n = n;
  kernel.from_time = t_k;
  kernel.to_time = t_k1;
  kernel.kind = SamplerKind::kolmogorov_ref;
  if (dt == 0.0) {
    kernel.m.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
                    0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      kernel.m[static_cast<std::size_t>(i * n + i)] = 1.0;
    }
    return kernel;
  }

  // Frozen joint generator: off-diagonals from the estimated rates, diagonal
  // the negative row sum.
  ScoreTable st = provider.table(T - t_k);
  std::vector<double> gen(
      static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (std::int64_t xi = 0; xi < n; ++xi) {
    double total = 0.0;
    for (int dim = 0; dim < space.d(); ++dim) {
      int x_tok = token_at(xi, dim, space);
      for (int a = 0; a < space.S(); ++a) {
        if (a == x_tok) continue;
        std::int64_t yi = substitute_index(xi, dim, x_tok, a, space);
        double rate = st.value(xi, dim, a) / space.S();
        gen[static_cast<std::size_t>(xi * n + yi)] = rate * dt;
        total += rate;
      }
    }
    gen[static_cast<std::size_t>(xi * n + xi)] = -total * dt;
  }

  kernel.m = expm_dense(gen, n);

  // The series can leave harmless negative round-off; anything larger is a
  // real failure. Rows are then renormalized and must already be within
  // 1e-10 of stochastic.
  for (std::int64_t xi = 0; xi < n; ++xi) {
    double sum = 0.0;
    for (std::int64_t yi = 0; yi < n; ++yi) {
      double& v = kernel.m[static_cast<std::size_t>(xi * n + yi)];
      if (v < 0.0) {
        require(v >= -1e-12, ErrorCode::negative_mass,
                "reference kernel entry significantly negative");
        v = 0.0;
      }
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-10, ErrorCode::numerical_failure,
            "reference kernel row sum off by more than 1e-10");
    for (std::int64_t yi = 0; yi < n; ++yi) {
      kernel.m[static_cast<std::size_t>(xi * n + yi)] /= sum;
    }
  }
  return kernel;
}

std::vector<double> sampler_step_kernel(const SamplerConfig& config,
                                        const Space& space, const State& x,
                                        double t_k, double t_k1, double T,
                                        const ScoreProvider& provider) {
  require_exact_mode(space);
  config.validate();
  require(t_k1 >= t_k && t_k >= 0.0 && t_k1 <= T, ErrorCode::invalid_time,
          "step kernel needs 0 <= t_k <= t_{k+1} <= T");
  validate_state(x, space);
  const std::int64_t n = space.size();
  std::int64_t x_index = encode(x, space);
  double dt = t_k1 - t_k;

  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  if (dt == 0.0) {
    row[static_cast<std::size_t>(x_index)] = 1.0;
    return row;
  }

  if (config.kind == SamplerKind::kolmogorov_ref) {
    StepKernel kernel =
        kolmogorov_reference_step_kernel(space, t_k, t_k1, T, provider);
    const double* src = kernel.row(x_index);
    std::copy(src, src + n, row.begin());
    return row;
  }

  ScoreTable st = provider.table(T - t_k);
  std::vector<std::vector<double>> dim_rows(
      static_cast<std::size_t>(space.d()));
  for (int dim = 0; dim < space.d(); ++dim) {
    int x_tok = x[static_cast<std::size_t>(dim)];
    dim_rows[static_cast<std::size_t>(dim)] =
        token_row(config, st, x_index, dim, x_tok, dt);
  }

  // Product over dimensions: row(y) = prod_i dim_rows[i][y_i].
  for (std::int64_t yi = 0; yi < n; ++yi) {
    double prob = 1.0;
    std::int64_t rem = yi;
    for (int dim = 0; dim < space.d(); ++dim) {
      prob *= dim_rows[static_cast<std::size_t>(dim)]
                      [static_cast<std::size_t>(rem % space.S())];
      rem /= space.S();
    }
    row[static_cast<std::size_t>(yi)] = prob;
  }
  return row;
}

namespace {

State mc_step_from_table(const SamplerConfig& config, const Space& space,
                         const State& x, std::int64_t x_index, double dt,
                         const ScoreTable& st, rng::Stream& stream,
                         const StepKernel* kolmogorov_kernel) {
  const int S = space.S();
  State next = x;
  if (config.kind == SamplerKind::kolmogorov_ref) {
    require(kolmogorov_kernel != nullptr, ErrorCode::invalid_input,
            "kolmogorov-ref Monte-Carlo step needs its dense kernel");
    std::int64_t yi = stream.categorical(kolmogorov_kernel->row(x_index),
                                         static_cast<int>(space.size()));
    return decode(yi, space);
  }

  std::vector<double> rates;
  std::vector<double> row;
  for (int dim = 0; dim < space.d(); ++dim) {
    int x_tok = x[static_cast<std::size_t>(dim)];
    switch (config.kind) {
      case SamplerKind::tau_leaping: {
        // Mechanically faithful: actual Poisson counts per target token.
        rates_from_table(st, x_index, dim, x_tok, rates);
        long displacement = 0;
        for (int a = 0; a < S; ++a) {
          if (a == x_tok) continue;
          long count =
              stream.poisson(rates[static_cast<std::size_t>(a)] * dt);
          displacement += count * static_cast<long>(a - x_tok);
        }
        int raw = x_tok + static_cast<int>(std::clamp<long>(
                              displacement, -(1L << 30), 1L << 30));
        next[static_cast<std::size_t>(dim)] =
            apply_policy(raw, x_tok, S, config.policy);
        break;
      }
      case SamplerKind::euler: {
        rates_from_table(st, x_index, dim, x_tok, rates);
        row = euler_token_row(rates, x_tok, dt);
        next[static_cast<std::size_t>(dim)] =
            stream.categorical(row.data(), S);
        break;
      }
      case SamplerKind::truncated: {
        rates_from_table(st, x_index, dim, x_tok, rates);
        row = truncated_token_row(rates, x_tok, dt);
        next[static_cast<std::size_t>(dim)] =
            stream.categorical(row.data(), S);
        break;
      }
      case SamplerKind::tweedie: {
        scores_from_table(st, x_index, dim, rates);
        row = tweedie_token_row(rates, x_tok, dt);
        next[static_cast<std::size_t>(dim)] =
            stream.categorical(row.data(), S);
        break;
      }
      case SamplerKind::kolmogorov_ref:
        break;  // handled above
    }
  }
  return next;
}

}  // namespace

State sampler_mc_step(const SamplerConfig& config, const Space& space,
                      const State& x, double dt, const ScoreTable& table,
                      rng::Stream& stream,
                      const StepKernel* kolmogorov_kernel) {
  return mc_step_from_table(config, space, x, encode(x, space), dt, table,
                            stream, kolmogorov_kernel);
}

State tau_leaping_step(const State& x, double t_k, double t_k1, double T,
                       const ScoreProvider& provider, TauPolicy policy,
                       rng::Stream& stream) {
  SamplerConfig config;
  config.kind = SamplerKind::tau_leaping;
  config.policy = policy;
  ScoreTable st = provider.table(T - t_k);
  return sampler_mc_step(config, provider.q0().space, x, t_k1 - t_k, st,
                         stream);
}

State euler_step(const State& x, double t_k, double t_k1, double T,
                 const ScoreProvider& provider, rng::Stream& stream) {
  SamplerConfig config;
  config.kind = SamplerKind::euler;
  ScoreTable st = provider.table(T - t_k);
  return sampler_mc_step(config, provider.q0().space, x, t_k1 - t_k, st,
                         stream);
}

State tweedie_step(const State& x, double t_k, double t_k1, double T,
                   const ScoreProvider& provider, rng::Stream& stream) {
  SamplerConfig config;
  config.kind = SamplerKind::tweedie;
  ScoreTable st = provider.table(T - t_k);
  return sampler_mc_step(config, provider.q0().space, x, t_k1 - t_k, st,
                         stream);
}

State truncated_tau_leaping_step(const State& x, double t_k, double t_k1,
                                 double T, const ScoreProvider& provider,
                                 rng::Stream& stream) {
  SamplerConfig config;
  config.kind = SamplerKind::truncated;
  ScoreTable st = provider.table(T - t_k);
  return sampler_mc_step(config, provider.q0().space, x, t_k1 - t_k, st,
                         stream);
}

ExactChainResult run_chain_exact(const SamplerConfig& config,
                                 const Space& space, const TimeGrid& grid,
                                 const ScoreProvider& provider) {
  require_exact_mode(space);
  config.validate();
  const std::int64_t n = space.size();
  const double T = grid.T;

  ExactChainResult result{DensePmf::uniform(space), {}};
  result.marginals.push_back(result.p_final);

  std::vector<std::vector<double>> dim_rows(
      static_cast<std::size_t>(space.d()));
  for (std::int64_t k = 0; k < grid.steps(); ++k) {
    double t_k = grid.t[static_cast<std::size_t>(k)];
    double dt = grid.step(k);
    const std::vector<double>& p = result.p_final.p;
    std::vector<double> p_next(static_cast<std::size_t>(n), 0.0);
    try {
      if (config.kind == SamplerKind::kolmogorov_ref) {
        StepKernel kernel = kolmogorov_reference_step_kernel(
            space, t_k, t_k + dt, T, provider);
        for (std::int64_t xi = 0; xi < n; ++xi) {
          double mass = p[static_cast<std::size_t>(xi)];
          if (mass == 0.0) continue;
          const double* row = kernel.row(xi);
          for (std::int64_t yi = 0; yi < n; ++yi) {
            p_next[static_cast<std::size_t>(yi)] += mass * row[yi];
          }
        }
      } else {
        ScoreTable st = provider.table(T - t_k);
        for (std::int64_t xi = 0; xi < n; ++xi) {
          double mass = p[static_cast<std::size_t>(xi)];
          if (mass == 0.0) continue;
          for (int dim = 0; dim < space.d(); ++dim) {
            dim_rows[static_cast<std::size_t>(dim)] = token_row(
                config, st, xi, dim, token_at(xi, dim, space), dt);
          }
          for (std::int64_t yi = 0; yi < n; ++yi) {
            double prob = 1.0;
            std::int64_t rem = yi;
            for (int dim = 0; dim < space.d(); ++dim) {
              prob *= dim_rows[static_cast<std::size_t>(dim)]
                              [static_cast<std::size_t>(rem % space.S())];
              rem /= space.S();
            }
            if (prob != 0.0) {
              p_next[static_cast<std::size_t>(yi)] += mass * prob;
            }
          }
        }
      }
    } catch (const Error& e) {
      if (is_config_error(e.code())) throw;
      // Error::what() starts with "<CodeName>: "; strip it so re-wrapping
      // does not double the prefix.
      std::string msg = e.what();
      std::string prefix = std::string(error_code_name(e.code())) + ": ";
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      throw Error(e.code(), msg + " (at step k = " + std::to_string(k) +
                                ", t_k = " + std::to_string(t_k) + ")");
    }
    result.p_final.p = std::move(p_next);
    result.marginals.push_back(result.p_final);
  }
  return result;
}

DensePmf run_chain_mc(const SamplerConfig& config, const Space& space,
                      const TimeGrid& grid, const ScoreProvider& provider,
                      std::int64_t n_traj, std::uint64_t master_seed,
                      int threads) {
  require_exact_mode(space);  // tables and the returned pmf are dense
  config.validate();
  require(n_traj >= 1, ErrorCode::invalid_spec,
          "Monte-Carlo mode needs n_traj >= 1");
  const std::int64_t n = space.size();
  const double T = grid.T;

  // Shared per-step score tables (and dense kernels for the reference
  // sampler), built once up front.
  std::vector<ScoreTable> tables;
  std::vector<StepKernel> kernels;
  tables.reserve(static_cast<std::size_t>(grid.steps()));
  for (std::int64_t k = 0; k < grid.steps(); ++k) {
    double t_k = grid.t[static_cast<std::size_t>(k)];
    tables.push_back(provider.table(T - t_k));
    if (config.kind == SamplerKind::kolmogorov_ref) {
      kernels.push_back(kolmogorov_reference_step_kernel(
          space, t_k, t_k + grid.step(k), T, provider));
    }
  }

  int n_threads = std::max(1, threads);
  n_threads = static_cast<int>(
      std::min<std::int64_t>(n_threads, n_traj));

  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(n_threads),
      std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(
      static_cast<std::size_t>(n_threads));

  auto body = [&](int worker) {
    try {
      for (std::int64_t traj = worker; traj < n_traj; traj += n_threads) {
        rng::Stream stream = rng::Stream::for_trajectory(
            master_seed, static_cast<std::uint64_t>(traj));
        State x = decode(stream.uniform_index(n), space);
        for (std::int64_t k = 0; k < grid.steps(); ++k) {
          x = sampler_mc_step(
              config, space, x, grid.step(k),
              tables[static_cast<std::size_t>(k)], stream,
              kernels.empty() ? nullptr
                              : &kernels[static_cast<std::size_t>(k)]);
        }
        ++counts[static_cast<std::size_t>(worker)]
                [static_cast<std::size_t>(encode(x, space))];
      }
    } catch (...) {
      failures[static_cast<std::size_t>(worker)] = std::current_exception();
    }
  };

  if (n_threads == 1) {
    body(0);
  } else {
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) workers.emplace_back(body, w);
    for (auto& t : workers) t.join();
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
  for (const auto& local : counts) {
    for (std::int64_t i = 0; i < n; ++i) {
      mass[static_cast<std::size_t>(i)] +=
          static_cast<double>(local[static_cast<std::size_t>(i)]);
    }
  }
  for (auto& v : mass) v /= static_cast<double>(n_traj);
  return DensePmf{space, std::move(mass)};
}

}  // namespace ctmc
