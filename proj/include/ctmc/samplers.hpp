// Deterministic-step reverse samplers.
//
// Every sampler freezes the estimated reverse rates at the step start
// t_k (forward time u = T - t_k) and advances each dimension independently:
//
//   tau-leaping  — independent Poisson jump counts per target token; the
//                  summed displacement may leave the alphabet, resolved by an
//                  out-of-range policy (clamp into range, or freeze the
//                  dimension);
//   euler        — first-order move probabilities rate * dt;
//   tweedie      — categorical row built from the closed-form exponentials
//                  of the base generator and the score vector;
//   truncated    — at most one jump per dimension per step: stay with
//                  exp(-rho * dt), else jump proportionally to the rates;
//   kolmogorov-ref — dense matrix exponential of the frozen joint generator,
//                  the exact reference for the frozen-rate step.
//
// Each sampler has a Monte-Carlo step and, in exact mode, a closed-form
// per-step kernel row; chains can be run in either mode.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmc/rng.hpp"
#include "ctmc/schedule.hpp"
#include "ctmc/score.hpp"
#include "ctmc/state_space.hpp"

namespace ctmc {

enum class SamplerKind { tau_leaping, euler, tweedie, truncated, kolmogorov_ref };
enum class TauPolicy { clamp, freeze };

const char* sampler_tag(SamplerKind kind);
SamplerKind parse_sampler_tag(const std::string& tag);
const char* tau_policy_tag(TauPolicy policy);
TauPolicy parse_tau_policy(const std::string& tag);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::truncated;
  TauPolicy policy = TauPolicy::clamp;       // tau-leaping only
  double poisson_truncation_tail = 1e-12;    // exact tau kernel budget

  void validate() const;
};

// Estimated reverse rate at reverse time t_k:
//   Ham(x,y)=1: (1/S) * s_{T-t_k}(y,x);  Ham>=2: 0;
//   x == y: negative sum of the off-diagonal row.
double estimated_rate(const ScoreProvider& provider, double t_k, double T,
                      const State& x, const State& y);

// ---- Per-token exact rows ------------------------------------------------
// `rates[a]` is the frozen jump rate from the current token x_tok to token a
// (the entry at a == x_tok is ignored). Each returns a length-S categorical.

// Exact law of one dimension's tau-leaping update: joint Poisson counts are
// enumerated until the neglected tail is below `tail`, the out-of-range
// policy maps each count vector to a landing token, and the residual tail
// mass is assigned to the stay token.
std::vector<double> tau_leaping_exact_token_kernel(
    const std::vector<double>& rates, int x_tok, double dt, TauPolicy policy,
    double tail);

// First-order row: move with probability rate * dt; StepTooLarge when the
// stay probability would be negative (never silently clamped).
std::vector<double> euler_token_row(const std::vector<double>& rates,
                                    int x_tok, double dt);

// At-most-one-jump row: stay with exp(-rho*dt), else jump to a with weight
// rate_a / rho. Always a valid categorical.
std::vector<double> truncated_token_row(const std::vector<double>& rates,
                                        int x_tok, double dt);

// Denoising row from the closed-form exponentials: for a != x_tok,
//   P(a) = ([exp(-dt R_base)]_{a,:} . scores) * [exp(+dt R_base)]_{a,x_tok},
// stay = 1 - sum. `scores[a]` is s(x with a, x) with scores[x_tok] = 1.
// Negative P(a) -> NegativeMass; total move mass > 1 -> StepTooLarge.
std::vector<double> tweedie_token_row(const std::vector<double>& scores,
                                      int x_tok, double dt);

// ---- Joint-space kernels (exact mode) ------------------------------------

struct StepKernel {
  std::int64_t n = 0;
  double from_time = 0.0;
  double to_time = 0.0;
  SamplerKind kind = SamplerKind::kolmogorov_ref;
  std::vector<double> m;  // row-major n x n

  const double* row(std::int64_t x_index) const {
    return m.data() + x_index * n;
  }
};

// Dense exp(dt * frozen generator): the exact frozen-rate reference step.
StepKernel kolmogorov_reference_step_kernel(const Space& space, double t_k,
                                            double t_k1, double T,
                                            const ScoreProvider& provider);

// One row of the exact per-step kernel for any sampler (dispatch). Rows are
// valid categoricals: non-negative, summing to 1 within 1e-10.
std::vector<double> sampler_step_kernel(const SamplerConfig& config,
                                        const Space& space, const State& x,
                                        double t_k, double t_k1, double T,
                                        const ScoreProvider& provider);

// ---- Monte-Carlo single steps ---------------------------------------------
// Provider-facing convenience ops; chains precompute score tables instead.

State tau_leaping_step(const State& x, double t_k, double t_k1, double T,
                       const ScoreProvider& provider, TauPolicy policy,
                       rng::Stream& stream);
State euler_step(const State& x, double t_k, double t_k1, double T,
                 const ScoreProvider& provider, rng::Stream& stream);
State tweedie_step(const State& x, double t_k, double t_k1, double T,
                   const ScoreProvider& provider, rng::Stream& stream);
State truncated_tau_leaping_step(const State& x, double t_k, double t_k1,
                                 double T, const ScoreProvider& provider,
                                 rng::Stream& stream);

// Table-driven Monte-Carlo step used by chain runners; `kolmogorov_kernel`
// must be supplied when config.kind == kolmogorov_ref.
State sampler_mc_step(const SamplerConfig& config, const Space& space,
                      const State& x, double dt, const ScoreTable& table,
                      rng::Stream& stream,
                      const StepKernel* kolmogorov_kernel = nullptr);

// ---- Chains ----------------------------------------------------------------

struct ExactChainResult {
  DensePmf p_final;
  std::vector<DensePmf> marginals;  // one per grid point, starting at uniform
};

// Exact distribution evolution from uniform p_0 through every grid step.
ExactChainResult run_chain_exact(const SamplerConfig& config,
                                 const Space& space, const TimeGrid& grid,
                                 const ScoreProvider& provider);

// Monte-Carlo chain: n_traj independent trajectories from uniform p_0, one
// RNG stream per trajectory derived from (master_seed, trajectory index);
// the result is thread-count independent.
DensePmf run_chain_mc(const SamplerConfig& config, const Space& space,
                      const TimeGrid& grid, const ScoreProvider& provider,
                      std::int64_t n_traj, std::uint64_t master_seed,
                      int threads);

}  // namespace ctmc
