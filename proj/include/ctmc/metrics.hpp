// Divergences, empirical estimation, the per-run KL error-budget report, and
// the two score-drift scaling diagnostics.
//
// The budget report is the executable form of the chain-level KL bound: the
// exact KL between the early-stopped target and the sampler's final law is
// compared against
//   init_err — KL between the noised data law at the horizon and uniform,
//   est_err  — grid-weighted score-entropy loss of the provider,
//   disc_err — quadrature of the expected Bregman gap between the true
//              reverse rates and the sampler's frozen per-step rates, minus
//              est_err,
// with a Richardson-style quadrature error estimate. It applies to the
// samplers with a path-wise piecewise-constant rate (tau-leaping and
// truncated); Euler and Tweedie are validated through first-order row
// equivalence and end-to-end KL instead.

#pragma once

#include <cstdint>
#include <vector>

#include "ctmc/samplers.hpp"
#include "ctmc/schedule.hpp"
#include "ctmc/score.hpp"
#include "ctmc/state_space.hpp"

namespace ctmc {

// Kullback-Leibler divergence sum_{p>0} p log(p/q); returns +infinity when q
// misses mass where p has some (a value-level signal, not an error).
double kl(const DensePmf& p, const DensePmf& q);

// Total variation (1/2) sum |p - q|.
double tv(const DensePmf& p, const DensePmf& q);

DensePmf empirical_pmf(const std::vector<State>& samples, const Space& space);
DensePmf empirical_pmf_from_indices(const std::vector<std::int64_t>& samples,
                                    const Space& space);

// tv(q0, forward_marginal(q0, delta)): the target perturbation caused by
// stopping the reverse chain delta early.
double early_stop_tv(const DensePmf& q0, double delta);

enum class RateMode { frozen_per_step, fresh };

struct BoundReport {
  double lhs_kl = 0.0;
  double init_err = 0.0;
  double est_err = 0.0;
  double disc_err = 0.0;
  double rhs_total = 0.0;
  double quad_est = 0.0;
  int quadrature_substeps = 16;
  std::vector<double> step_g_integrals;  // per-step quadrature values
};

// Full error-budget evaluation over one grid (exact mode). In
// frozen_per_step mode the report asserts
//   lhs_kl <= rhs_total + 10 * quad_est (+1e-10 float floor)
// and throws NumericalFailure if the inequality fails; fresh mode skips the
// assertion since fresh rates do not describe the sampler actually run.
BoundReport kl_bound_report(const ScoreProvider& provider, const DensePmf& q0,
                            const TimeGrid& grid, const SamplerConfig& sampler,
                            RateMode mode, int quadrature_substeps = 16);

// Expected score drift between two forward times, aggregated over the
// d*(S-1) per-dimension substitution targets under the later marginal:
//   E_{x ~ q_t} sum_{y: Ham(y,x)=1} | q_t(y)/q_t(x) - q_s(y)/q_s(x) |.
// Grows linearly in S on separated point-mass instances.
double score_time_diff_expected(const DensePmf& q0, double s, double t);

// Uniform-bound counterpart: the worst ratio drift over all Hamming-1 pairs
// charged to every one of the d*S per-dimension targets,
//   d * S * max_{Ham(y,x)=1} | q_t(y)/q_t(x) - q_s(y)/q_s(x) |.
// Grows quadratically in S on the same instances.
double score_time_diff_sup(const DensePmf& q0, double s, double t);

}  // namespace ctmc
