// Closed-form forward noising process on {0,...,S-1}^d.
//
// The per-token generator is R_base = (1/S)*ones - I with a constant unit
// noise schedule, so the time-t token transition matrix has the two-value
// closed form
//   diag(t)    = (1 + (S-1) e^{-t}) / S,
//   offdiag(t) = (1 - e^{-t}) / S,
// and dimensions propagate independently. This module exposes the kernel,
// factorized marginals, the denoising posterior, exact probability-ratio
// ("concrete score") evaluation with a built-in cross-check between its two
// closed-form derivations, and forward/reverse rate entries.

#pragma once

#include <utility>

#include "ctmc/state_space.hpp"

namespace ctmc {

struct ForwardKernel {
  double t = 0.0;
  int S = 2;
  double diag = 1.0;
  double offdiag = 0.0;

  // Entry K_t(from, to) of the S-by-S token matrix.
  double entry(int from, int to) const { return from == to ? diag : offdiag; }
};

// Token kernel at time t >= 0.
ForwardKernel token_kernel(double t, int S);

// q_t = q_0 * K_t^{tensor d}, computed by per-dimension sweeps in
// O(S^d * d * S) without materializing the joint matrix.
DensePmf forward_marginal(const DensePmf& q0, double t);

// Denoising posterior q_{0|t}(. | x) over clean states.
DensePmf posterior(const DensePmf& q0, double t, const State& x);

// The probability ratio q_t(y)/q_t(x) for a Hamming-1 pair, computed both as
// a direct ratio of forward marginals and as the posterior expectation of
// per-token kernel ratios; the two derivations must agree within 1e-10.
double concrete_score_exact(const DensePmf& q0, double t, const State& y,
                            const State& x);

// The three closed-form values the per-token kernel ratio
// K_t(x0 -> y_tok)/K_t(x0 -> x_tok) can take, by which of x_tok/y_tok
// coincides with the clean token x0.
enum class RatioCase {
  both_differ,  // x0 != x_tok and x0 != y_tok -> 1
  x_matches,    // x0 == x_tok -> (1 - e^{-t}) / (1 + (S-1) e^{-t})
  y_matches,    // x0 == y_tok -> reciprocal of the above
};
double token_ratio_case(double t, int S, RatioCase c);

// Forward generator entry on the joint space: 1/S on Hamming-1 pairs,
// -(S-1)*d/S on the diagonal, 0 otherwise.
double forward_rate(const State& x, const State& y, const Space& space);

// Reverse-process rate entry at forward time u:
//   x != y: forward_rate(y,x) * q_u(y)/q_u(x) on Hamming-1 pairs, 0 for
//           Hamming >= 2;  x == y: negative sum of the off-diagonal row.
double reverse_rate_exact(const DensePmf& q0, double u, const State& x,
                          const State& y);

// (sup over Hamming-1 pairs of q_u(y)/q_u(x), closed-form bound
// 1 + S/(e^u - 1)); throws NumericalFailure if the measured sup ever exceeds
// the bound, which closed-form analysis rules out.
std::pair<double, double> score_sup_bound_check(const DensePmf& q0, double u);

}  // namespace ctmc
