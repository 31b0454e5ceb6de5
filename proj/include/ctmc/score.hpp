// Score providers and score-quality functionals.
//
// A ScoreProvider returns the probability ratio s_u(y, x) ~ q_u(y)/q_u(x)
// for Hamming-1 pairs at forward time u. The exact provider evaluates the
// closed-form ratio from a known data distribution q0; perturbed providers
// multiply the base value by a constant or by a deterministic lognormal
// factor keyed on (seed, u, x, y), modeling an imperfect learned score with
// a controllable error. Clipping into [1/M, M] is applied after the
// perturbation. Providers are immutable value types, safe to share across
// threads.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ctmc/forward.hpp"
#include "ctmc/schedule.hpp"
#include "ctmc/state_space.hpp"

namespace ctmc {

struct PerturbationSpec {
  enum class Kind { none, multiplicative, lognormal };
  Kind kind = Kind::none;
  double c = 1.0;          // multiplicative factor
  double sigma = 0.0;      // lognormal spread
  std::uint64_t seed = 0;  // lognormal keying

  void validate() const;
};

// Dense snapshot of all Hamming-1 scores at one forward time u:
// value(x_index, dim, token) = s_u(x with dim set to token, x); the self
// entry (token == x^dim) is 1 by convention.
struct ScoreTable {
  double u = 0.0;
  int S = 2;
  int d = 1;
  std::int64_t n = 0;
  std::vector<double> v;  // layout [x_index][dim][token]

  double value(std::int64_t x_index, int dim, int token) const {
    return v[static_cast<std::size_t>((x_index * d + dim) * S + token)];
  }
};

class ScoreProvider {
 public:
  // Exact ratios from q0, clipped into [1/M, M]; M defaults to the
  // unclipped +infinity sentinel.
  static ScoreProvider exact(
      DensePmf q0, double M = std::numeric_limits<double>::infinity());

  // This provider with a perturbation layered on top (clipping still applies
  // last, with this provider's M).
  ScoreProvider perturbed(const PerturbationSpec& spec) const;

  // Single evaluation through the cross-validated closed-form path.
  // Requires hamming(x, y) == 1 and u > 0.
  double evaluate(double u, const State& x, const State& y) const;

  // Bulk snapshot of every Hamming-1 score at forward time u (exact mode).
  // Identical values to evaluate(), computed via one marginal sweep.
  ScoreTable table(double u) const;

  const DensePmf& q0() const { return q0_; }
  double clip_bound() const { return M_; }
  bool is_exact() const {
    return spec_.kind == PerturbationSpec::Kind::none;
  }
  std::string tag() const;

 private:
  ScoreProvider(DensePmf q0, double M, PerturbationSpec spec);

  double finalize(double base, double u, std::int64_t x_index,
                  std::int64_t y_index) const;

  DensePmf q0_;
  double M_;
  PerturbationSpec spec_;
};

// Exact expectation of the score-entropy objective at forward time u:
//   sum_x q_u(x) sum_{y: Ham(y,x)=1} (1/S) * (s - r - r * log(s/r)),
// where r is the true ratio and s the provider's value. Zero exactly when
// the provider returns the true ratios.
double score_entropy_loss(const ScoreProvider& provider, const DensePmf& q0,
                          double u);

// Left-endpoint accumulation of the loss over a reverse grid:
//   sum_k (t_{k+1} - t_k) * L(T - t_k).
double eps_score(const ScoreProvider& provider, const DensePmf& q0,
                 const TimeGrid& grid);

// Bregman divergence between the true reverse rates at reverse time t
// (forward time T - t, derived from q0) and the sampler's rate accessor:
//   g_t(x) = sum_{y: Ham(y,x)=1} [ H(y) - R(y) + R(y) * log(R(y)/H(y)) ].
// Always >= 0; InvalidRate if the accessor is non-positive where R > 0.
double bregman_g(const DensePmf& q0, double t, double T, const State& x,
                 const std::function<double(const State&)>& sampler_rate);

}  // namespace ctmc
