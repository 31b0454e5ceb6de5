// Reverse-time sampling grids on [0, T - delta].
//
// Two constructions: equispaced grids, and the constant-then-exponential-
// decay (CTED) schedule t_{k+1} = t_k + kappa * min{1, T - t_k} whose step
// count scales like kappa^{-1} (T + log(1/delta)). Grids run in reverse time
// t (forward time u = T - t) and stop at T - delta, the early-stopping
// margin that keeps probability ratios bounded.

#pragma once

#include <cstdint>
#include <vector>

#include "ctmc/errors.hpp"

namespace ctmc {

struct TimeGrid {
  enum class Kind { uniform, cted, degenerate };

  double T = 0.0;
  double delta = 0.0;
  double kappa = 0.0;  // CTED only; 0 otherwise
  Kind kind = Kind::uniform;
  std::vector<double> t;  // t[0] = 0 < ... < t[N] = T - delta

  std::int64_t steps() const {
    return static_cast<std::int64_t>(t.size()) - 1;
  }
  double step(std::int64_t k) const {
    return t[static_cast<std::size_t>(k + 1)] - t[static_cast<std::size_t>(k)];
  }
};

// Equispaced grid with N >= 1 steps from 0 to T - delta.
TimeGrid uniform_grid(double T, double delta, std::int64_t N);

// CTED grid: iterate t_{k+1} = t_k + kappa * min{1, T - t_k}; the final step
// is shortened to land exactly on T - delta, preserving the step bound.
TimeGrid cted_grid(double T, double delta, double kappa);

// Degenerate zero-step grid {0} with delta = T; a chain over it returns its
// initial distribution unchanged.
TimeGrid single_point_grid(double T);

struct StepCountScaling {
  std::int64_t N = 0;
  double reference = 0.0;  // kappa^{-1} * (T + log(1/delta))
};

// Step count of the CTED grid together with its analytic reference; the
// construction guarantees N <= 3 * reference, which is re-checked here.
StepCountScaling step_count_scaling(double T, double delta, double kappa);

// The weighted quadratic step sum sum_k max{1, (T - t_{k+1})^{-2}} * dt_k^2
// that controls the discretization budget; for CTED grids it stays below
// 8 * kappa * (T + log(1/delta)).
double step_sum_diagnostic(const TimeGrid& grid);

}  // namespace ctmc
