#include "ctmc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ctmc {

namespace {

void check_horizon(double T, double delta) {
  require(std::isfinite(T) && T > 0.0, ErrorCode::invalid_grid,
          "grid horizon T must be positive");
  require(std::isfinite(delta) && delta > 0.0 && delta < T,
          ErrorCode::invalid_grid,
          "early-stop margin delta must lie in (0, T)");
}

void check_monotone(const TimeGrid& grid) {
  require(grid.t.size() >= 2, ErrorCode::invalid_grid, "grid has no steps");
  require(grid.t.front() == 0.0, ErrorCode::invalid_grid,
          "grid must start at 0");
  for (std::size_t k = 0; k + 1 < grid.t.size(); ++k) {
    require(grid.t[k + 1] > grid.t[k], ErrorCode::invalid_grid,
            "grid points must be strictly increasing");
  }
}

}  // namespace

TimeGrid uniform_grid(double T, double delta, std::int64_t N) {
  check_horizon(T, delta);
  require(N >= 1, ErrorCode::invalid_grid,
          "uniform grid needs at least one step");
  TimeGrid grid;
  grid.T = T;
  grid.delta = delta;
  grid.kind = TimeGrid::Kind::uniform;
  grid.t.resize(static_cast<std::size_t>(N + 1));
  double span = T - delta;
  for (std::int64_t k = 0; k <= N; ++k) {
    grid.t[static_cast<std::size_t>(k)] =
        span * static_cast<double>(k) / static_cast<double>(N);
  }
  grid.t.back() = span;  // endpoint exact
  check_monotone(grid);
  return grid;
}

TimeGrid cted_grid(double T, double delta, double kappa) {
  check_horizon(T, delta);
  require(std::isfinite(kappa) && kappa > 0.0 && kappa < 1.0,
          ErrorCode::invalid_grid, "CTED grid needs kappa in (0, 1)");
  TimeGrid grid;
  grid.T = T;
  grid.delta = delta;
  grid.kappa = kappa;
  grid.kind = TimeGrid::Kind::cted;
  grid.t.push_back(0.0);
  const double end = T - delta;
  for (;;) {
    double cur = grid.t.back();
    double next = cur + kappa * std::min(1.0, T - cur);
    if (next >= end - 1e-12) {
      grid.t.push_back(end);  // shortened last step lands exactly on T - delta
      break;
    }
    grid.t.push_back(next);
    require(grid.t.size() < 100000000, ErrorCode::invalid_grid,
            "CTED grid exceeds 1e8 points; check T, delta, kappa");
  }
  check_monotone(grid);
  // Every step, including the shortened last one, obeys the CTED bound. The
  // absolute slack covers two float effects: the landing threshold above may
  // stretch the final step by up to 1e-12, and storing t_k + dt rounds the
  // realized difference by up to an ulp of t_k even when dt is tiny.
  for (std::int64_t k = 0; k < grid.steps(); ++k) {
    double cap = kappa * std::min(1.0, T - grid.t[static_cast<std::size_t>(k)]);
    require(grid.step(k) <= cap + 4e-12, ErrorCode::invalid_grid,
            "CTED step bound violated at step " + std::to_string(k));
  }
  return grid;
}

TimeGrid single_point_grid(double T) {
  require(std::isfinite(T) && T > 0.0, ErrorCode::invalid_grid,
          "grid horizon T must be positive");
  TimeGrid grid;
  grid.T = T;
  grid.delta = T;
  grid.kind = TimeGrid::Kind::degenerate;
  grid.t.push_back(0.0);
  return grid;
}

StepCountScaling step_count_scaling(double T, double delta, double kappa) {
  TimeGrid grid = cted_grid(T, delta, kappa);
  StepCountScaling out;
  out.N = grid.steps();
  out.reference = (T + std::log(1.0 / delta)) / kappa;
  require(static_cast<double>(out.N) <= 3.0 * out.reference,
          ErrorCode::invalid_grid,
          "CTED step count exceeds 3x its analytic reference");
  return out;
}

double step_sum_diagnostic(const TimeGrid& grid) {
  double total = 0.0;
  for (std::int64_t k = 0; k < grid.steps(); ++k) {
    double dt = grid.step(k);
    double tail = grid.T - grid.t[static_cast<std::size_t>(k + 1)];
    double weight = std::max(1.0, 1.0 / (tail * tail));
    total += weight * dt * dt;
  }
  return total;
}

}  // namespace ctmc
