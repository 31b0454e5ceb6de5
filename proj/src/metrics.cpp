#include "ctmc/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ctmc/forward.hpp"

namespace ctmc {

namespace {

void check_same_space(const DensePmf& p, const DensePmf& q) {
  require(p.space.S() == q.space.S() && p.space.d() == q.space.d(),
          ErrorCode::invalid_input, "pmfs live on different spaces");
  require(p.p.size() == q.p.size(), ErrorCode::invalid_input,
          "pmfs have different lengths");
}

// Expected Bregman gap E_{x ~ q-bar(t_node)}[g(x)] between the true reverse
// rates at the node and the accessor rates in `hat` (a frozen or fresh score
// table paired with its own time).
double expected_bregman_gap(const DensePmf& q0, double T, double t_node,
                            const ScoreTable& hat) {
  const Space& space = q0.space;
  const int S = space.S();
  DensePmf qu = forward_marginal(q0, T - t_node);

  double total = 0.0;
  for (std::int64_t xi = 0; xi < space.size(); ++xi) {
    double weight = qu.p[static_cast<std::size_t>(xi)];
    if (weight == 0.0) continue;
    double qx = qu.p[static_cast<std::size_t>(xi)];
    double g = 0.0;
    for (int dim = 0; dim < space.d(); ++dim) {
      int x_tok = token_at(xi, dim, space);
      for (int a = 0; a < S; ++a) {
        if (a == x_tok) continue;
        std::int64_t yi = substitute_index(xi, dim, x_tok, a, space);
        double truth =
            qu.p[static_cast<std::size_t>(yi)] / qx / static_cast<double>(S);
        double rate = hat.value(xi, dim, a) / static_cast<double>(S);
        require(rate > 0.0, ErrorCode::invalid_rate,
                "sampler rate must be positive where the true rate is");
        g += rate - truth + truth * std::log(truth / rate);
      }
    }
    total += weight * g;
  }
  return total;
}

// Composite midpoint quadrature of the expected Bregman gap over one step.
double quadrature_step(const DensePmf& q0, double T, double t_k, double dt,
                       int m, RateMode mode, const ScoreProvider& provider,
                       const ScoreTable& frozen) {
  double sum = 0.0;
  for (int j = 0; j < m; ++j) {
    double t_node = t_k + (j + 0.5) * dt / m;
    if (mode == RateMode::frozen_per_step) {
      sum += expected_bregman_gap(q0, T, t_node, frozen);
    } else {
      ScoreTable fresh = provider.table(T - t_node);
      sum += expected_bregman_gap(q0, T, t_node, fresh);
    }
  }
  return sum * dt / m;
}

}  // namespace

double kl(const DensePmf& p, const DensePmf& q) {
  check_same_space(p, q);
  double total = 0.0;
  for (std::size_t i = 0; i < p.p.size(); ++i) {
    if (p.p[i] == 0.0) continue;
    if (q.p[i] == 0.0) return std::numeric_limits<double>::infinity();
    total += p.p[i] * std::log(p.p[i] / q.p[i]);
  }
  return total;
}

double tv(const DensePmf& p, const DensePmf& q) {
  check_same_space(p, q);
  double total = 0.0;
  for (std::size_t i = 0; i < p.p.size(); ++i) {
    total += std::abs(p.p[i] - q.p[i]);
  }
  return 0.5 * total;
}

DensePmf empirical_pmf(const std::vector<State>& samples, const Space& space) {
  require(!samples.empty(), ErrorCode::invalid_input,
          "empirical pmf needs at least one sample");
  std::vector<std::int64_t> indices;
  indices.reserve(samples.size());
  for (const State& s : samples) indices.push_back(encode(s, space));
  return empirical_pmf_from_indices(indices, space);
}

DensePmf empirical_pmf_from_indices(const std::vector<std::int64_t>& samples,
                                    const Space& space) {
  require_exact_mode(space);
  require(!samples.empty(), ErrorCode::invalid_input,
          "empirical pmf needs at least one sample");
  std::vector<double> mass(static_cast<std::size_t>(space.size()), 0.0);
  for (std::int64_t idx : samples) {
    require(idx >= 0 && idx < space.size(), ErrorCode::invalid_state,
            "sample index outside the space");
    mass[static_cast<std::size_t>(idx)] += 1.0;
  }
  for (auto& v : mass) v /= static_cast<double>(samples.size());
  return DensePmf{space, std::move(mass)};
}

double early_stop_tv(const DensePmf& q0, double delta) {
  require(delta >= 0.0 && std::isfinite(delta), ErrorCode::invalid_time,
          "early-stop margin must be non-negative");
  if (delta == 0.0) return 0.0;
  return tv(q0, forward_marginal(q0, delta));
}

BoundReport kl_bound_report(const ScoreProvider& provider, const DensePmf& q0,
                            const TimeGrid& grid, const SamplerConfig& sampler,
                            RateMode mode, int quadrature_substeps) {
  require_exact_mode(q0.space);
  require(sampler.kind == SamplerKind::tau_leaping ||
              sampler.kind == SamplerKind::truncated,
          ErrorCode::invalid_spec,
          "the KL budget report needs a sampler with a path-wise "
          "piecewise-constant rate (tau-leaping or truncated)");
  require(quadrature_substeps >= 1, ErrorCode::invalid_spec,
          "quadrature needs at least one substep");

  const double T = grid.T;
  BoundReport report;
  report.quadrature_substeps = quadrature_substeps;

  // Left-hand side: exact chain composition against the early-stopped target.
  ExactChainResult chain =
      run_chain_exact(sampler, q0.space, grid, provider);
  DensePmf target = forward_marginal(q0, grid.delta);
  report.lhs_kl = kl(target, chain.p_final);

  // Initialization error: the noised data law at the horizon vs uniform.
  report.init_err = kl(forward_marginal(q0, T), DensePmf::uniform(q0.space));

  // Estimation error: grid-weighted score-entropy loss.
  report.est_err = eps_score(provider, q0, grid);

  // Discretization error: quadrature of the expected Bregman gap under the
  // per-step frozen (or fresh) rates, minus the estimation part.
  double integral_m = 0.0;
  double quad = 0.0;
  for (std::int64_t k = 0; k < grid.steps(); ++k) {
    double t_k = grid.t[static_cast<std::size_t>(k)];
    double dt = grid.step(k);
    ScoreTable frozen = provider.table(T - t_k);
    double coarse = quadrature_step(q0, T, t_k, dt, quadrature_substeps, mode,
                                    provider, frozen);
    double fine = quadrature_step(q0, T, t_k, dt, 2 * quadrature_substeps,
                                  mode, provider, frozen);
    integral_m += coarse;
    quad += std::abs(coarse - fine);
    report.step_g_integrals.push_back(coarse);
  }
  report.disc_err = integral_m - report.est_err;
  report.quad_est = quad;
  report.rhs_total = report.init_err + report.est_err + report.disc_err;

  if (mode == RateMode::frozen_per_step) {
    // The 1e-10 floor absorbs float noise on degenerate fixed-point
    // instances where every term is ~0.
    require(report.lhs_kl <=
                report.rhs_total + 10.0 * report.quad_est + 1e-10,
            ErrorCode::numerical_failure,
            "measured KL " + std::to_string(report.lhs_kl) +
                " exceeds its error budget " +
                std::to_string(report.rhs_total) +
                " beyond the quadrature tolerance");
  }
  return report;
}

double score_time_diff_expected(const DensePmf& q0, double s, double t) {
  require_exact_mode(q0.space);
  require(0.0 < s && s <= t && std::isfinite(t), ErrorCode::invalid_time,
          "score drift needs forward times 0 < s <= t");
  const Space& space = q0.space;
  DensePmf qs = forward_marginal(q0, s);
  DensePmf qt = forward_marginal(q0, t);

  double total = 0.0;
  for (std::int64_t xi = 0; xi < space.size(); ++xi) {
    double weight = qt.p[static_cast<std::size_t>(xi)];
    if (weight == 0.0) continue;
    double qtx = qt.p[static_cast<std::size_t>(xi)];
    double qsx = qs.p[static_cast<std::size_t>(xi)];
    double inner = 0.0;
    for (int dim = 0; dim < space.d(); ++dim) {
      int x_tok = token_at(xi, dim, space);
      for (int a = 0; a < space.S(); ++a) {
        if (a == x_tok) continue;
        std::int64_t yi = substitute_index(xi, dim, x_tok, a, space);
        inner += std::abs(qt.p[static_cast<std::size_t>(yi)] / qtx -
                          qs.p[static_cast<std::size_t>(yi)] / qsx);
      }
    }
    total += weight * inner;
  }
  return total;
}

double score_time_diff_sup(const DensePmf& q0, double s, double t) {
  require_exact_mode(q0.space);
  require(0.0 < s && s <= t && std::isfinite(t), ErrorCode::invalid_time,
          "score drift needs forward times 0 < s <= t");
  const Space& space = q0.space;
  DensePmf qs = forward_marginal(q0, s);
  DensePmf qt = forward_marginal(q0, t);

  double worst = 0.0;
  for (std::int64_t xi = 0; xi < space.size(); ++xi) {
    double qtx = qt.p[static_cast<std::size_t>(xi)];
    double qsx = qs.p[static_cast<std::size_t>(xi)];
    for (int dim = 0; dim < space.d(); ++dim) {
      int x_tok = token_at(xi, dim, space);
      for (int a = 0; a < space.S(); ++a) {
        if (a == x_tok) continue;
        std::int64_t yi = substitute_index(xi, dim, x_tok, a, space);
        double diff = std::abs(qt.p[static_cast<std::size_t>(yi)] / qtx -
                               qs.p[static_cast<std::size_t>(yi)] / qsx);
        if (diff > worst) worst = diff;
      }
    }
  }
  return worst * static_cast<double>(space.d()) *
         static_cast<double>(space.S());
}

}  // namespace ctmc
