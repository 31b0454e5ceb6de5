// Acceptance battery for the sampling laboratory. Each numbered check prints
// one [PASS]/[FAIL] line with the measured quantity and its tolerance; the
// process exit code is the number of failed checks. The checks exercise the
// public library surface end to end with pinned seeds, so a run is
// reproducible byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ctmc/errors.hpp"
#include "ctmc/forward.hpp"
#include "ctmc/linalg.hpp"
#include "ctmc/metrics.hpp"
#include "ctmc/rng.hpp"
#include "ctmc/samplers.hpp"
#include "ctmc/schedule.hpp"
#include "ctmc/score.hpp"
#include "ctmc/state_space.hpp"

using namespace ctmc;

namespace {

int g_failures = 0;

std::string fm(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void report(int idx, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] %02d %s: %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::vector<double> base_generator(int S) {
  std::vector<double> r(static_cast<std::size_t>(S) * S, 1.0 / S);
  for (int i = 0; i < S; ++i)
    r[static_cast<std::size_t>(i) * S + i] = 1.0 / S - 1.0;
  return r;
}

DensePmf dirichlet_pmf(const Space& space, std::uint64_t seed,
                       double alpha = 1.0) {
  rng::Stream stream(seed);
  return DensePmf::from_vector(
      space, stream.dirichlet(alpha, static_cast<int>(space.size())));
}

// A randomized small instance: space, data distribution, and a Hamming-1
// pair, drawn from a caller-owned stream.
struct Instance {
  Space space;
  DensePmf q0;
  State x;
  State y;
  int dim = 0;
};

Instance random_instance(rng::Stream& rnd, std::int64_t max_states) {
  int S = 0;
  int d = 0;
  double states = 0.0;
  do {
    S = 2 + static_cast<int>(rnd.uniform_index(5));  // 2..6
    d = 1 + static_cast<int>(rnd.uniform_index(4));  // 1..4
    states = std::pow(static_cast<double>(S), d);
  } while (states > static_cast<double>(max_states));
  Space space(S, d);
  DensePmf q0 = DensePmf::uniform(space);
  switch (rnd.uniform_index(3)) {
    case 0:
      q0 = DensePmf::point_mass(space, rnd.uniform_index(space.size()));
      break;
    case 1:
      q0 = dirichlet_pmf(space, 1000 + rnd.uniform_index(1 << 20), 0.6);
      break;
    default:
      q0 = dirichlet_pmf(space, 2000 + rnd.uniform_index(1 << 20), 1.5);
      break;
  }
  State x = decode(rnd.uniform_index(space.size()), space);
  int dim = static_cast<int>(rnd.uniform_index(d));
  int cur = x[static_cast<std::size_t>(dim)];
  int tok = static_cast<int>(rnd.uniform_index(S - 1));
  if (tok >= cur) ++tok;
  State y = substitute(x, dim, tok, space);
  return Instance{space, std::move(q0), std::move(x), std::move(y), dim};
}

// -- 01: per-token kernel against a dense matrix exponential ----------------

void check_01() {
  double worst = 0.0;
  for (int S : {2, 3, 4, 8, 10}) {
    std::vector<double> gen = base_generator(S);
    for (double t : {0.01, 0.1, 1.0, 5.0}) {
      std::vector<double> scaled(gen.size());
      for (std::size_t i = 0; i < gen.size(); ++i) scaled[i] = t * gen[i];
      std::vector<double> em = expm_dense(scaled, S);
      ForwardKernel k = token_kernel(t, S);
      for (int i = 0; i < S; ++i)
        for (int j = 0; j < S; ++j)
          worst = std::max(
              worst, std::abs(em[static_cast<std::size_t>(i) * S + j] -
                              k.entry(i, j)));
    }
  }
  double worst_semi = 0.0;
  const std::vector<std::pair<double, double>> legs = {
      {0.1, 0.3}, {0.7, 1.9}, {2.0, 0.05}};
  for (int S : {2, 4, 7}) {
    for (auto [s, t] : legs) {
      ForwardKernel ks = token_kernel(s, S);
      ForwardKernel kt = token_kernel(t, S);
      ForwardKernel kst = token_kernel(s + t, S);
      double diag = ks.diag * kt.diag + (S - 1) * ks.offdiag * kt.offdiag;
      double off = ks.diag * kt.offdiag + ks.offdiag * kt.diag +
                   (S - 2) * ks.offdiag * kt.offdiag;
      worst_semi = std::max(worst_semi, std::abs(diag - kst.diag));
      worst_semi = std::max(worst_semi, std::abs(off - kst.offdiag));
    }
  }
  bool pass = worst <= 1e-10 && worst_semi <= 1e-12;
  report(1, "token kernel equals its matrix exponential", pass,
         "max |closed form - expm| = " + fm(worst) +
             " (tol 1e-10); max semigroup defect = " + fm(worst_semi) +
             " (tol 1e-12)");
}

// -- 02: probability-ratio agreement along two independent routes -----------

void check_02() {
  rng::Stream rnd(20260815);
  double worst = 0.0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    Instance inst = random_instance(rnd, 256);
    const Space& space = inst.space;
    double t = 0.05 + 2.95 * rnd.uniform01();

    // Route one: the library's closed-form ratio (internally cross-checked).
    double a = concrete_score_exact(inst.q0, t, inst.y, inst.x);

    // Route two: posterior expectation of per-token kernel ratios.
    DensePmf post = posterior(inst.q0, t, inst.x);
    ForwardKernel k = token_kernel(t, space.S());
    int yd = inst.y[static_cast<std::size_t>(inst.dim)];
    int xd = inst.x[static_cast<std::size_t>(inst.dim)];
    double b = 0.0;
    for (std::int64_t x0 = 0; x0 < space.size(); ++x0) {
      int x0d = token_at(x0, inst.dim, space);
      b += post.p[static_cast<std::size_t>(x0)] * k.entry(x0d, yd) /
           k.entry(x0d, xd);
    }
    worst = std::max(worst,
                     std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
  }
  report(2, "probability ratios agree along two derivations", worst <= 1e-10,
         std::to_string(reps) + " randomized instances, max relative gap = " +
             fm(worst) + " (tol 1e-10)");
}

// -- 03: uniform ratio bound, with its point-mass equality case -------------

void check_03() {
  rng::Stream rnd(31);
  double worst_excess = 0.0;   // sup - bound, should stay <= ~0
  double worst_cap = 0.0;      // bound / (2 S max(1, 1/u)), should stay <= 1
  for (int rep = 0; rep < 200; ++rep) {
    Instance inst = random_instance(rnd, 256);
    double u = 0.05 + 2.95 * rnd.uniform01();
    auto [sup, bound] = score_sup_bound_check(inst.q0, u);
    worst_excess = std::max(worst_excess, (sup - bound) / bound);
    double cap = 2.0 * inst.space.S() * std::max(1.0, 1.0 / u);
    worst_cap = std::max(worst_cap, bound / cap);
  }
  double worst_eq = 0.0;  // the bound is attained by a separated point mass
  for (int S : {2, 3, 4}) {
    Space space(S, 1);
    DensePmf pm = DensePmf::point_mass(space, 0);
    for (double u : {0.4, 1.0}) {
      auto [sup, bound] = score_sup_bound_check(pm, u);
      worst_eq = std::max(worst_eq, std::abs(sup - bound) / bound);
    }
  }
  bool pass = worst_excess <= 1e-12 && worst_cap <= 1.0 + 1e-12 &&
              worst_eq <= 1e-12;
  report(3, "ratio sup bound holds and is tight on point masses", pass,
         "max relative excess = " + fm(worst_excess) +
             ", max bound/cap = " + fm(worst_cap) +
             ", point-mass equality gap = " + fm(worst_eq) + " (tol 1e-12)");
}

// -- 04: expected rate mismatch equals the score-entropy loss ---------------

void check_04() {
  double worst = 0.0;
  int count = 0;
  double T = 2.0;
  PerturbationSpec half;
  half.kind = PerturbationSpec::Kind::multiplicative;
  half.c = 0.5;
  PerturbationSpec twice = half;
  twice.c = 2.0;

  const std::vector<std::pair<int, int>> shapes = {{2, 1}, {2, 2}, {3, 2},
                                                   {4, 2}};
  for (auto [S, d] : shapes) {
    Space space(S, d);
    for (int which_q0 = 0; which_q0 < 2; ++which_q0) {
      DensePmf q0 = which_q0 == 0
                        ? DensePmf::point_mass(space, 0)
                        : dirichlet_pmf(space, 90 + S * 10 + d, 1.1);
      ScoreProvider exact = ScoreProvider::exact(q0);
      for (const ScoreProvider& p :
           {exact, exact.perturbed(half), exact.perturbed(twice)}) {
        for (double t : {0.6, 1.4}) {
          double u = T - t;
          DensePmf qu = forward_marginal(q0, u);
          double expected_g = 0.0;
          for (std::int64_t xi = 0; xi < space.size(); ++xi) {
            State x = decode(xi, space);
            auto rate = [&](const State& y) {
              return estimated_rate(p, t, T, x, y);
            };
            expected_g += qu.p[static_cast<std::size_t>(xi)] *
                          bregman_g(q0, t, T, x, rate);
          }
          double loss = score_entropy_loss(p, q0, u);
          worst = std::max(worst, std::abs(expected_g - loss) /
                                      std::max(1.0, std::abs(loss)));
          ++count;
        }
      }
    }
  }
  report(4, "expected rate-mismatch divergence equals the entropy loss",
         worst <= 1e-12,
         std::to_string(count) + " provider/time/data combinations, max " +
             "relative gap = " + fm(worst) + " (tol 1e-12)");
}

// -- 05: the KL error budget dominates the realized divergence --------------

void check_05() {
  rng::Stream rnd(555);
  int violations = 0;
  int ran = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 20; ++rep) {
    int S = 2 + static_cast<int>(rnd.uniform_index(3));  // 2..4
    int d = 1 + static_cast<int>(rnd.uniform_index(2));  // 1..2
    Space space(S, d);
    DensePmf q0 = rep % 2 == 0
                      ? DensePmf::point_mass(space, rnd.uniform_index(space.size()))
                      : dirichlet_pmf(space, 7000 + rep, 0.9);
    ScoreProvider provider = ScoreProvider::exact(q0);
    switch (rep % 3) {
      case 0:
        break;  // exact scores
      case 1: {
        PerturbationSpec spec;
        spec.kind = PerturbationSpec::Kind::multiplicative;
        spec.c = 0.7 + 0.7 * rnd.uniform01();
        provider = provider.perturbed(spec);
        break;
      }
      default: {
        PerturbationSpec spec;
        spec.kind = PerturbationSpec::Kind::lognormal;
        spec.sigma = 0.3 * rnd.uniform01();
        spec.seed = 40 + static_cast<std::uint64_t>(rep);
        provider = provider.perturbed(spec);
        break;
      }
    }
    SamplerConfig sampler;
    sampler.kind =
        rep % 2 == 0 ? SamplerKind::truncated : SamplerKind::tau_leaping;
    double kappa = 0.08 + 0.22 * rnd.uniform01();
    double T = 1.5 + 1.5 * rnd.uniform01();
    double delta = 0.005 + 0.015 * rnd.uniform01();
    TimeGrid grid = cted_grid(T, delta, kappa);
    try {
      BoundReport r = kl_bound_report(provider, q0, grid, sampler,
                                      RateMode::frozen_per_step, 16);
      double slack = r.rhs_total + 10.0 * r.quad_est - r.lhs_kl;
      min_slack = std::min(min_slack, slack);
      if (slack < -1e-10) ++violations;
    } catch (const Error&) {
      ++violations;  // the report itself enforces the inequality
    }
    ++ran;
  }
  report(5, "KL error budget dominates the realized divergence",
         violations == 0,
         std::to_string(ran) + " randomized runs, violations = " +
             std::to_string(violations) + ", min slack = " + fm(min_slack));
}

// -- 06: per-step kernels contract toward each other as steps halve ---------

double kernel_gap(const std::vector<double>& num,
                  const std::vector<double>& den) {
  double worst = 0.0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (den[i] <= 0.0) continue;
    worst = std::max(worst, std::abs(num[i] / den[i] - 1.0));
  }
  return worst;
}

void check_06() {
  rng::Stream rnd(606);
  int checks = 0;
  int violations = 0;
  double T = 3.0;
  for (int rep = 0; rep < 50; ++rep) {
    int S = 2 + static_cast<int>(rnd.uniform_index(3));
    int d = 1 + static_cast<int>(rnd.uniform_index(2));
    Space space(S, d);
    DensePmf q0 = dirichlet_pmf(space, 8800 + rep, 1.0);
    ScoreProvider provider = ScoreProvider::exact(q0, 20.0);
    if (rep % 2 == 1) {
      PerturbationSpec spec;
      spec.kind = PerturbationSpec::Kind::lognormal;
      spec.sigma = 0.3 * rnd.uniform01();
      spec.seed = 100 + static_cast<std::uint64_t>(rep);
      provider = provider.perturbed(spec);
    }
    double u = 0.5 + 2.0 * rnd.uniform01();
    double t_k = T - u;
    State x = decode(rnd.uniform_index(space.size()), space);

    SamplerConfig trunc, euler, tweedie;
    trunc.kind = SamplerKind::truncated;
    euler.kind = SamplerKind::euler;
    tweedie.kind = SamplerKind::tweedie;

    std::vector<double> gaps_te, gaps_tw;
    bool usable = true;
    for (double dt : {0.01, 0.005, 0.0025, 0.00125}) {
      try {
        std::vector<double> r_tr =
            sampler_step_kernel(trunc, space, x, t_k, t_k + dt, T, provider);
        std::vector<double> r_eu =
            sampler_step_kernel(euler, space, x, t_k, t_k + dt, T, provider);
        std::vector<double> r_tw =
            sampler_step_kernel(tweedie, space, x, t_k, t_k + dt, T, provider);
        gaps_te.push_back(kernel_gap(r_tr, r_eu));
        gaps_tw.push_back(kernel_gap(r_tr, r_tw));
      } catch (const Error&) {
        // A kernel that does not exist at this width (negative denoising
        // mass under a strongly perturbed score) is outside the claim; the
        // comparison needs all three rows.
        usable = false;
        break;
      }
    }
    if (!usable) continue;
    for (const std::vector<double>& gaps : {gaps_te, gaps_tw}) {
      for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
        if (gaps[i] >= 0.1 || gaps[i] <= 1e-15) continue;
        ++checks;
        if (gaps[i + 1] > 0.75 * gaps[i]) ++violations;
      }
    }
  }
  report(6, "sampler kernels contract together as steps halve",
         violations == 0 && checks > 0,
         std::to_string(checks) + " halving comparisons, violations = " +
             std::to_string(violations) +
             " (need gap(dt/2) <= 0.75 * gap(dt) once gap < 0.1)");
}

// -- 07: scaling of the discretization budget in the step-scale parameter ---

void check_07() {
  Space space(3, 2);
  DensePmf q0 = DensePmf::point_mass(space, 4);
  ScoreProvider provider = ScoreProvider::exact(q0);
  SamplerConfig sampler;
  sampler.kind = SamplerKind::truncated;
  double T = 4.0;
  double delta = 1e-3;

  std::vector<double> kappas = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> discs;
  for (double kappa : kappas) {
    TimeGrid grid = cted_grid(T, delta, kappa);
    BoundReport r = kl_bound_report(provider, q0, grid, sampler,
                                    RateMode::frozen_per_step, 16);
    discs.push_back(r.disc_err);
  }
  FitResult fit = fit_slope(kappas, discs);
  bool pass = fit.slope >= 0.8 && fit.slope <= 1.2;
  report(7, "discretization budget scales with the first power of the step "
            "scale", pass,
         "measured log-log slope = " + fm(fit.slope) + " (window [0.8, 1.2], "
             "r^2 = " + fm(fit.r2) + ")");
  if (!pass) {
    std::printf(
        "       note: with exact step-start rates the rate-mismatch "
        "divergence vanishes to second\n"
        "       order inside each step (g(t_k + s) ~ C s^2), so a step of "
        "width ~kappa contributes\n"
        "       ~kappa^3 and the ~1/kappa steps sum to ~kappa^2. The measured "
        "slope ~2 is the\n"
        "       structural consequence; a first-power slope would need a "
        "mismatch that is O(1) at\n"
        "       the step start, which this exact-score configuration cannot "
        "produce.\n");
  }
}

// -- 08: growth of the score drift in the alphabet size ---------------------

void check_08() {
  std::vector<double> sizes, expected, sup;
  for (int S : {2, 4, 8}) {
    Space space(S, 1);
    DensePmf pm = DensePmf::point_mass(space, 0);
    sizes.push_back(static_cast<double>(S));
    expected.push_back(score_time_diff_expected(pm, 0.5, 0.55));
    sup.push_back(score_time_diff_sup(pm, 0.5, 0.55));
  }
  FitResult fe = fit_slope(sizes, expected);
  FitResult fs = fit_slope(sizes, sup);
  bool pass = fe.slope >= 0.7 && fe.slope <= 1.3 && fs.slope >= 1.7 &&
              fs.slope <= 2.3;
  report(8, "score drift grows linearly (mean) and quadratically (worst case)",
         pass,
         "expected-drift slope = " + fm(fe.slope) +
             " (window [0.7, 1.3]), sup-drift slope = " + fm(fs.slope) +
             " (window [1.7, 2.3])");
}

// -- 09: early-stop perturbation halves with the margin and stays <= 2 d "
//        delta ---------------------------------------------------------------

void check_09() {
  int bad_ratio = 0;
  int bad_cap = 0;
  int instances = 0;
  double worst_ratio_err = 0.0;
  std::vector<std::pair<Space, DensePmf>> cases;
  const std::vector<std::pair<int, int>> shapes = {{2, 1}, {2, 3}, {4, 2},
                                                   {4, 3}};
  for (auto [S, d] : shapes) {
    Space space(S, d);
    cases.emplace_back(space, DensePmf::point_mass(space, 0));
  }
  {
    Space space(3, 2);
    cases.emplace_back(space, dirichlet_pmf(space, 99, 0.8));
    Space space2(2, 2);
    cases.emplace_back(space2, dirichlet_pmf(space2, 77, 1.5));
  }
  for (const auto& [space, q0] : cases) {
    std::vector<double> deltas = {0.02, 0.01, 0.005};
    std::vector<double> tvs;
    for (double delta : deltas) {
      double v = early_stop_tv(q0, delta);
      tvs.push_back(v);
      if (v > 2.0 * space.d() * delta) ++bad_cap;
    }
    for (std::size_t i = 0; i + 1 < tvs.size(); ++i) {
      double ratio = tvs[i] / tvs[i + 1];
      worst_ratio_err = std::max(worst_ratio_err, std::abs(ratio - 2.0));
      if (ratio < 1.8 || ratio > 2.2) ++bad_ratio;
    }
    ++instances;
  }
  report(9, "early-stop perturbation is linear in the margin",
         bad_ratio == 0 && bad_cap == 0,
         std::to_string(instances) + " instances; halving ratios within 2 +/- " +
             fm(worst_ratio_err) + " (window [1.8, 2.2]); cap tv <= 2 d "
             "delta violated " + std::to_string(bad_cap) + " times");
}

// -- 10: Monte-Carlo steps reproduce their exact kernel rows ----------------

void check_10() {
  rng::Stream rnd(1010);
  const std::vector<std::pair<int, int>> shapes = {
      {2, 2}, {2, 3}, {2, 6}, {3, 2}, {3, 3}, {4, 2}, {4, 3}, {5, 2}, {8, 2}};
  double worst_margin = 0.0;  // tv / bound, want < 1
  int bad = 0;
  const std::int64_t n = 100000;
  double T = 3.0;
  for (SamplerKind kind :
       {SamplerKind::tau_leaping, SamplerKind::euler, SamplerKind::tweedie,
        SamplerKind::truncated, SamplerKind::kolmogorov_ref}) {
    for (int rep = 0; rep < 10; ++rep) {
      auto [S, d] = shapes[static_cast<std::size_t>(
          rnd.uniform_index(static_cast<std::int64_t>(shapes.size())))];
      Space space(S, d);
      DensePmf q0 = dirichlet_pmf(space, 4400 + rep, 1.0);
      ScoreProvider provider = ScoreProvider::exact(q0, 20.0);
      double u = 0.5 + 1.5 * rnd.uniform01();
      double t_k = T - u;
      double dt = 0.005 + 0.015 * rnd.uniform01();
      State x = decode(rnd.uniform_index(space.size()), space);

      SamplerConfig config;
      config.kind = kind;
      std::vector<double> row =
          sampler_step_kernel(config, space, x, t_k, t_k + dt, T, provider);
      ScoreTable table = provider.table(u);
      StepKernel ref;
      const StepKernel* ref_ptr = nullptr;
      if (kind == SamplerKind::kolmogorov_ref) {
        ref = kolmogorov_reference_step_kernel(space, t_k, t_k + dt, T,
                                               provider);
        ref_ptr = &ref;
      }
      std::vector<double> freq(static_cast<std::size_t>(space.size()), 0.0);
      std::uint64_t seed = 5000 + static_cast<std::uint64_t>(rep) +
                           1000 * static_cast<std::uint64_t>(kind);
      for (std::int64_t i = 0; i < n; ++i) {
        rng::Stream stream =
            rng::Stream::for_trajectory(seed, static_cast<std::uint64_t>(i));
        State y = sampler_mc_step(config, space, x, dt, table, stream, ref_ptr);
        freq[static_cast<std::size_t>(encode(y, space))] += 1.0;
      }
      double tv_dist = 0.0;
      for (std::size_t i = 0; i < freq.size(); ++i)
        tv_dist += std::abs(freq[i] / static_cast<double>(n) - row[i]);
      tv_dist *= 0.5;
      double bound = 5.0 * std::sqrt(static_cast<double>(space.size()) /
                                     static_cast<double>(n));
      worst_margin = std::max(worst_margin, tv_dist / bound);
      if (tv_dist > bound) ++bad;
    }
  }
  report(10, "Monte-Carlo steps match their exact kernel rows", bad == 0,
         "50 sampler/instance points at 1e5 draws; max tv/bound = " +
             fm(worst_margin) + " (bound 5 sqrt(states/n)); violations = " +
             std::to_string(bad));
}

// -- 11: every sampler holds the uniform fixed point ------------------------

void check_11() {
  std::vector<TimeGrid> grids = {cted_grid(2.0, 0.01, 0.15),
                                 uniform_grid(2.0, 0.01, 12)};
  double worst = 0.0;
  int bad = 0;
  auto run_one = [&](SamplerKind kind, TauPolicy policy, int S, int d) {
    Space space(S, d);
    ScoreProvider provider = ScoreProvider::exact(DensePmf::uniform(space));
    SamplerConfig config;
    config.kind = kind;
    config.policy = policy;
    for (const TimeGrid& grid : grids) {
      double v = kl(DensePmf::uniform(space),
                    run_chain_exact(config, space, grid, provider).p_final);
      worst = std::max(worst, v);
      if (v > 1e-10) ++bad;
    }
  };
  // Jump-count clamping/freezing is only symmetric on the binary alphabet,
  // so the tau-leaping rows are doubly stochastic there and only there.
  run_one(SamplerKind::tau_leaping, TauPolicy::clamp, 2, 3);
  run_one(SamplerKind::tau_leaping, TauPolicy::freeze, 2, 3);
  for (SamplerKind kind : {SamplerKind::euler, SamplerKind::tweedie,
                           SamplerKind::truncated,
                           SamplerKind::kolmogorov_ref}) {
    run_one(kind, TauPolicy::clamp, 2, 3);
    run_one(kind, TauPolicy::clamp, 3, 2);
  }
  report(11, "uniform data is a fixed point of every sampler", bad == 0,
         "20 sampler/grid combinations (tau-leaping restricted to the binary "
         "alphabet); max KL = " + fm(worst) + " (tol 1e-10)");
}

}  // namespace

int main() {
  std::printf("acceptance battery: discrete-diffusion sampling laboratory\n");
  check_01();
  check_02();
  check_03();
  check_04();
  check_05();
  check_06();
  check_07();
  check_08();
  check_09();
  check_10();
  check_11();
  std::printf("summary: %d of 11 checks passed, %d failed\n", 11 - g_failures,
              g_failures);
  return g_failures;
}
