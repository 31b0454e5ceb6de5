#include "ctmc/score.hpp"

#include <bit>
#include <cmath>

#include "ctmc/rng.hpp"

namespace ctmc {

namespace {

// Deterministic standard normal keyed on (seed, u, x, y): two SplitMix64
// words feed a Box-Muller transform. Pure function of its inputs, so
// perturbed providers are re-evaluable and thread-safe.
double keyed_normal(std::uint64_t seed, double u, std::int64_t x_index,
                    std::int64_t y_index) {
  std::uint64_t state = rng::mix({seed, std::bit_cast<std::uint64_t>(u),
                                  static_cast<std::uint64_t>(x_index),
                                  static_cast<std::uint64_t>(y_index)});
  std::uint64_t w1 = rng::splitmix64(state);
  std::uint64_t w2 = rng::splitmix64(state);
  double u1 = static_cast<double>((w1 >> 11) | 1ULL) * 0x1.0p-53;
  double u2 = static_cast<double>(w2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

void PerturbationSpec::validate() const {
  switch (kind) {
    case Kind::none:
      return;
    case Kind::multiplicative:
      require(c > 0.0 && std::isfinite(c), ErrorCode::invalid_spec,
              "multiplicative perturbation needs c > 0");
      return;
    case Kind::lognormal:
      require(sigma >= 0.0 && std::isfinite(sigma), ErrorCode::invalid_spec,
              "lognormal perturbation needs sigma >= 0");
      return;
  }
  fail(ErrorCode::invalid_spec, "unknown perturbation kind");
}

ScoreProvider::ScoreProvider(DensePmf q0, double M, PerturbationSpec spec)
    : q0_(std::move(q0)), M_(M), spec_(spec) {
  require(M_ >= 1.0, ErrorCode::invalid_spec,
          "score clip bound M must be >= 1 (or +infinity)");
  spec_.validate();
}

ScoreProvider ScoreProvider::exact(DensePmf q0, double M) {
  require_exact_mode(q0.space);
  q0.validate();
  return ScoreProvider(std::move(q0), M, PerturbationSpec{});
}

ScoreProvider ScoreProvider::perturbed(const PerturbationSpec& spec) const {
  require(spec_.kind == PerturbationSpec::Kind::none, ErrorCode::invalid_spec,
          "stacked perturbations are not supported");
  return ScoreProvider(q0_, M_, spec);
}

double ScoreProvider::finalize(double base, double u, std::int64_t x_index,
                               std::int64_t y_index) const {
  double s = base;
  switch (spec_.kind) {
    case PerturbationSpec::Kind::none:
      break;
    case PerturbationSpec::Kind::multiplicative:
      s *= spec_.c;
      break;
    case PerturbationSpec::Kind::lognormal:
      s *= std::exp(spec_.sigma * keyed_normal(spec_.seed, u, x_index, y_index));
      break;
  }
  if (std::isfinite(M_)) {
    s = std::min(std::max(s, 1.0 / M_), M_);
  }
  return s;
}

double ScoreProvider::evaluate(double u, const State& x, const State& y) const {
  double base = concrete_score_exact(q0_, u, y, x);
  return finalize(base, u, encode(x, q0_.space), encode(y, q0_.space));
}

ScoreTable ScoreProvider::table(double u) const {
  require_exact_mode(q0_.space);
  require(u > 0.0 && std::isfinite(u), ErrorCode::invalid_time,
          "score table needs u > 0");
  const Space& space = q0_.space;
  DensePmf qu = forward_marginal(q0_, u);

  ScoreTable st;
  st.u = u;
  st.S = space.S();
  st.d = space.d();
  st.n = space.size();
  st.v.assign(static_cast<std::size_t>(st.n) * st.d * st.S, 1.0);
  for (std::int64_t xi = 0; xi < st.n; ++xi) {
    double qx = qu.p[static_cast<std::size_t>(xi)];
    for (int dim = 0; dim < st.d; ++dim) {
      int x_tok = token_at(xi, dim, space);
      for (int a = 0; a < st.S; ++a) {
        if (a == x_tok) continue;  // self entry stays 1
        std::int64_t yi = substitute_index(xi, dim, x_tok, a, space);
        double base = qu.p[static_cast<std::size_t>(yi)] / qx;
        st.v[static_cast<std::size_t>((xi * st.d + dim) * st.S + a)] =
            finalize(base, u, xi, yi);
      }
    }
  }
  return st;
}

std::string ScoreProvider::tag() const {
  switch (spec_.kind) {
    case PerturbationSpec::Kind::none:
      return "exact";
    case PerturbationSpec::Kind::multiplicative:
      return "perturbed-multiplicative";
    case PerturbationSpec::Kind::lognormal:
      return "perturbed-lognormal";
  }
  return "unknown";
}

double score_entropy_loss(const ScoreProvider& provider, const DensePmf& q0,
                          double u) {
  require_exact_mode(q0.space);
  require(u > 0.0 && std::isfinite(u), ErrorCode::invalid_time,
          "score-entropy loss needs u > 0");
  const Space& space = q0.space;
  DensePmf qu = forward_marginal(q0, u);
  ScoreTable st = provider.table(u);
  const double rate = 1.0 / space.S();

  double loss = 0.0;
  for (std::int64_t xi = 0; xi < space.size(); ++xi) {
    double weight = qu.p[static_cast<std::size_t>(xi)];
    if (weight == 0.0) continue;
    double qx = qu.p[static_cast<std::size_t>(xi)];
    double inner = 0.0;
    for (int dim = 0; dim < space.d(); ++dim) {
      int x_tok = token_at(xi, dim, space);
      for (int a = 0; a < space.S(); ++a) {
        if (a == x_tok) continue;
        std::int64_t yi = substitute_index(xi, dim, x_tok, a, space);
        double r = qu.p[static_cast<std::size_t>(yi)] / qx;
        double s = st.value(xi, dim, a);
        inner += rate * (s - r - r * std::log(s / r));
      }
    }
    loss += weight * inner;
  }
  return loss;
}

double eps_score(const ScoreProvider& provider, const DensePmf& q0,
                 const TimeGrid& grid) {
  double total = 0.0;
  for (std::int64_t k = 0; k < grid.steps(); ++k) {
    double u = grid.T - grid.t[static_cast<std::size_t>(k)];
    total += grid.step(k) * score_entropy_loss(provider, q0, u);
  }
  return total;
}

double bregman_g(const DensePmf& q0, double t, double T, const State& x,
                 const std::function<double(const State&)>& sampler_rate) {
  require(T > 0.0 && t > 0.0 && t < T, ErrorCode::invalid_time,
          "Bregman diagnostic needs reverse time t in (0, T)");
  double u = T - t;
  const Space& space = q0.space;
  DensePmf qu = forward_marginal(q0, u);
  double qx = qu.p[static_cast<std::size_t>(encode(x, space))];
  require(qx > 0.0, ErrorCode::degenerate_conditioning,
          "Bregman diagnostic at a zero-probability state");

  double g = 0.0;
  for (const State& y : neighbors(x, space)) {
    double truth = (1.0 / space.S()) *
                   qu.p[static_cast<std::size_t>(encode(y, space))] / qx;
    double hat = sampler_rate(y);
    require(hat > 0.0 || truth == 0.0, ErrorCode::invalid_rate,
            "sampler rate must be positive where the true rate is positive");
    g += hat - truth;
    if (truth > 0.0) g += truth * std::log(truth / hat);
  }
  return g;
}

}  // namespace ctmc
