#include "ctmc/forward.hpp"

#include <cmath>
#include <string>

namespace ctmc {

ForwardKernel token_kernel(double t, int S) {
  require(t >= 0.0 && std::isfinite(t), ErrorCode::invalid_time,
          "token kernel needs t >= 0 (got " + std::to_string(t) + ")");
  require(S >= 2, ErrorCode::invalid_spec, "token kernel needs S >= 2");
  double e = std::exp(-t);
  ForwardKernel k;
  k.t = t;
  k.S = S;
  k.diag = (1.0 + (S - 1) * e) / S;
  k.offdiag = (1.0 - e) / S;
  return k;
}

DensePmf forward_marginal(const DensePmf& q0, double t) {
  require_exact_mode(q0.space);
  require(t >= 0.0 && std::isfinite(t), ErrorCode::invalid_time,
          "forward marginal needs t >= 0");
  const Space& space = q0.space;
  const int S = space.S();
  ForwardKernel k = token_kernel(t, S);

  // Per-dimension sweep. With the rank-1 structure of the kernel, the update
  // along one dimension is out[b] = offdiag * sum_a vals[a]
  //                                + (diag - offdiag) * vals[b].
  std::vector<double> p = q0.p;
  std::vector<double> vals(static_cast<std::size_t>(S));
  std::int64_t stride = 1;
  for (int dim = 0; dim < space.d(); ++dim) {
    std::int64_t block = stride * S;
    for (std::int64_t base = 0; base < space.size(); base += block) {
      for (std::int64_t rest = 0; rest < stride; ++rest) {
        double sum = 0.0;
        for (int a = 0; a < S; ++a) {
          vals[static_cast<std::size_t>(a)] =
              p[static_cast<std::size_t>(base + a * stride + rest)];
          sum += vals[static_cast<std::size_t>(a)];
        }
        for (int b = 0; b < S; ++b) {
          p[static_cast<std::size_t>(base + b * stride + rest)] =
              k.offdiag * sum +
              (k.diag - k.offdiag) * vals[static_cast<std::size_t>(b)];
        }
      }
    }
    stride = block;
  }
  DensePmf out{space, std::move(p)};
  return out;
}

DensePmf posterior(const DensePmf& q0, double t, const State& x) {
  require_exact_mode(q0.space);
  validate_state(x, q0.space);
  const Space& space = q0.space;
  ForwardKernel k = token_kernel(t, space.S());

  std::vector<double> joint(static_cast<std::size_t>(space.size()));
  double qt_x = 0.0;
  for (std::int64_t x0 = 0; x0 < space.size(); ++x0) {
    double w = q0.p[static_cast<std::size_t>(x0)];
    if (w > 0.0) {
      std::int64_t rem = x0;
      for (int i = 0; i < space.d(); ++i) {
        int tok = static_cast<int>(rem % space.S());
        rem /= space.S();
        w *= k.entry(tok, x[static_cast<std::size_t>(i)]);
      }
    }
    joint[static_cast<std::size_t>(x0)] = w;
    qt_x += w;
  }
  require(qt_x > 0.0, ErrorCode::degenerate_conditioning,
          "posterior conditioned on a zero-probability observation");
  for (auto& v : joint) v /= qt_x;
  return DensePmf{space, std::move(joint)};
}

double concrete_score_exact(const DensePmf& q0, double t, const State& y,
                            const State& x) {
  require_exact_mode(q0.space);
  require(t > 0.0 && std::isfinite(t), ErrorCode::invalid_time,
          "concrete score needs t > 0");
  require(hamming(x, y) == 1, ErrorCode::invalid_neighbor,
          "concrete score is defined for Hamming-1 pairs only");
  const Space& space = q0.space;

  int diff_dim = 0;
  for (int i = 0; i < space.d(); ++i) {
    if (x[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(i)]) {
      diff_dim = i;
      break;
    }
  }

  // Derivation 1: direct ratio of forward marginals.
  DensePmf qt = forward_marginal(q0, t);
  double denom = qt.p[static_cast<std::size_t>(encode(x, space))];
  require(denom > 0.0, ErrorCode::degenerate_conditioning,
          "concrete score at a zero-probability state");
  double direct = qt.p[static_cast<std::size_t>(encode(y, space))] / denom;

  // Derivation 2: posterior expectation of the per-token kernel ratio on the
  // differing dimension.
  DensePmf post = posterior(q0, t, x);
  ForwardKernel k = token_kernel(t, space.S());
  int x_tok = x[static_cast<std::size_t>(diff_dim)];
  int y_tok = y[static_cast<std::size_t>(diff_dim)];
  double expectation = 0.0;
  for (std::int64_t x0 = 0; x0 < space.size(); ++x0) {
    double w = post.p[static_cast<std::size_t>(x0)];
    if (w == 0.0) continue;
    int clean_tok = token_at(x0, diff_dim, space);
    expectation += w * (k.entry(clean_tok, y_tok) / k.entry(clean_tok, x_tok));
  }

  double scale = std::max(1.0, std::abs(direct));
  require(std::abs(direct - expectation) <= 1e-10 * scale,
          ErrorCode::numerical_failure,
          "score cross-check failed: direct ratio " + std::to_string(direct) +
              " vs posterior expectation " + std::to_string(expectation));
  return direct;
}

double token_ratio_case(double t, int S, RatioCase c) {
  require(t > 0.0 && std::isfinite(t), ErrorCode::invalid_time,
          "token ratio cases need t > 0");
  require(S >= 2, ErrorCode::invalid_spec, "token ratio cases need S >= 2");
  double e = std::exp(-t);
  switch (c) {
    case RatioCase::both_differ:
      return 1.0;
    case RatioCase::x_matches:
      return (1.0 - e) / (1.0 + (S - 1) * e);
    case RatioCase::y_matches:
      return (1.0 + (S - 1) * e) / (1.0 - e);
  }
  fail(ErrorCode::invalid_input, "unknown ratio case");
}

double forward_rate(const State& x, const State& y, const Space& space) {
  validate_state(x, space);
  validate_state(y, space);
  int h = hamming(x, y);
  if (h == 0) {
    return -static_cast<double>(space.S() - 1) * space.d() / space.S();
  }
  if (h == 1) return 1.0 / space.S();
  return 0.0;
}

double reverse_rate_exact(const DensePmf& q0, double u, const State& x,
                          const State& y) {
  require(u > 0.0 && std::isfinite(u), ErrorCode::invalid_time,
          "reverse rate needs forward time u > 0");
  int h = hamming(x, y);
  if (h >= 2) return 0.0;

  DensePmf qu = forward_marginal(q0, u);
  const Space& space = q0.space;
  double qx = qu.p[static_cast<std::size_t>(encode(x, space))];
  require(qx > 0.0, ErrorCode::degenerate_conditioning,
          "reverse rate at a zero-probability state");
  if (h == 1) {
    return forward_rate(y, x, space) *
           qu.p[static_cast<std::size_t>(encode(y, space))] / qx;
  }
  // Diagonal: negative sum of the off-diagonal row.
  double total = 0.0;
  for (const State& nbr : neighbors(x, space)) {
    total += forward_rate(nbr, x, space) *
             qu.p[static_cast<std::size_t>(encode(nbr, space))] / qx;
  }
  return -total;
}

std::pair<double, double> score_sup_bound_check(const DensePmf& q0, double u) {
  require_exact_mode(q0.space);
  require(u > 0.0 && std::isfinite(u), ErrorCode::invalid_time,
          "sup-ratio check needs u > 0");
  const Space& space = q0.space;
  DensePmf qu = forward_marginal(q0, u);

  double sup = 0.0;
  for (std::int64_t xi = 0; xi < space.size(); ++xi) {
    double qx = qu.p[static_cast<std::size_t>(xi)];
    for (int dim = 0; dim < space.d(); ++dim) {
      int x_tok = token_at(xi, dim, space);
      for (int a = 0; a < space.S(); ++a) {
        if (a == x_tok) continue;
        std::int64_t yi = substitute_index(xi, dim, x_tok, a, space);
        double ratio = qu.p[static_cast<std::size_t>(yi)] / qx;
        if (ratio > sup) sup = ratio;
      }
    }
  }
  double bound = 1.0 + space.S() / std::expm1(u);
  require(sup <= bound * (1.0 + 1e-12), ErrorCode::numerical_failure,
          "measured sup ratio exceeds its closed-form bound");
  return {sup, bound};
}

}  // namespace ctmc
