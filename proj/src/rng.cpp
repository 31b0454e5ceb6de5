#include "ctmc/rng.hpp"

#include <cmath>

#include "ctmc/errors.hpp"

namespace ctmc::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::initializer_list<std::uint64_t> words) {
  std::uint64_t state = 0x6a09e667f3bcc908ULL;  // arbitrary fixed offset
  std::uint64_t out = 0;
  for (std::uint64_t w : words) {
    state ^= w;
    out = splitmix64(state);
  }
  return out;
}

std::int64_t Stream::uniform_index(std::int64_t n) {
  require(n > 0, ErrorCode::invalid_input, "uniform_index needs n > 0");
  // Rejection-free scaling is fine here: n is far below 2^53 in all uses.
  auto idx = static_cast<std::int64_t>(uniform01() * static_cast<double>(n));
  return idx >= n ? n - 1 : idx;
}

double Stream::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 is kept away from 0 so the log is finite.
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  have_cached_normal_ = true;
  return r * std::cos(theta);
}

long Stream::poisson(double mean) {
  require(mean >= 0.0 && std::isfinite(mean), ErrorCode::invalid_rate,
          "Poisson mean must be finite and non-negative");
  long total = 0;
  // Split large means so exp(-chunk) stays representable.
  while (mean > 500.0) {
    double chunk = 500.0;
    double limit = std::exp(-chunk);
    double prod = 1.0;
    long k = -1;
    do {
      ++k;
      prod *= uniform01();
    } while (prod > limit);
    total += k;
    mean -= chunk;
  }
  if (mean == 0.0) return total;
  double limit = std::exp(-mean);
  double prod = 1.0;
  long k = -1;
  do {
    ++k;
    prod *= uniform01();
  } while (prod > limit);
  return total + k;
}

int Stream::categorical(const double* w, int n) {
  require(n > 0, ErrorCode::invalid_input, "categorical needs n > 0");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    require(w[i] >= 0.0, ErrorCode::negative_mass,
            "categorical weight is negative");
    total += w[i];
  }
  require(total > 0.0, ErrorCode::invalid_input,
          "categorical weights sum to zero");
  double u = uniform01() * total;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  return n - 1;
}

double Stream::gamma(double alpha) {
  require(alpha > 0.0, ErrorCode::invalid_input, "gamma needs alpha > 0");
  if (alpha < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^{1/a}.
    double u = 0.0;
    do {
      u = uniform01();
    } while (u <= 0.0);
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  // Marsaglia–Tsang squeeze method.
  double d = alpha - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform01();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

std::vector<double> Stream::dirichlet(double alpha, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& v : out) {
    v = gamma(alpha);
    total += v;
  }
  require(total > 0.0, ErrorCode::numerical_failure,
          "Dirichlet draw collapsed to zero");
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace ctmc::rng
