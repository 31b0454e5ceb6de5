// Deterministic random-number utilities.
//
// Seed derivation uses SplitMix64 mixing so that per-trajectory streams are a
// pure function of (master_seed, trajectory_index) — reproducible regardless
// of thread scheduling. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the distribution samplers (Poisson, normal,
// categorical, gamma) are implemented here on top of raw uniforms because the
// std::*_distribution adaptors are not bit-identical across standard
// libraries.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace ctmc::rng {

// One step of the SplitMix64 generator; advances `state` and returns the next
// output word.
std::uint64_t splitmix64(std::uint64_t& state);

// Folds a list of words into a single well-mixed seed.
std::uint64_t mix(std::initializer_list<std::uint64_t> words);

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  static Stream for_trajectory(std::uint64_t master_seed,
                               std::uint64_t trajectory_index) {
    return Stream(mix({master_seed, trajectory_index}));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::int64_t uniform_index(std::int64_t n);

  // Standard normal via Box-Muller (pairs cached).
  double normal();

  // Poisson draw via Knuth's product method; large means are split into
  // chunks so the product never underflows.
  long poisson(double mean);

  // Index draw proportional to non-negative weights w[0..n-1] (need not be
  // normalized). Returns n-1 if rounding exhausts the mass early.
  int categorical(const double* w, int n);

  // Gamma(alpha, 1) via Marsaglia–Tsang, with the boost trick for alpha < 1.
  double gamma(double alpha);

  // Dirichlet(alpha, ..., alpha) over n categories.
  std::vector<double> dirichlet(double alpha, int n);

 private:
  std::mt19937_64 eng_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace ctmc::rng
