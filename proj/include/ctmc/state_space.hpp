// Enumeration, indexing, and neighborhood structure of the product state
// space {0,...,S-1}^d.
//
// Tokens are 0-based everywhere, including all I/O surfaces. The canonical
// mixed-radix index is index = sum_i tokens[i] * S^i, dimension 0 least
// significant; every dense vector or matrix in the laboratory is laid out in
// this order. Dense ("exact") operations are only permitted while
// S^d <= exact_cap so worst-case kernels stay desk-sized.

#pragma once

#include <cstdint>
#include <vector>

#include "ctmc/errors.hpp"

namespace ctmc {

inline constexpr std::int64_t kDefaultExactCap = 65536;

using State = std::vector<int>;

class Space {
 public:
  Space(int S, int d, std::int64_t exact_cap = kDefaultExactCap);

  int S() const { return S_; }
  int d() const { return d_; }
  std::int64_t exact_cap() const { return exact_cap_; }

  // Number of states S^d, or -1 when it overflows a 64-bit integer.
  std::int64_t size() const { return size_; }

  bool exact_mode_ok() const { return size_ > 0 && size_ <= exact_cap_; }

 private:
  int S_;
  int d_;
  std::int64_t exact_cap_;
  std::int64_t size_;
};

// Throws ExactModeUnavailable unless S^d <= exact_cap.
void require_exact_mode(const Space& space);

void validate_state(const State& x, const Space& space);

std::int64_t encode(const State& x, const Space& space);
State decode(std::int64_t index, const Space& space);

int hamming(const State& x, const State& y);

// Copy of x with dimension `dim` set to `token`.
State substitute(const State& x, int dim, int token, const Space& space);

// All d*(S-1) states at Hamming distance 1, ordered by (dimension, token).
std::vector<State> neighbors(const State& x, const Space& space);

// Index arithmetic for one-token substitutions: the index of x with dimension
// `dim` replaced by `token`, given encode(x). Avoids re-encoding in hot loops.
std::int64_t substitute_index(std::int64_t x_index, int dim, int old_token,
                              int new_token, const Space& space);

// Digit (token) `dim` of the state with the given index.
int token_at(std::int64_t x_index, int dim, const Space& space);

struct DensePmf {
  Space space;
  std::vector<double> p;

  static DensePmf uniform(const Space& space);
  static DensePmf point_mass(const Space& space, std::int64_t index);
  // Validates non-negativity and normalization (sum within 1e-12 of 1).
  static DensePmf from_vector(const Space& space, std::vector<double> mass);

  void validate() const;
};

}  // namespace ctmc
