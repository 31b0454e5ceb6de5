#include "ctmc/state_space.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace ctmc {

namespace {

std::int64_t pow_or_minus_one(int S, int d) {
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) {
    if (n > (std::int64_t{1} << 62) / S) return -1;
    n *= S;
  }
  return n;
}

std::int64_t stride_of(int dim, int S) {
  std::int64_t s = 1;
  for (int i = 0; i < dim; ++i) s *= S;
  return s;
}

}  // namespace

Space::Space(int S, int d, std::int64_t exact_cap)
    : S_(S), d_(d), exact_cap_(exact_cap), size_(pow_or_minus_one(S, d)) {
  require(S >= 2, ErrorCode::invalid_spec, "vocabulary size S must be >= 2");
  require(d >= 1, ErrorCode::invalid_spec, "dimension d must be >= 1");
  require(exact_cap >= 1, ErrorCode::invalid_spec, "exact_cap must be >= 1");
}

void require_exact_mode(const Space& space) {
  require(space.exact_mode_ok(), ErrorCode::exact_mode_unavailable,
          "space has S^d = " +
              (space.size() > 0 ? std::to_string(space.size())
                                : std::string("> 2^62")) +
              " states, above exact_cap = " + std::to_string(space.exact_cap()));
}

void validate_state(const State& x, const Space& space) {
  require(static_cast<int>(x.size()) == space.d(), ErrorCode::invalid_state,
          "state has " + std::to_string(x.size()) + " tokens, expected d = " +
              std::to_string(space.d()));
  for (int i = 0; i < space.d(); ++i) {
    require(x[i] >= 0 && x[i] < space.S(), ErrorCode::invalid_state,
            "token " + std::to_string(x[i]) + " at dimension " +
                std::to_string(i) + " outside {0,...," +
                std::to_string(space.S() - 1) + "}");
  }
}

std::int64_t encode(const State& x, const Space& space) {
  validate_state(x, space);
  std::int64_t index = 0;
  std::int64_t stride = 1;
  for (int i = 0; i < space.d(); ++i) {
    index += x[i] * stride;
    stride *= space.S();
  }
  return index;
}

State decode(std::int64_t index, const Space& space) {
  require(space.size() > 0 && index >= 0 && index < space.size(),
          ErrorCode::invalid_state,
          "index " + std::to_string(index) + " outside [0, S^d)");
  State x(static_cast<std::size_t>(space.d()));
  for (int i = 0; i < space.d(); ++i) {
    x[i] = static_cast<int>(index % space.S());
    index /= space.S();
  }
  return x;
}

int hamming(const State& x, const State& y) {
  require(x.size() == y.size(), ErrorCode::invalid_state,
          "hamming distance needs states of equal dimension");
  int count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) count += (x[i] != y[i]) ? 1 : 0;
  return count;
}

State substitute(const State& x, int dim, int token, const Space& space) {
  validate_state(x, space);
  require(dim >= 0 && dim < space.d(), ErrorCode::invalid_state,
          "substitute dimension out of range");
  require(token >= 0 && token < space.S(), ErrorCode::invalid_state,
          "substitute token out of range");
  State y = x;
  y[static_cast<std::size_t>(dim)] = token;
  return y;
}

std::vector<State> neighbors(const State& x, const Space& space) {
  validate_state(x, space);
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(space.d()) *
              static_cast<std::size_t>(space.S() - 1));
  for (int i = 0; i < space.d(); ++i) {
    for (int a = 0; a < space.S(); ++a) {
      if (a == x[static_cast<std::size_t>(i)]) continue;
      out.push_back(substitute(x, i, a, space));
    }
  }
  return out;
}

std::int64_t substitute_index(std::int64_t x_index, int dim, int old_token,
                              int new_token, const Space& space) {
  return x_index +
         static_cast<std::int64_t>(new_token - old_token) *
             stride_of(dim, space.S());
}

int token_at(std::int64_t x_index, int dim, const Space& space) {
  return static_cast<int>((x_index / stride_of(dim, space.S())) % space.S());
}

DensePmf DensePmf::uniform(const Space& space) {
  require_exact_mode(space);
  DensePmf out{space, std::vector<double>(
                          static_cast<std::size_t>(space.size()),
                          1.0 / static_cast<double>(space.size()))};
  return out;
}

DensePmf DensePmf::point_mass(const Space& space, std::int64_t index) {
  require_exact_mode(space);
  require(index >= 0 && index < space.size(), ErrorCode::invalid_state,
          "point-mass index outside [0, S^d)");
  DensePmf out{space,
               std::vector<double>(static_cast<std::size_t>(space.size()), 0.0)};
  out.p[static_cast<std::size_t>(index)] = 1.0;
  return out;
}

DensePmf DensePmf::from_vector(const Space& space, std::vector<double> mass) {
  require_exact_mode(space);
  DensePmf out{space, std::move(mass)};
  out.validate();
  return out;
}

void DensePmf::validate() const {
  require(space.size() > 0 &&
              p.size() == static_cast<std::size_t>(space.size()),
          ErrorCode::invalid_input, "pmf length does not match S^d");
  double sum = 0.0;
  for (double v : p) {
    require(v >= 0.0, ErrorCode::invalid_input, "pmf entry is negative");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::invalid_input,
          "pmf does not sum to 1 within 1e-12 (sum = " + std::to_string(sum) +
              ")");
}

}  // namespace ctmc
