#include <doctest.h>

#include <algorithm>
#include <set>

#include "ctmc/state_space.hpp"

using namespace ctmc;

TEST_SUITE("state_space") {

TEST_CASE("encode examples and bijectivity") {
  Space b3(2, 3);
  CHECK(encode({0, 0, 0}, b3) == 0);
  CHECK(encode({1, 1, 1}, b3) == 7);

  Space s32(3, 2);
  CHECK(encode({2, 1}, s32) == 5);  // 2*1 + 1*3, dimension 0 least significant

  for (const Space& space : {Space(2, 3), Space(3, 2), Space(4, 3)}) {
    for (std::int64_t i = 0; i < space.size(); ++i) {
      State x = decode(i, space);
      CHECK(encode(x, space) == i);
      for (int dim = 0; dim < space.d(); ++dim) {
        CHECK(token_at(i, dim, space) == x[static_cast<std::size_t>(dim)]);
      }
    }
  }
}

TEST_CASE("encode rejects invalid states") {
  Space space(2, 3);
  CHECK_THROWS_AS(encode({0, 2, 0}, space), Error);   // token out of range
  CHECK_THROWS_AS(encode({0, 0}, space), Error);      // wrong length
  CHECK_THROWS_AS(encode({0, -1, 0}, space), Error);  // negative token
  try {
    encode({0, 2, 0}, space);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_state);
  }
}

TEST_CASE("hamming") {
  Space b3(2, 3);
  CHECK(hamming({0, 1, 0}, {0, 1, 0}) == 0);
  CHECK(hamming({0, 0, 0}, {1, 1, 1}) == 3);
  CHECK(hamming({0, 3}, {0, 1}) == 1);
  CHECK_THROWS_AS(hamming({0, 0}, {0, 0, 0}), Error);
  (void)b3;
}

TEST_CASE("neighbors") {
  Space b1(2, 1);
  auto n1 = neighbors({0}, b1);
  REQUIRE(n1.size() == 1);
  CHECK(n1[0] == State{1});

  Space s32(3, 2);
  CHECK(neighbors({1, 2}, s32).size() == 4);  // d*(S-1)

  Space b3(2, 3);
  auto n3 = neighbors({0, 0, 0}, b3);
  std::set<State> got(n3.begin(), n3.end());
  std::set<State> want = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(got == want);
  CHECK(n3.size() == got.size());  // no duplicates

  for (const State& y : n3) CHECK(hamming({0, 0, 0}, y) == 1);
}

TEST_CASE("neighbors is symmetric over a full space") {
  Space space(3, 2);
  for (std::int64_t i = 0; i < space.size(); ++i) {
    State x = decode(i, space);
    for (const State& y : neighbors(x, space)) {
      auto back = neighbors(y, space);
      CHECK(std::find(back.begin(), back.end(), x) != back.end());
    }
  }
}

TEST_CASE("substitute and substitute_index agree") {
  Space space(4, 3);
  for (std::int64_t i = 0; i < space.size(); ++i) {
    State x = decode(i, space);
    for (int dim = 0; dim < space.d(); ++dim) {
      for (int a = 0; a < space.S(); ++a) {
        State y = substitute(x, dim, a, space);
        CHECK(encode(y, space) ==
              substitute_index(i, dim, x[static_cast<std::size_t>(dim)], a,
                               space));
      }
    }
  }
}

TEST_CASE("exact-mode cap") {
  Space small(2, 3);
  CHECK(small.exact_mode_ok());
  CHECK_NOTHROW(require_exact_mode(small));

  Space big(2, 17);  // 131072 > 65536
  CHECK(!big.exact_mode_ok());
  try {
    require_exact_mode(big);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::exact_mode_unavailable);
  }

  Space custom(2, 3, 4);  // cap below S^d
  CHECK(!custom.exact_mode_ok());
}

TEST_CASE("space validates its parameters") {
  CHECK_THROWS_AS(Space(1, 3), Error);
  CHECK_THROWS_AS(Space(2, 0), Error);
}

TEST_CASE("DensePmf constructors and validation") {
  Space space(2, 2);
  DensePmf u = DensePmf::uniform(space);
  for (double v : u.p) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));

  DensePmf pm = DensePmf::point_mass(space, 3);
  CHECK(pm.p[3] == 1.0);
  CHECK(pm.p[0] == 0.0);
  CHECK_THROWS_AS(DensePmf::point_mass(space, 4), Error);
  CHECK_THROWS_AS(DensePmf::point_mass(space, -1), Error);

  CHECK_NOTHROW(DensePmf::from_vector(space, {0.1, 0.2, 0.3, 0.4}));
  CHECK_THROWS_AS(DensePmf::from_vector(space, {0.5, 0.6, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(DensePmf::from_vector(space, {-0.1, 0.5, 0.3, 0.3}), Error);
  CHECK_THROWS_AS(DensePmf::from_vector(space, {0.5, 0.5}), Error);
}

}  // TEST_SUITE
