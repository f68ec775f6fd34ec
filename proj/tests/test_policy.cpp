#include <doctest.h>

#include <random>

#include "itts/errors.hpp"
#include "itts/policy.hpp"

using namespace itts;

TEST_CASE("wait-k evaluates and clamps") {
  CHECK(g_wait_k(2, 1, 10) == 2);
  CHECK(g_wait_k(2, 9, 10) == 10);
  CHECK(g_wait_k(0, 1, 5) == 0);
  CHECK_THROWS_AS(g_wait_k(2, 0, 10), DomainError);
  CHECK_THROWS_AS(g_wait_k(2, 1, 0), DomainError);
  CHECK_THROWS_AS(g_wait_k(-1, 1, 10), DomainError);
}

TEST_CASE("lookahead evaluates and clamps") {
  CHECK(g_lookahead(1, 1, 5) == 2);
  CHECK(g_lookahead(1, 5, 5) == 5);
  CHECK(g_lookahead(0, 3, 10) == 3);
  CHECK(h_lookahead(0, 1, 4) == 1);
  CHECK(h_lookahead(1, 4, 4) == 4);
  CHECK(h_lookahead(1, 2, 9) == 3);
}

TEST_CASE("validate_policy accepts monotone maps and rejects others") {
  const int64_t m = 12;
  CHECK(validate_policy([m](int64_t t) { return g_lookahead(2, t, m); }, m));
  CHECK(validate_policy([m](int64_t) { return m; }, m));
  CHECK_FALSE(validate_policy([m](int64_t t) { return m - t; }, m));
  CHECK_FALSE(validate_policy([m](int64_t) { return m + 1; }, m));
  CHECK_FALSE(validate_policy([](int64_t) { return int64_t{-1}; }, m));
  CHECK_THROWS_AS(validate_policy([](int64_t t) { return t; }, 0), DomainError);
}

TEST_CASE("policy algebra over random triples") {
  std::mt19937_64 rng(20240917);
  for (int trial = 0; trial < 10000; ++trial) {
    const int64_t k = static_cast<int64_t>(rng() % 12);
    const int64_t m = 1 + static_cast<int64_t>(rng() % 64);
    const int64_t t = 1 + static_cast<int64_t>(rng() % m);

    // Lookahead-k equals wait-(k+1).
    CHECK(g_lookahead(k, t, m) == g_wait_k(k + 1, t, m));

    // Monotone in t and clamped.
    if (t < m) CHECK(g_lookahead(k, t + 1, m) >= g_lookahead(k, t, m));
    CHECK(g_lookahead(k, t, m) <= m);
    CHECK(g_lookahead(k, t, m) >= std::min(t, m));
    if (t >= m - k) CHECK(g_lookahead(k, t, m) == m);

    // Full-sentence conditioning is the clamp's fixed point.
    CHECK(g_lookahead(m, t, m) == m);
  }
}
