#include "itts/policy.hpp"

#include <algorithm>

#include "itts/errors.hpp"

namespace itts {

namespace {

void check_args(int64_t k, int64_t t, int64_t m) {
  if (t < 1) throw DomainError("policy: unit index t must be >= 1");
  if (m < 1) throw DomainError("policy: total unit count m must be >= 1");
  if (k < 0) throw DomainError("policy: lookahead k must be >= 0");
}

}  // namespace

int64_t g_wait_k(int64_t k, int64_t t, int64_t m) {
  check_args(k, t, m);
  return std::min(k + t - 1, m);
}

int64_t g_lookahead(int64_t k1, int64_t t, int64_t m) {
  check_args(k1, t, m);
  return std::min(k1 + t, m);
}

int64_t h_lookahead(int64_t k2, int64_t t, int64_t m) {
  check_args(k2, t, m);
  return std::min(k2 + t, m);
}

bool validate_policy(const PolicyFn& p, int64_t m) {
  if (m < 1) throw DomainError("validate_policy: m must be >= 1");
  int64_t prev = 0;
  for (int64_t t = 1; t <= m; ++t) {
    int64_t v = p(t);
    if (v < 0 || v > m) return false;
    if (v < prev) return false;
    prev = v;
  }
  return true;
}

}  // namespace itts
