#ifndef ITTS_POLICY_HPP
#define ITTS_POLICY_HPP

#include <cstdint>
#include <functional>

namespace itts {

// Lookahead depths for the two stages: k1 for text-to-spectrogram, k2 for
// spectrogram-to-wave. Total system lookahead is k1 + k2.
struct LookaheadPolicy {
  int64_t k1 = 1;
  int64_t k2 = 0;
  int64_t total() const { return k1 + k2; }
};

// Monotonic map from 1-based unit index to the number of input units the
// stage may condition on. All public entry points below take and return
// 1-based indices; internal containers elsewhere are 0-based.
using PolicyFn = std::function<int64_t(int64_t)>;

// min{k + t - 1, m}: wait k units, then proceed one-for-one.
int64_t g_wait_k(int64_t k, int64_t t, int64_t m);

// min{k1 + t, m}. Identical to g_wait_k with k1 + 1.
int64_t g_lookahead(int64_t k1, int64_t t, int64_t m);

// min{k2 + t, m} for the wave stage.
int64_t h_lookahead(int64_t k2, int64_t t, int64_t m);

// True iff p is non-decreasing over 1..m with 0 <= p(t) <= m everywhere.
bool validate_policy(const PolicyFn& p, int64_t m);

}  // namespace itts

#endif  // ITTS_POLICY_HPP
