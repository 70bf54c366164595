#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

namespace unicrawl {

// Exponential backoff with jitter. Attempt k (0-based) sleeps
// initial * 2^k, plus up to 25% random jitter, capped at max_backoff.
struct retry_policy {
    int attempts = 5;
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::milliseconds max_backoff{30000};
    std::uint64_t jitter_seed = 0; // 0 = nondeterministic

    std::chrono::milliseconds backoff_for(int attempt, std::uint64_t salt) const;
};

// Runs fn until it succeeds or retryable failures exhaust the policy.
// Non-retryable exceptions propagate immediately. attempt_count, when
// given, receives the number of calls made.
template <typename Fn>
auto with_retries(const retry_policy& policy, std::uint64_t salt, Fn&& fn,
                  int* attempt_count = nullptr) -> decltype(fn());

void sleep_for(std::chrono::milliseconds d);

} // namespace unicrawl

#include "unicrawl/detail/retry_impl.hpp"
