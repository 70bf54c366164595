#pragma once

#include "unicrawl/errors.hpp"

namespace unicrawl {

template <typename Fn>
auto with_retries(const retry_policy& policy, std::uint64_t salt, Fn&& fn, int* attempt_count)
    -> decltype(fn()) {
    int attempt = 0;
    while (true) {
        try {
            ++attempt;
            if (attempt_count) *attempt_count = attempt;
            return fn();
        } catch (const network_error& e) {
            if (!e.retryable() || attempt >= policy.attempts) throw;
            sleep_for(policy.backoff_for(attempt - 1, salt));
        }
    }
}

} // namespace unicrawl
