#include "unicrawl/retry.hpp"

#include <algorithm>
#include <random>
#include <thread>

namespace unicrawl {

std::chrono::milliseconds retry_policy::backoff_for(int attempt, std::uint64_t salt) const {
    double base = static_cast<double>(initial_backoff.count());
    for (int i = 0; i < attempt; ++i) base *= 2.0;
    base = std::min(base, static_cast<double>(max_backoff.count()));

    std::uint64_t seed = jitter_seed ? jitter_seed ^ salt ^ static_cast<std::uint64_t>(attempt)
                                     : std::random_device{}();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.0, 0.25);
    double total = base * (1.0 + jitter(rng));
    return std::chrono::milliseconds(static_cast<std::int64_t>(total));
}

void sleep_for(std::chrono::milliseconds d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
}

} // namespace unicrawl
