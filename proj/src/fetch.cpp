#include "unicrawl/fetch.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include "unicrawl/errors.hpp"
#include "unicrawl/http.hpp"
#include "unicrawl/util.hpp"

namespace unicrawl {

std::string range_request::header_value() const {
    return "bytes=" + std::to_string(first_byte) + "-" + std::to_string(last_byte);
}

range_request build_range_request(const std::string& base, const index_record& rec) {
    range_request req;
    req.absolute_url = join_url(base, rec.warc_filename);
    req.first_byte = static_cast<std::uint64_t>(rec.warc_record_offset);
    req.last_byte = static_cast<std::uint64_t>(rec.warc_record_offset) +
                    static_cast<std::uint64_t>(rec.warc_record_length) - 1;
    return req;
}

// ---------------------------------------------------------------------------
// Token bucket
// ---------------------------------------------------------------------------

struct token_bucket::impl {
    std::mutex mu;
    double rate;
    double capacity;
    double tokens;
    std::chrono::steady_clock::time_point last;

    impl(double r, double burst)
        : rate(r), capacity(std::max(burst, 1.0)), tokens(capacity),
          last(std::chrono::steady_clock::now()) {}

    void refill() {
        auto now = std::chrono::steady_clock::now();
        double elapsed = std::chrono::duration<double>(now - last).count();
        last = now;
        tokens = std::min(capacity, tokens + elapsed * rate);
    }

    void acquire() {
        while (true) {
            std::chrono::duration<double> wait{0};
            {
                std::lock_guard<std::mutex> lock(mu);
                refill();
                if (tokens >= 1.0) {
                    tokens -= 1.0;
                    return;
                }
                wait = std::chrono::duration<double>((1.0 - tokens) / rate);
            }
            std::this_thread::sleep_for(wait);
        }
    }
};

token_bucket::token_bucket(double rate_per_sec, double burst)
    : impl_(rate_per_sec > 0 ? std::make_unique<impl>(rate_per_sec, burst) : nullptr) {}

token_bucket::~token_bucket() = default;

void token_bucket::acquire() {
    if (impl_) impl_->acquire();
}

// ---------------------------------------------------------------------------
// Record fetching
// ---------------------------------------------------------------------------

namespace {

std::string locator_of(const range_request& req) {
    return req.absolute_url + " " + req.header_value();
}

std::string fetch_body(http_session& session, const range_request& req,
                       const retry_policy& policy, token_bucket* bucket, int* attempts) {
    return with_retries(
        policy, req.first_byte,
        [&]() -> std::string {
            if (bucket) bucket->acquire();
            http_result r =
                session.get_range(req.absolute_url, req.first_byte, req.last_byte, req.length());
            if (r.status == 206) {
                if (r.body.size() != req.length()) {
                    throw fatal_error("truncated range response (" +
                                      std::to_string(r.body.size()) + " of " +
                                      std::to_string(req.length()) + " bytes) for " +
                                      locator_of(req));
                }
                return std::move(r.body);
            }
            if (r.status == 200) {
                // Server ignored the Range header; the receive was cancelled
                // at the requested length, so nothing larger was buffered.
                throw protocol_error("server ignored Range request for " + locator_of(req));
            }
            if (r.status == 416) {
                throw fatal_error("range not satisfiable (stale index entry?) for " +
                                  locator_of(req));
            }
            throw network_error(
                "range GET returned " + std::to_string(r.status) + " for " + locator_of(req),
                r.status >= 500 || r.status == 429);
        },
        attempts);
}

} // namespace

fetched_record fetch_record(const range_request& req, const retry_policy& policy,
                            const std::string& user_agent, token_bucket* bucket) {
    http_session session(user_agent);
    fetched_record rec;
    rec.compressed_bytes = fetch_body(session, req, policy, bucket, &rec.attempts);
    rec.fetched_at = now_epoch_seconds();
    return rec;
}

void fetch_all(const filtered_index& index, const fetch_options& options,
               const std::function<void(fetch_outcome)>& sink) {
    if (options.workers < 1) throw config_error("workers must be >= 1");

    token_bucket bucket(options.rate_limit);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        // One HTTP session per worker; connections are reused per origin.
        http_session session(options.user_agent);
        while (true) {
            std::size_t row = next.fetch_add(1);
            if (row >= index.records.size()) return;
            const index_record& rec = index.records[row];
            fetch_outcome outcome;
            outcome.row = row;
            try {
                range_request req = build_range_request(options.base_url, rec);
                fetched_record fetched;
                fetched.source = rec;
                fetched.compressed_bytes =
                    fetch_body(session, req, options.retry, &bucket, &fetched.attempts);
                fetched.fetched_at = now_epoch_seconds();
                outcome.record = std::move(fetched);
            } catch (const std::exception& e) {
                outcome.failure = fetch_failure{rec, e.what()};
            }
            sink(std::move(outcome));
        }
    };

    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(options.workers),
                                          std::max<std::size_t>(index.records.size(), 1));
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (std::size_t i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

} // namespace unicrawl
