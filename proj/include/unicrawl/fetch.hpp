#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "unicrawl/index.hpp"
#include "unicrawl/retry.hpp"

namespace unicrawl {

struct range_request {
    std::string absolute_url;
    std::uint64_t first_byte = 0;
    std::uint64_t last_byte = 0; // inclusive

    std::uint64_t length() const { return last_byte - first_byte + 1; }
    // The wire value: "bytes=<first>-<last>".
    std::string header_value() const;
};

range_request build_range_request(const std::string& base, const index_record& rec);

struct fetched_record {
    index_record source;
    std::string compressed_bytes; // one gzip member
    std::int64_t fetched_at = 0;
    int attempts = 1;
};

// Blocking token bucket: acquire() waits until a token is available.
// Shared by all fetch workers of a process.
class token_bucket {
public:
    // rate_per_sec <= 0 disables limiting.
    explicit token_bucket(double rate_per_sec, double burst = 1.0);
    ~token_bucket();
    token_bucket(const token_bucket&) = delete;
    token_bucket& operator=(const token_bucket&) = delete;

    void acquire();

private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

// Downloads exactly the requested byte range. HTTP 206 with the right
// length succeeds; 200 means the server ignored the range (protocol_error,
// reading stops at the requested length); 416 marks an index/record
// mismatch; a short 206 body is a truncation; 5xx and transport errors
// retry per policy.
fetched_record fetch_record(const range_request& req, const retry_policy& policy,
                            const std::string& user_agent = {}, token_bucket* bucket = nullptr);

struct fetch_failure {
    index_record source;
    std::string error;
};

struct fetch_options {
    std::string base_url;
    int workers = 4;
    double rate_limit = 20.0; // requests/sec across all workers
    retry_policy retry;
    std::string user_agent;
};

// Per-row outcome; exactly one of record/failure is set.
struct fetch_outcome {
    std::size_t row = 0;
    std::optional<fetched_record> record;
    std::optional<fetch_failure> failure;
};

// Fetches every record of the index with a bounded worker pool sharing
// one token bucket. Individual failures become failure outcomes; the
// stream never aborts for one record. `sink` is called once per index row
// in completion order, concurrently from worker threads; it owns its own
// synchronization.
void fetch_all(const filtered_index& index, const fetch_options& options,
               const std::function<void(fetch_outcome)>& sink);

} // namespace unicrawl
