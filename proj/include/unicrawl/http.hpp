#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "unicrawl/byte_source.hpp"
#include "unicrawl/retry.hpp"

namespace unicrawl {

struct url_parts {
    std::string origin; // scheme://host[:port]
    std::string path;   // begins with '/'
};

url_parts split_url(const std::string& url);

struct http_result {
    int status = 0;
    std::string body;
    bool body_truncated = false; // receive was cancelled at the buffer cap
};

// One session per thread; connections are reused per origin. Transport
// failures raise network_error (retryable); HTTP statuses are returned
// to the caller, which owns the protocol semantics.
class http_session {
public:
    explicit http_session(std::string user_agent = {});
    ~http_session();
    http_session(http_session&&) noexcept;
    http_session& operator=(http_session&&) noexcept;

    http_result get(const std::string& url);

    // GET with "Range: bytes=<first>-<last>". At most max_buffer bytes of
    // body are retained; anything past that cancels the transfer and sets
    // body_truncated (used to avoid buffering full objects when a server
    // ignores the range).
    http_result get_range(const std::string& url, std::uint64_t first_byte,
                          std::uint64_t last_byte, std::uint64_t max_buffer);

    // Content-Length via HEAD.
    std::uint64_t content_length(const std::string& url);

private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

// byte_source over a remote object: every read_at becomes a range request
// (with retries), so only the bytes actually decoded are transferred.
std::unique_ptr<byte_source> make_http_source(std::string url, retry_policy policy,
                                              std::string user_agent = {});

} // namespace unicrawl
