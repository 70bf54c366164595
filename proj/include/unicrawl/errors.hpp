#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unicrawl {

// Bad CLI flags, bad config file, invalid language code. Exit code 2.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Transport-level failure (connect, timeout, 5xx). Retryable by policy.
class network_error : public std::runtime_error {
public:
    explicit network_error(const std::string& msg, bool retryable = true)
        : std::runtime_error(msg), retryable_(retryable) {}
    bool retryable() const { return retryable_; }

private:
    bool retryable_;
};

// The server violated the expected protocol (e.g. 200 instead of 206).
class protocol_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Stored data does not match its manifest (count or checksum).
class integrity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structural failure while parsing a record; carries the byte offset
// where parsing stopped.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Unrecoverable pipeline failure. Exit code 4.
class fatal_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace unicrawl
