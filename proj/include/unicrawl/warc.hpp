#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unicrawl {

// Decompresses exactly the first gzip member of a fetched record (the
// crawl stores one member per record). See gzip.hpp for the raw helper;
// this wrapper names record-level failures with the index locator.
std::string decompress_member(std::string_view compressed, const std::string& locator = {});

using header_list = std::vector<std::pair<std::string, std::string>>;

// Parsed record envelope plus the embedded HTTP response. Header order
// and spelling are preserved so a parse can be re-serialized.
struct warc_record {
    std::string warc_version; // "WARC/1.0" or "WARC/1.1"
    header_list warc_headers;
    int http_status = 0; // 0 when the block is not an HTTP response
    header_list http_headers;
    std::string payload;    // HTTP body bytes, still transfer/content encoded
    std::string target_uri; // WARC-Target-URI
    std::string record_date; // WARC-Date

    std::string warc_type() const;
    bool is_response() const;
    std::optional<std::string> warc_header(std::string_view name) const;
    std::optional<std::string> http_header(std::string_view name) const;
};

// Parses one WARC record: version line, CRLF header block, Content-Length
// bytes of block, two trailing CRLFs. Raises parse_error with the byte
// offset of the failure.
warc_record parse_warc(std::string_view raw);

// Inverse of parse_warc for records it produced: reproduces the envelope
// byte-exactly for canonical "Name: value" headers.
std::string serialize_warc(const warc_record& record);

enum class charset_source { http_header, meta_tag, utf8_default };
std::string_view charset_source_name(charset_source s);

struct html_page {
    std::string url;
    std::string html; // valid UTF-8 (invalid input replaced, counted)
    charset_source charset = charset_source::utf8_default;
    std::string crawl_id;
    std::string record_date;
    std::size_t replaced_bytes = 0;
};

// Why a fetched record produced no page. Every skipped record increments
// exactly one of these.
enum class skip_reason {
    non_response,      // WARC-Type != response
    non_http,          // response record without an HTTP block
    http_status,       // embedded status not 2xx
    content_type,      // not HTML
    undecodable_body,  // transfer/content decoding failed
    binary_garbage,    // >10% replacement characters after decode
};
std::string_view skip_reason_name(skip_reason r);

struct decode_outcome {
    std::optional<html_page> page;
    std::optional<skip_reason> skipped;
};

struct decode_options {
    std::string crawl_id;
    double max_replacement_ratio = 0.10; // of decoded scalar values
};

// Charset cascade: HTTP Content-Type charset, then an HTML meta charset
// within the first 1024 bytes, then UTF-8 with replacement. Chunked
// transfer encoding and gzip/deflate content encoding are undone first.
decode_outcome decode_html(const warc_record& record, const decode_options& opts = {});

// RFC 9112 chunked transfer decoding.
std::string dechunk_http_body(std::string_view body);

// Exposed for tests: charset name found in an HTML head, if any.
std::optional<std::string> find_meta_charset(std::string_view html_prefix);

} // namespace unicrawl
