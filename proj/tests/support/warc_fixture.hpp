#pragma once

// Hand-assembled WARC fixtures, built by string concatenation only, so
// the parser is checked against independently constructed bytes.

#include <string>
#include <utility>
#include <vector>

namespace testsupport {

struct warc_fixture_spec {
    std::string target_uri = "https://example.org/page";
    std::string date = "2023-03-20T01:02:03Z";
    std::string warc_type = "response";
    int http_status = 200;
    std::string http_reason = "OK";
    std::vector<std::pair<std::string, std::string>> http_headers = {
        {"Content-Type", "text/html; charset=utf-8"},
    };
    std::string body = "<html><body>hello</body></html>";
    std::vector<std::pair<std::string, std::string>> extra_warc_headers;
    bool include_http_block = true;
};

inline std::string build_warc_fixture(const warc_fixture_spec& spec) {
    std::string block;
    if (spec.include_http_block) {
        block = "HTTP/1.1 " + std::to_string(spec.http_status) + " " + spec.http_reason + "\r\n";
        for (const auto& [k, v] : spec.http_headers) block += k + ": " + v + "\r\n";
        block += "\r\n";
        block += spec.body;
    } else {
        block = spec.body;
    }

    std::string rec = "WARC/1.0\r\n";
    rec += "WARC-Type: " + spec.warc_type + "\r\n";
    rec += "WARC-Record-ID: <urn:uuid:0f36c99e-1db8-4aa5-85b3-000000000001>\r\n";
    rec += "WARC-Date: " + spec.date + "\r\n";
    rec += "WARC-Target-URI: " + spec.target_uri + "\r\n";
    for (const auto& [k, v] : spec.extra_warc_headers) rec += k + ": " + v + "\r\n";
    rec += std::string("Content-Type: ") +
           (spec.include_http_block ? "application/http; msgtype=response" : "text/plain") +
           "\r\n";
    rec += "Content-Length: " + std::to_string(block.size()) + "\r\n";
    rec += "\r\n";
    rec += block;
    rec += "\r\n\r\n";
    return rec;
}

} // namespace testsupport
