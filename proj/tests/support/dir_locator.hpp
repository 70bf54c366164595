#pragma once

// shard_locator over a local fixture tree, for index tests that do not
// need a server in the loop.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "unicrawl/errors.hpp"
#include "unicrawl/gzip.hpp"
#include "unicrawl/index.hpp"

namespace testsupport {

class dir_locator final : public unicrawl::shard_locator {
public:
    explicit dir_locator(std::string root) : root_(std::move(root)) {}

    std::string fetch_shard_listing(const std::string& crawl_id) override {
        auto path = std::filesystem::path(root_) / "crawl-data" / crawl_id /
                    "cc-index-table.paths.gz";
        std::ifstream in(path, std::ios::binary);
        if (!in) throw unicrawl::fatal_error("unknown crawl: " + crawl_id);
        std::ostringstream ss;
        ss << in.rdbuf();
        return unicrawl::gunzip_all(ss.str());
    }

    std::shared_ptr<unicrawl::byte_source> open_shard(const std::string& uri) override {
        if (!fail_substring_.empty() && uri.find(fail_substring_) != std::string::npos) {
            throw unicrawl::network_error("injected shard failure: " + uri, false);
        }
        return unicrawl::make_file_source(uri);
    }

    std::string shard_uri(const std::string& rel) override {
        return (std::filesystem::path(root_) / rel).string();
    }

    void fail_shards_containing(std::string needle) { fail_substring_ = std::move(needle); }

private:
    std::string root_;
    std::string fail_substring_;
};

} // namespace testsupport
