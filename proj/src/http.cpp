#include "unicrawl/http.hpp"

#include <httplib.h>

#include <map>

#include "unicrawl/errors.hpp"

namespace unicrawl {

url_parts split_url(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw config_error("URL has no scheme: " + url);
    }
    std::size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path), url.substr(path)};
}

struct http_session::impl {
    std::string user_agent;
    std::map<std::string, std::unique_ptr<httplib::Client>> clients;

    httplib::Client& client_for(const std::string& origin) {
        auto it = clients.find(origin);
        if (it == clients.end()) {
            auto cli = std::make_unique<httplib::Client>(origin);
            cli->set_connection_timeout(30, 0);
            cli->set_read_timeout(120, 0);
            cli->set_write_timeout(30, 0);
            cli->set_follow_location(true);
            if (!user_agent.empty()) {
                cli->set_default_headers({{"User-Agent", user_agent}});
            }
            it = clients.emplace(origin, std::move(cli)).first;
        }
        return *it->second;
    }
};

http_session::http_session(std::string user_agent) : impl_(std::make_unique<impl>()) {
    impl_->user_agent = std::move(user_agent);
}

http_session::~http_session() = default;
http_session::http_session(http_session&&) noexcept = default;
http_session& http_session::operator=(http_session&&) noexcept = default;

namespace {

[[noreturn]] void raise_transport(const std::string& url, httplib::Error err) {
    throw network_error("request failed (" + httplib::to_string(err) + "): " + url);
}

} // namespace

http_result http_session::get(const std::string& url) {
    url_parts parts = split_url(url);
    auto res = impl_->client_for(parts.origin).Get(parts.path);
    if (!res) raise_transport(url, res.error());
    return {res->status, std::move(res->body), false};
}

http_result http_session::get_range(const std::string& url, std::uint64_t first_byte,
                                    std::uint64_t last_byte, std::uint64_t max_buffer) {
    url_parts parts = split_url(url);
    httplib::Headers headers{
        {"Range", "bytes=" + std::to_string(first_byte) + "-" + std::to_string(last_byte)}};

    http_result out;
    auto res = impl_->client_for(parts.origin).Get(
        parts.path, headers,
        [&](const httplib::Response& response) {
            out.status = response.status;
            return true;
        },
        [&](const char* data, size_t length) {
            std::uint64_t room = max_buffer - std::min<std::uint64_t>(max_buffer, out.body.size());
            if (length > room) {
                out.body.append(data, room);
                out.body_truncated = true;
                return false; // cancel the transfer
            }
            out.body.append(data, length);
            return true;
        });

    if (!res) {
        if (res.error() == httplib::Error::Canceled && out.body_truncated) {
            return out;
        }
        raise_transport(url, res.error());
    }
    return out;
}

std::uint64_t http_session::content_length(const std::string& url) {
    url_parts parts = split_url(url);
    auto res = impl_->client_for(parts.origin).Head(parts.path);
    if (!res) raise_transport(url, res.error());
    if (res->status != 200) {
        throw network_error("HEAD " + url + " returned " + std::to_string(res->status),
                            res->status >= 500);
    }
    if (!res->has_header("Content-Length")) {
        throw network_error("HEAD " + url + " has no Content-Length", false);
    }
    return std::stoull(res->get_header_value("Content-Length"));
}

namespace {

class http_source final : public byte_source {
public:
    http_source(std::string url, retry_policy policy, std::string user_agent)
        : url_(std::move(url)), policy_(policy), session_(std::move(user_agent)) {
        size_ = with_retries(policy_, std::hash<std::string>{}(url_),
                             [&] { return session_.content_length(url_); });
    }

    std::uint64_t size() override { return size_; }

    std::string read_at(std::uint64_t offset, std::uint64_t length) override {
        if (length == 0) return {};
        if (offset + length > size_) {
            throw std::out_of_range("range read past end of " + url_);
        }
        std::uint64_t last = offset + length - 1;
        return with_retries(policy_, offset, [&] {
            http_result r = session_.get_range(url_, offset, last, length);
            if (r.status == 206) {
                if (r.body.size() != length) {
                    throw network_error("range response length mismatch for " + url_);
                }
                return std::move(r.body);
            }
            if (r.status == 200) {
                throw protocol_error("server ignored Range request for " + url_);
            }
            throw network_error("range GET " + url_ + " returned " + std::to_string(r.status),
                                r.status >= 500 || r.status == 429);
        });
    }

    std::string describe() const override { return url_; }

private:
    std::string url_;
    retry_policy policy_;
    http_session session_;
    std::uint64_t size_ = 0;
};

} // namespace

std::unique_ptr<byte_source> make_http_source(std::string url, retry_policy policy,
                                              std::string user_agent) {
    return std::make_unique<http_source>(std::move(url), policy, std::move(user_agent));
}

} // namespace unicrawl
