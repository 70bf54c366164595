#pragma once

// Minimal raw-TCP HTTP responder for protocol-violation fixtures. Each
// accepted connection reads one request and replies with the next canned
// response (responses carry Connection: close so clients cannot reuse the
// socket). httplib's server cannot misbehave on purpose -- it always
// honors Range -- so these tests speak HTTP by hand.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace testsupport {

class scripted_server {
public:
    // handler: full request text -> full response bytes.
    explicit scripted_server(std::function<std::string(const std::string&)> handler)
        : handler_(std::move(handler)) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) throw std::runtime_error("socket failed");
        int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = 0;
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            throw std::runtime_error("bind failed");
        }
        socklen_t len = sizeof(addr);
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
        ::listen(fd_, 16);
        thread_ = std::thread([this] { serve(); });
    }

    // Canned-response convenience: responses are served in order; after
    // the list is exhausted the last one repeats.
    explicit scripted_server(std::vector<std::string> responses)
        : scripted_server([this](const std::string&) {
              std::lock_guard<std::mutex> lock(mu_);
              std::string r = canned_[std::min(next_, canned_.size() - 1)];
              ++next_;
              return r;
          }) {
        canned_ = std::move(responses);
    }

    ~scripted_server() {
        stopping_ = true;
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        if (thread_.joinable()) thread_.join();
    }

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int requests_seen() const { return requests_; }

    static std::string response(int status, const std::string& reason, const std::string& body,
                                const std::vector<std::string>& extra_headers = {}) {
        std::string r = "HTTP/1.1 " + std::to_string(status) + " " + reason + "\r\n";
        for (const auto& h : extra_headers) r += h + "\r\n";
        r += "Content-Length: " + std::to_string(body.size()) + "\r\n";
        r += "Connection: close\r\n\r\n";
        r += body;
        return r;
    }

private:
    void serve() {
        while (!stopping_) {
            int client = ::accept(fd_, nullptr, nullptr);
            if (client < 0) return;
            std::string request;
            char buf[4096];
            while (request.find("\r\n\r\n") == std::string::npos) {
                ssize_t n = ::read(client, buf, sizeof(buf));
                if (n <= 0) break;
                request.append(buf, static_cast<std::size_t>(n));
            }
            ++requests_;
            std::string reply = handler_(request);
            std::size_t off = 0;
            while (off < reply.size()) {
                ssize_t n = ::write(client, reply.data() + off, reply.size() - off);
                if (n <= 0) break;
                off += static_cast<std::size_t>(n);
            }
            ::close(client);
        }
    }

    std::function<std::string(const std::string&)> handler_;
    std::vector<std::string> canned_;
    std::size_t next_ = 0;
    std::mutex mu_;
    int fd_ = -1;
    int port_ = 0;
    std::thread thread_;
    std::atomic<bool> stopping_{false};
    std::atomic<int> requests_{0};
};

} // namespace testsupport
