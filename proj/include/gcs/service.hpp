#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>

namespace gcs {

struct ServiceOptions {
    std::chrono::seconds idle_timeout{1800};
};

struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

// In-memory navigation sessions behind a JSON HTTP API.
class NavService {
public:
    explicit NavService(ServiceOptions opt = {});
    ~NavService();
    NavService(const NavService&) = delete;
    NavService& operator=(const NavService&) = delete;

    // Routing without sockets; the HTTP server forwards every request here.
    HttpReply handle(const std::string& method, const std::string& path,
                     const std::map<std::string, std::string>& query, const std::string& body);

    // Returns the bound port, or -1.
    int bind(const std::string& host, int port = 0);
    // Blocks until stop().
    bool listen_after_bind();
    bool listen(const std::string& host, int port);
    void stop();
    void wait_until_ready();

    size_t session_count();
    // Drops sessions idle for longer than the timeout; returns how many went.
    size_t evict_idle();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace gcs
