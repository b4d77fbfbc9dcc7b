#pragma once

#include <memory>
#include <string>

#include "revex/api_service.hpp"

namespace revex {

/// HTTP front end for ApiService: every /api/* request is forwarded as
/// (method, path, query parameters, body) and answered with JSON.
class HttpServer {
public:
    explicit HttpServer(ApiService& service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and serves until stop(). Port 0 picks a free port; see port().
    void listen(const std::string& host, int port);
    /// Binds without serving; returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves on the socket from bind(); blocks.
    void serve();
    void stop();
    bool running() const;
    int port() const noexcept { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace revex
