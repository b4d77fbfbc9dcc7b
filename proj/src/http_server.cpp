#include "revex/http_server.hpp"

#include <httplib.h>

#include "revex/error.hpp"

namespace revex {

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(ApiService& service) : impl_(std::make_unique<Impl>()) {
    auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        ApiService::Params params;
        for (const auto& [k, v] : req.params) params.emplace(k, v);
        const ApiResponse out = service.handle(req.method, req.path, params, req.body);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    };
    // no SO_REUSEPORT: a second server on a busy port must fail to bind
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    impl_->server.Get(R"(/api/.*)", forward);
    impl_->server.Post(R"(/api/.*)", forward);
    impl_->server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(nlohmann::json{{"error", {{"kind", "runtime"}, {"message", message}}}}.dump(),
                        "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
    } else {
        port_ = impl_->server.bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) throw RuntimeError("cannot bind " + host + ":" + std::to_string(port));
    return port_;
}

void HttpServer::serve() {
    if (!impl_->server.listen_after_bind()) throw RuntimeError("server stopped with an error");
}

void HttpServer::listen(const std::string& host, int port) {
    bind(host, port);
    serve();
}

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace revex
