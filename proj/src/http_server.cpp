#include "gwpcor/service.hpp"

#include <filesystem>

#include <httplib.h>

namespace gwpcor {

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;

    explicit Impl(Service& s) : service(s) {}

    void dispatch(const httplib::Request& req, httplib::Response& res)
    {
        HttpRequest request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [key, value] : req.params) request.query.emplace(key, value);
        request.content_type = req.get_header_value("Content-Type");
        request.body = req.body;

        const HttpResponse response = service.handle(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    }
};

HttpServer::HttpServer(Service& service, std::string static_dir) : impl_(std::make_unique<Impl>(service))
{
    auto& server = impl_->server;
    if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) {
        server.set_mount_point("/", static_dir);
    }
    // Let oversized uploads reach the service so they get a JSON 413.
    server.set_payload_max_length(service.config().max_body_bytes + (1u << 20));
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(service.config().timeout).count();
    server.set_read_timeout(seconds);
    server.set_write_timeout(seconds);

    auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->dispatch(req, res); };
    server.Get(".*", handler);
    server.Post(".*", handler);
}

HttpServer::~HttpServer() = default;

std::optional<int> HttpServer::bind(const std::string& host, int port)
{
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) return std::nullopt;
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) return std::nullopt;
    return port;
}

bool HttpServer::listen_after_bind()
{
    return impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    impl_->server.stop();
}

} // namespace gwpcor
