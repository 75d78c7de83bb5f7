#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "gwpcor/analysis.hpp"
#include "gwpcor/geodata.hpp"

namespace gwpcor {

struct ServiceConfig {
    std::size_t max_body_bytes = 64u << 20;
    std::chrono::milliseconds timeout{120'000};
    std::size_t dataset_capacity = 8;
    std::size_t analysis_capacity = 32;
    std::string tiles_url;
    int threads = 0;
};

struct HttpRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string content_type;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Least-recently-used map of immutable values.
template <typename Value>
class LruStore {
public:
    explicit LruStore(std::size_t capacity) : capacity_(capacity) {}

    void put(const std::string& key, std::shared_ptr<const Value> value)
    {
        std::lock_guard lock(mutex_);
        order_.push_front(key);
        entries_[key] = {std::move(value), order_.begin()};
        while (entries_.size() > capacity_) {
            entries_.erase(order_.back());
            order_.pop_back();
        }
    }

    std::shared_ptr<const Value> get(const std::string& key)
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        order_.splice(order_.begin(), order_, it->second.position);
        return it->second.value;
    }

    std::size_t size() const
    {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    struct Entry {
        std::shared_ptr<const Value> value;
        std::list<std::string>::iterator position;
    };
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<std::string> order_;
    std::unordered_map<std::string, Entry> entries_;
};

/// A finished analysis, holding its dataset alive independently of the store.
struct StoredAnalysis {
    std::shared_ptr<const Dataset> dataset;
    AnalysisSpec spec;
    AnalysisOutcome outcome;
    NamePair displayed;
};

/// Request router for the dataset/analysis API. Thread-safe; transport
/// agnostic so that tests and the HTTP bridge share one code path.
class Service {
public:
    explicit Service(ServiceConfig config = {});

    HttpResponse handle(const HttpRequest& request);

    HttpResponse upload_dataset(const HttpRequest& request);
    HttpResponse dataset_info(const std::string& id);
    HttpResponse list_variables(const std::string& id);
    HttpResponse run_analysis(const std::string& body);
    HttpResponse get_result(const std::string& id, const std::optional<std::string>& pair);
    HttpResponse get_scatter(const std::string& id, const std::optional<std::string>& pair);
    HttpResponse get_config() const;

    const ServiceConfig& config() const noexcept { return config_; }
    /// Number of compute_surface runs so far.
    std::size_t engine_invocations() const noexcept { return engine_invocations_.load(); }

private:
    std::shared_ptr<const StoredAnalysis> find_analysis(const std::string& id);
    NamePair displayed_pair(const StoredAnalysis& analysis, const std::optional<std::string>& pair) const;

    ServiceConfig config_;
    LruStore<Dataset> datasets_;
    LruStore<StoredAnalysis> analyses_;
    std::atomic<std::size_t> next_id_{1};
    std::atomic<std::size_t> engine_invocations_{0};
};

/// HTTP status for a library error kind.
int http_status(ErrorKind kind);
HttpResponse error_response(int status, std::string_view kind, std::string_view message);

/// Binds a Service to a listening socket, optionally serving static UI assets at /.
class HttpServer {
public:
    HttpServer(Service& service, std::string static_dir = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; returns the bound port (useful with port 0) or nullopt on failure.
    std::optional<int> bind(const std::string& host, int port);
    /// Blocks until stop() is called.
    bool listen_after_bind();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace gwpcor
