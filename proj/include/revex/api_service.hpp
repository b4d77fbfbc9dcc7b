#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revex/index_store.hpp"
#include "revex/query.hpp"
#include "revex/summarize.hpp"

namespace revex {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

struct ApiOptions {
    std::chrono::seconds session_ttl{3600};
    std::size_t default_page_size = 10;
    std::size_t max_page_size = 1000;
    std::size_t suggestion_count = 20;
    /// Replaceable for tests of session expiry.
    std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

/// JSON API over one immutable index snapshot. Transport independent: the
/// HTTP layer only forwards method, path, query parameters and body.
///
/// Thread safe. Reads share the snapshot; each session is mutated under its
/// own lock; lazily built entity trees are cached.
class ApiService {
public:
    using Params = std::map<std::string, std::string>;

    ApiService(IndexArtifacts index, std::filesystem::path index_dir, ApiOptions options = {});
    ~ApiService();

    ApiResponse handle(const std::string& method, const std::string& path, const Params& params,
                       const std::string& body);

    const IndexArtifacts& index() const noexcept { return index_; }

    nlohmann::json info() const;
    nlohmann::json entities() const;
    nlohmann::json clusters(const std::string& entity, const std::string& path);
    nlohmann::json summary(const std::string& entity, const std::string& path,
                           const std::optional<std::string>& compare);
    nlohmann::json reviews(const std::string& entity, const std::string& path,
                           const std::optional<std::string>& session, std::size_t offset,
                           std::optional<std::size_t> limit);
    nlohmann::json post_command(const nlohmann::json& request);
    nlohmann::json remote_run(const nlohmann::json& request);
    nlohmann::json schema() const;
    nlohmann::json save_schema(const nlohmann::json& request);
    nlohmann::json suggest(const std::string& entity, const std::vector<std::string>& paths,
                           std::optional<std::size_t> limit);

    std::size_t session_count();

private:
    struct SessionEntry;

    std::shared_ptr<const TreeArtifact> tree(const std::string& entity);
    const ClusterNode& node(const TreeArtifact& tree, const std::string& path) const;
    std::shared_ptr<SessionEntry> find_session(const std::string& id);
    std::pair<std::string, std::shared_ptr<SessionEntry>> open_session(const nlohmann::json& request);
    nlohmann::json session_json(const std::string& id, const SessionEntry& entry) const;
    nlohmann::json review_json(std::size_t review) const;
    void expire_sessions();

    IndexArtifacts index_;
    std::filesystem::path index_dir_;
    ApiOptions options_;
    TermStatistics stats_;
    query::ReviewStore store_;

    std::mutex trees_mutex_;
    std::map<std::string, std::shared_ptr<const TreeArtifact>> trees_;

    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
    std::uint64_t session_counter_ = 0;
    std::uint64_t session_salt_ = 0;

    std::mutex export_mutex_;
};

}  // namespace revex
