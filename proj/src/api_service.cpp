#include "revex/api_service.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include "revex/error.hpp"
#include "revex/hierarchy.hpp"
#include "revex/kmeans.hpp"
#include "revex/pipeline.hpp"
#include "revex/rng.hpp"
#include "revex/text.hpp"

namespace revex {

using nlohmann::json;
namespace fs = std::filesystem;

struct ApiService::SessionEntry {
    std::mutex mutex;
    std::string entity;
    std::string path;
    query::Session session;
    std::chrono::steady_clock::time_point last_used;
};

namespace {

const char* kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return "validation";
        case ErrorKind::NotFound: return "not_found";
        case ErrorKind::Runtime: return "runtime";
    }
    return "runtime";
}

int status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return 400;
        case ErrorKind::NotFound: return 404;
        case ErrorKind::Runtime: return 500;
    }
    return 500;
}

std::string param(const ApiService::Params& params, const std::string& key, const std::string& fallback = {}) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::optional<std::string> optional_param(const ApiService::Params& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> size_param(const ApiService::Params& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end() || it->second.empty()) return std::nullopt;
    std::size_t value = 0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError(key + " must be a non-negative integer, got '" + s + "'");
    }
    return value;
}

std::vector<std::string> split_paths(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(s.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string string_field(const json& j, const char* key, const std::string& fallback = {}) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_string()) throw ValidationError(std::string("field ") + key + " must be a string");
    return j.at(key).get<std::string>();
}

json summary_view(const ClusterSummary& s, const std::string& path) {
    json j = summary_to_json(s);
    j["path"] = path;
    for (const char* key : {"top_words", "top_bigrams"}) {
        json terms = json::array();
        for (const auto& t : j[key]) terms.push_back({{"term", t[0]}, {"score", t[1]}});
        j[key] = terms;
    }
    if (!s.histograms.empty()) j["edges"] = s.histograms.front().edges();
    return j;
}

json node_view(const ClusterNode& n) {
    return {{"path", format_path(n.path)},
            {"size", n.size()},
            {"label", n.label},
            {"x", n.coord[0]},
            {"y", n.coord[1]},
            {"avg_sentiment", n.avg_sentiment},
            {"children", n.children.size()},
            {"leaf", n.is_leaf()}};
}

}  // namespace

ApiService::ApiService(IndexArtifacts index, fs::path index_dir, ApiOptions options)
    : index_(std::move(index)), index_dir_(std::move(index_dir)), options_(std::move(options)),
      stats_(index_.corpus), store_(index_.corpus, index_.vectors, index_.sentiments) {
    if (index_.trees.empty()) throw ValidationError("index has no cluster tree");
    for (const auto& t : index_.trees) {
        trees_.emplace(t.entity, std::shared_ptr<const TreeArtifact>(std::shared_ptr<void>(), &t));
    }
    if (!index_.corpus.has_entity_info()) trees_.emplace(kUnknownEntity, trees_.at(kAllEntities));
    session_salt_ = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
}

ApiService::~ApiService() = default;

ApiResponse ApiService::handle(const std::string& method, const std::string& path, const Params& params,
                               const std::string& body) {
    try {
        auto parse_body = [&] {
            try {
                return body.empty() ? json::object() : json::parse(body);
            } catch (const json::parse_error& e) {
                throw ValidationError(std::string("request body is not valid JSON: ") + e.what());
            }
        };
        const std::string entity = param(params, "entity", kAllEntities);
        if (method == "GET") {
            if (path == "/api/info") return {200, info()};
            if (path == "/api/entities") return {200, entities()};
            if (path == "/api/clusters") return {200, clusters(entity, param(params, "path"))};
            if (path == "/api/summary") {
                return {200, summary(entity, param(params, "path"), optional_param(params, "compare"))};
            }
            if (path == "/api/reviews") {
                return {200, reviews(entity, param(params, "path"), optional_param(params, "session"),
                                     size_param(params, "offset").value_or(0), size_param(params, "limit"))};
            }
            if (path == "/api/schema") return {200, schema()};
            if (path == "/api/schema/suggest") {
                return {200, suggest(entity, split_paths(param(params, "paths")), size_param(params, "limit"))};
            }
        } else if (method == "POST") {
            if (path == "/api/commands") return {200, post_command(parse_body())};
            if (path == "/api/commands/remote") return {200, remote_run(parse_body())};
            if (path == "/api/schema") return {200, save_schema(parse_body())};
        }
        return {404, {{"error", {{"kind", "not_found"}, {"message", "no route " + method + " " + path}}}}};
    } catch (const query::ParseError& e) {
        return {400, {{"error",
                       {{"kind", "parse"}, {"message", e.what()}, {"detail", e.detail()}, {"position", e.position()}}}}};
    } catch (const Error& e) {
        return {status_of(e.kind()), {{"error", {{"kind", kind_name(e.kind())}, {"message", e.what()}}}}};
    } catch (const json::exception& e) {
        return {400, {{"error", {{"kind", "validation"}, {"message", e.what()}}}}};
    } catch (const std::exception& e) {
        return {500, {{"error", {{"kind", "runtime"}, {"message", e.what()}}}}};
    }
}

json ApiService::info() const {
    return {{"format_version", index_.format_version},
            {"index_version", index_.index_version},
            {"feature_mode", std::string(to_string(index_.vectors.mode()))},
            {"review_count", index_.corpus.size()},
            {"entity_count", index_.corpus.entities().size()},
            {"entities_enabled", index_.corpus.has_entity_info()},
            {"attributes", index_.schema.attributes}};
}

json ApiService::entities() const {
    const auto& attrs = index_.schema.attributes;
    const auto& root = index_.trees.front().tree.root();
    json list = json::array();
    for (const auto& e : index_.corpus.entities()) {
        const auto members = index_.corpus.reviews_of(e.id);
        json means = json::object();
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            double sum = 0.0;
            std::size_t n = 0;
            for (auto m : members) {
                if (const auto v = index_.vectors.get(m, a)) {
                    sum += *v;
                    ++n;
                }
            }
            means[attrs[a]] = n ? json(sum / static_cast<double>(n)) : json(nullptr);
        }
        json rec = {{"id", e.id}, {"name", e.name}, {"review_count", e.review_count}, {"mean_scores", means}};
        if (e.coordinates) rec["coordinates"] = {{"lat", e.coordinates->lat}, {"lon", e.coordinates->lon}};
        if (e.address) rec["address"] = *e.address;
        if (e.image_url) rec["image_url"] = *e.image_url;
        // treemap grouping: the top-level cluster nearest to the entity's mean vector
        if (!members.empty() && !root.children.empty()) {
            const auto mean = mean_vector(index_.vectors, members);
            std::size_t best = 0;
            double best_d = squared_distance(mean, root.children[0].centroid);
            for (std::size_t c = 1; c < root.children.size(); ++c) {
                const double d = squared_distance(mean, root.children[c].centroid);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            rec["group"] = format_path(root.children[best].path);
        }
        list.push_back(std::move(rec));
    }
    return {{"entities_enabled", index_.corpus.has_entity_info()}, {"attributes", attrs}, {"entities", list}};
}

std::shared_ptr<const TreeArtifact> ApiService::tree(const std::string& entity) {
    std::lock_guard lock(trees_mutex_);
    if (auto it = trees_.find(entity); it != trees_.end()) return it->second;
    if (!index_.corpus.find_entity(entity)) throw NotFoundError("unknown entity '" + entity + "'");
    const auto members = index_.corpus.reviews_of(entity);
    if (members.empty()) throw NotFoundError("entity '" + entity + "' has no reviews");
    auto built = std::make_shared<const TreeArtifact>(build_tree_artifact(entity, members, index_, stats_));
    trees_.emplace(entity, built);
    return built;
}

const ClusterNode& ApiService::node(const TreeArtifact& tree, const std::string& path) const {
    const auto* n = tree.tree.find(parse_path(path));
    if (!n) throw NotFoundError("no cluster at path '" + path + "'");
    return *n;
}

json ApiService::clusters(const std::string& entity, const std::string& path) {
    const auto t = tree(entity);
    const auto& n = node(*t, path);
    json children = json::array();
    for (const auto& c : n.children) children.push_back(node_view(c));
    return {{"entity", entity}, {"path", path}, {"node", node_view(n)}, {"nodes", children}};
}

json ApiService::summary(const std::string& entity, const std::string& path,
                         const std::optional<std::string>& compare) {
    const auto t = tree(entity);
    auto lookup = [&](const std::string& p) -> const ClusterSummary& {
        node(*t, p);
        return t->summaries.at(p);
    };
    const auto& first = lookup(path);
    json out = {{"entity", entity},
                {"dataset", summary_view(index_.trees.front().summaries.at(""), "")},
                {"clusters", json::array({summary_view(first, path)})}};
    if (compare) {
        const auto& second = lookup(*compare);
        out["clusters"].push_back(summary_view(second, *compare));
        json distances = json::array();
        for (const auto& d : top_divergent_attributes(first, second, 0)) {
            distances.push_back({{"attribute", d.attribute}, {"distance", d.distance}});
        }
        out["distances"] = distances;
    }
    return out;
}

json ApiService::review_json(std::size_t i) const {
    const auto& r = index_.corpus.reviews()[i];
    json attrs = json::array();
    for (std::size_t a = 0; a < index_.schema.attributes.size(); ++a) {
        if (const auto v = index_.vectors.get(i, a)) attrs.push_back({{"attribute", index_.schema.attributes[a]}, {"score", *v}});
    }
    json j = {{"id", r.id},
              {"entity_id", r.entity_id},
              {"text", r.text},
              {"sentiment", index_.sentiments[i]},
              {"length", text::char_count(r.text)},
              {"attributes", attrs}};
    if (r.rating) j["rating"] = *r.rating;
    if (r.date) j["date"] = *r.date;
    return j;
}

json ApiService::reviews(const std::string& entity, const std::string& path,
                         const std::optional<std::string>& session, std::size_t offset,
                         std::optional<std::size_t> limit) {
    const std::size_t page = std::min(limit.value_or(options_.default_page_size), options_.max_page_size);
    std::vector<std::size_t> ids;
    json color = nullptr;
    std::optional<query::AttributeRef> color_ref;
    if (session && !session->empty()) {
        const auto entry = find_session(*session);
        std::lock_guard lock(entry->mutex);
        ids = entry->session.working_set;
        color_ref = entry->session.color;
    } else {
        const auto t = tree(entity);
        ids = node(*t, path).members;
    }
    json list = json::array();
    for (std::size_t k = offset; k < ids.size() && k < offset + page; ++k) {
        json r = review_json(ids[k]);
        if (color_ref) {
            const auto v = store_.value(ids[k], *color_ref);
            r["color_value"] = v ? json(*v) : json(nullptr);
        }
        list.push_back(std::move(r));
    }
    if (color_ref) color = color_ref->name;
    return {{"total", ids.size()}, {"offset", offset}, {"limit", page}, {"color", color}, {"reviews", list}};
}

void ApiService::expire_sessions() {
    const auto now = options_.clock();
    std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_used > options_.session_ttl; });
}

std::size_t ApiService::session_count() {
    std::lock_guard lock(sessions_mutex_);
    expire_sessions();
    return sessions_.size();
}

std::shared_ptr<ApiService::SessionEntry> ApiService::find_session(const std::string& id) {
    std::lock_guard lock(sessions_mutex_);
    expire_sessions();
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFoundError("unknown or expired session '" + id + "'");
    it->second->last_used = options_.clock();
    return it->second;
}

std::pair<std::string, std::shared_ptr<ApiService::SessionEntry>> ApiService::open_session(const json& request) {
    const std::string id = string_field(request, "session");
    std::optional<std::pair<std::string, std::string>> scope;
    if (request.contains("scope") && !request.at("scope").is_null()) {
        const auto& s = request.at("scope");
        if (!s.is_object()) throw ValidationError("scope must be an object {entity, path}");
        scope.emplace(string_field(s, "entity", kAllEntities), string_field(s, "path"));
    }
    auto scope_ids = [&](const std::string& entity, const std::string& path) {
        const auto t = tree(entity);
        return node(*t, path).members;
    };
    if (!id.empty()) {
        auto entry = find_session(id);
        if (scope) {
            std::lock_guard lock(entry->mutex);
            if (scope->first != entry->entity || scope->second != entry->path) {
                entry->session = query::start_session(scope_ids(scope->first, scope->second));
                entry->entity = scope->first;
                entry->path = scope->second;
            }
        }
        return {id, entry};
    }
    const auto [entity, path] = scope.value_or(std::pair<std::string, std::string>{kAllEntities, ""});
    auto entry = std::make_shared<SessionEntry>();
    entry->entity = entity;
    entry->path = path;
    entry->session = query::start_session(scope_ids(entity, path));
    entry->last_used = options_.clock();
    std::lock_guard lock(sessions_mutex_);
    expire_sessions();
    char buf[17];
    const std::uint64_t raw = mix64(session_salt_ ^ ++session_counter_);
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(raw));
    sessions_.emplace(buf, entry);
    return {buf, entry};
}

json ApiService::session_json(const std::string& id, const SessionEntry& e) const {
    json history = json::array();
    for (const auto& c : e.session.history) history.push_back(c.source);
    return {{"session", id},
            {"scope", {{"entity", e.entity}, {"path", e.path}}},
            {"scope_size", e.session.initial.size()},
            {"size", e.session.working_set.size()},
            {"history", history},
            {"color", e.session.color ? json(e.session.color->name) : json(nullptr)}};
}

json ApiService::post_command(const json& request) {
    if (!request.is_object()) throw ValidationError("request body must be a JSON object");
    const std::string text = string_field(request, "command");
    const auto command = query::parse(text, index_.schema.attributes);
    const auto [id, entry] = open_session(request);
    std::lock_guard lock(entry->mutex);
    query::apply_in_place(entry->session, command, store_);
    return session_json(id, *entry);
}

json ApiService::remote_run(const json& request) {
    if (!request.is_object()) throw ValidationError("request body must be a JSON object");
    std::optional<std::vector<std::string>> wire;
    if (request.contains("history")) wire = request.at("history").get<std::vector<std::string>>();

    const std::string id = string_field(request, "session");
    if (id.empty()) {
        if (!wire) throw ValidationError("remote run needs a session or a history");
        std::string entity = kAllEntities;
        std::string path;
        if (request.contains("scope") && request.at("scope").is_object()) {
            entity = string_field(request.at("scope"), "entity", kAllEntities);
            path = string_field(request.at("scope"), "path");
        }
        const auto t = tree(entity);
        const auto& scope = node(*t, path).members;
        const auto ids = query::evaluate_remote(*wire, scope, index_.schema.attributes, store_);
        json out_ids = json::array();
        for (auto i : ids) out_ids.push_back(index_.corpus.reviews()[i].id);
        return {{"scope", {{"entity", entity}, {"path", path}}}, {"size", ids.size()}, {"ids", out_ids},
                {"history", *wire}};
    }

    const auto [session_id, entry] = open_session(request);
    std::lock_guard lock(entry->mutex);
    auto& s = entry->session;
    if (wire) {
        std::vector<query::Command> parsed;
        for (std::size_t i = 0; i < wire->size(); ++i) {
            try {
                parsed.push_back(query::parse((*wire)[i], index_.schema.attributes));
            } catch (const query::ParseError& e) {
                throw query::ParseError("history[" + std::to_string(i) + "]: " + e.detail(), e.position());
            }
        }
        auto fresh = query::start_session(s.initial);
        for (const auto& c : parsed) query::apply_in_place(fresh, c, store_);
        s = std::move(fresh);
    } else {
        s.working_set = query::evaluate_remote(s.history, s.initial, store_);
    }
    json out = session_json(session_id, *entry);
    json out_ids = json::array();
    for (auto i : s.working_set) out_ids.push_back(index_.corpus.reviews()[i].id);
    out["ids"] = out_ids;
    return out;
}

json ApiService::schema() const {
    return {{"version", index_.schema.version},
            {"feature_mode", std::string(to_string(index_.vectors.mode()))},
            {"attributes", index_.schema.attributes}};
}

json ApiService::save_schema(const json& request) {
    if (!request.is_object() || !request.contains("attributes") || !request.at("attributes").is_array()) {
        throw ValidationError("body must be {\"attributes\": [...]}");
    }
    std::string content;
    for (const auto& a : request.at("attributes")) {
        if (!a.is_string()) throw ValidationError("attributes must be strings");
        const auto s = a.get<std::string>();
        if (s.find_first_of("\n\r#") != std::string::npos) {
            throw ValidationError("attribute '" + s + "' contains a newline or '#'");
        }
        if (s.find_first_not_of(" \t") == std::string::npos) throw ValidationError("empty attribute name");
        content += s + "\n";
    }
    Schema parsed = parse_schema(content, true);
    const std::string text = format_schema(parsed);

    std::lock_guard lock(export_mutex_);
    const fs::path dir = index_dir_ / "exported_schemas";
    fs::create_directories(dir);
    fs::path file;
    for (std::size_t n = 1;; ++n) {
        file = dir / ("schema_v" + std::to_string(n) + ".txt");
        if (!fs::exists(file)) break;
    }
    write_file(file, text);
    return {{"file", file.string()}, {"attributes", parsed.attributes}, {"content", text}};
}

json ApiService::suggest(const std::string& entity, const std::vector<std::string>& paths,
                         std::optional<std::size_t> limit) {
    const auto t = tree(entity);
    std::vector<std::size_t> members;
    for (const auto& p : paths) {
        const auto& n = node(*t, p);
        members.insert(members.end(), n.members.begin(), n.members.end());
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    json list = json::array();
    for (const auto& term : tfidf_top_terms(stats_, members, limit.value_or(options_.suggestion_count), 1)) {
        const bool in_schema = index_.schema.index_of(term.term).has_value();
        list.push_back({{"term", term.term}, {"score", term.score}, {"in_schema", in_schema}});
    }
    return {{"entity", entity}, {"paths", paths}, {"schema", index_.schema.attributes}, {"suggestions", list}};
}

}  // namespace revex
