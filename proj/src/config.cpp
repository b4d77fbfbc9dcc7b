#include "revex/config.hpp"

#include <charconv>
#include <cstdlib>

#include "revex/error.hpp"

namespace revex {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc() || ptr != end) {
        throw ValidationError("config key " + key + ": expected a number, got '" + value + "'");
    }
    return out;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    if (!value.empty() && value[0] == '-') {
        throw ValidationError("config key " + key + ": must be non-negative, got '" + value + "'");
    }
    return parse_number<std::size_t>(key, value);
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    if (p.is_relative() && !base.empty()) p = base / p;
    return p.lexically_normal();
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "reviews",  "entities",   "schema",     "extractions",      "lexicon_path",     "index_dir",
        "featurizer", "n_topics", "alpha",      "beta",             "iterations",       "seed",
        "k1",       "k2",         "depth",      "min_cluster_size", "kmeans_max_iter",  "kmeans_tol",
        "n_top",    "bins",       "entity_precompute_limit",        "host",             "port",
    };
    return keys;
}

void set_config_value(PipelineConfig& c, const std::string& key, const std::string& value, const fs::path& base) {
    auto& h = c.build.hierarchy;
    if (key == "reviews") {
        c.reviews = resolve(base, value);
    } else if (key == "entities") {
        c.entities = resolve(base, value);
    } else if (key == "schema") {
        c.schema = resolve(base, value);
    } else if (key == "extractions") {
        c.extractions = resolve(base, value);
    } else if (key == "lexicon_path") {
        c.lexicon_path = resolve(base, value);
    } else if (key == "index_dir") {
        c.index_dir = resolve(base, value);
    } else if (key == "featurizer") {
        if (value == "lda") {
            c.build.mode = FeatureMode::Topic;
        } else if (value == "extractions") {
            c.build.mode = FeatureMode::Extraction;
        } else {
            throw ValidationError("config key featurizer: expected lda or extractions, got '" + value + "'");
        }
    } else if (key == "n_topics") {
        c.build.lda.n_topics = parse_size(key, value);
    } else if (key == "alpha") {
        c.build.lda.alpha = parse_number<double>(key, value);
    } else if (key == "beta") {
        c.build.lda.beta = parse_number<double>(key, value);
    } else if (key == "iterations") {
        c.build.lda.iterations = parse_size(key, value);
    } else if (key == "seed") {
        h.seed = parse_number<std::uint64_t>(key, value);
        c.build.lda.seed = h.seed;
    } else if (key == "k1") {
        h.k1 = parse_size(key, value);
    } else if (key == "k2") {
        h.k2 = parse_size(key, value);
    } else if (key == "depth") {
        h.depth = parse_size(key, value);
    } else if (key == "min_cluster_size") {
        h.min_cluster_size = parse_size(key, value);
    } else if (key == "kmeans_max_iter") {
        h.kmeans_max_iter = parse_size(key, value);
    } else if (key == "kmeans_tol") {
        h.kmeans_tol = parse_number<double>(key, value);
    } else if (key == "n_top") {
        c.build.summary.n_top = parse_size(key, value);
    } else if (key == "bins") {
        c.build.summary.bins = parse_size(key, value);
    } else if (key == "entity_precompute_limit") {
        c.build.entity_precompute_limit = parse_size(key, value);
    } else if (key == "host") {
        c.host = value;
    } else if (key == "port") {
        const int port = parse_number<int>(key, value);
        if (port < 0 || port > 65535) throw ValidationError("config key port: out of range: " + value);
        c.port = port;
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

PipelineConfig parse_config(const std::string& content, const fs::path& base) {
    PipelineConfig c;
    c.index_dir = resolve(base, "index");
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= content.size()) {
        auto nl = content.find('\n', start);
        if (nl == std::string::npos) nl = content.size();
        std::string line = content.substr(start, nl - start);
        start = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            set_config_value(c, key, value, base);
        } catch (const ValidationError& e) {
            throw ValidationError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) throw NotFoundError("config file " + path.string() + " not found");
    return parse_config(read_file(path), path.parent_path());
}

void apply_environment(PipelineConfig& c) {
    if (const char* v = std::getenv("INDEX_DIR"); v && *v) c.index_dir = v;
    if (const char* v = std::getenv("HOST"); v && *v) c.host = v;
    if (const char* v = std::getenv("PORT"); v && *v) set_config_value(c, "port", v);
}

void validate_config(const PipelineConfig& c) {
    const auto& h = c.build.hierarchy;
    if (c.reviews.empty()) throw ValidationError("config: reviews path is required");
    if (c.build.mode == FeatureMode::Extraction) {
        if (!c.schema) throw ValidationError("config: featurizer=extractions requires a schema path");
        if (!c.extractions) throw ValidationError("config: featurizer=extractions requires an extractions path");
    } else if (c.build.lda.n_topics < 2) {
        throw ValidationError("config: featurizer=lda requires n_topics >= 2");
    }
    if (c.build.mode == FeatureMode::Topic && (c.build.lda.beta <= 0.0 || c.build.lda.iterations == 0)) {
        throw ValidationError("config: lda needs beta > 0 and iterations >= 1");
    }
    if (h.k1 < 1 || h.k2 < 1 || h.depth < 1) throw ValidationError("config: k1, k2 and depth must be >= 1");
    if (c.build.summary.bins < 1) throw ValidationError("config: bins must be >= 1");
    if (!(h.kmeans_tol >= 0.0)) throw ValidationError("config: kmeans_tol must be >= 0");
}

}  // namespace revex
