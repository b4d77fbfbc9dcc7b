#include "revex/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "revex/error.hpp"
#include "revex/labeling.hpp"
#include "revex/query.hpp"

namespace revex {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(name) + ": " + e.what());
    } catch (const std::exception& e) {
        throw RuntimeError(std::string(name) + ": " + e.what());
    }
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

}  // namespace

TreeArtifact build_tree_artifact(const std::string& entity, std::span<const std::size_t> members,
                                 const IndexArtifacts& index, const TermStatistics& stats) {
    TreeArtifact t;
    t.entity = entity;
    t.tree = build_hierarchy(index.vectors, members, index.sentiments, index.params.hierarchy);
    assign_labels(t.tree, index.vectors, index.schema.attributes, index.lda ? &*index.lda : nullptr, stats);
    t.tree.visit([&](const ClusterNode& n) {
        t.summaries.emplace(format_path(n.path), summarize_cluster(n.members, stats, index.vectors, index.sentiments,
                                                                   index.schema.attributes, index.params.summary));
    });
    return t;
}

std::vector<std::string> precompute_entities(const Corpus& corpus, std::size_t limit) {
    std::vector<std::size_t> order(corpus.entities().size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return corpus.entities()[a].review_count > corpus.entities()[b].review_count;
    });
    std::vector<std::string> out;
    for (std::size_t i : order) {
        if (out.size() >= limit) break;
        if (corpus.entities()[i].review_count == 0) break;
        out.push_back(corpus.entities()[i].id);
    }
    return out;
}

IndexArtifacts build_index(const PipelineConfig& config, std::vector<std::string>* warnings) {
    validate_config(config);
    IndexArtifacts index;
    index.params = config.build;

    index.corpus = stage("corpus", [&] { return load_corpus(config.reviews, config.entities); });
    if (index.corpus.empty()) throw ValidationError("corpus: no reviews in " + config.reviews.string());
    index.lexicon = stage("featurize", [&] {
        return config.lexicon_path ? SentimentLexicon::load(*config.lexicon_path) : SentimentLexicon::builtin();
    });

    stage("featurize", [&] {
        if (config.build.mode == FeatureMode::Extraction) {
            index.schema = load_schema(*config.schema, true);
            const auto records = load_extractions(*config.extractions, index.schema, index.corpus);
            index.vectors = vectors_from_extractions(records, index.schema, index.corpus);
            if (warnings) {
                std::vector<bool> seen(index.schema.attributes.size(), false);
                for (const auto& r : records) seen[*index.schema.index_of(r.attribute)] = true;
                for (std::size_t a = 0; a < seen.size(); ++a) {
                    if (!seen[a]) {
                        warnings->push_back("attribute " + index.schema.attributes[a] +
                                            " has no extraction records; it is absent for every review");
                    }
                }
            }
        } else {
            index.lda = fit_lda(index.corpus, config.build.lda);
            std::vector<std::size_t> fallback;
            index.vectors = topic_vectors(*index.lda, index.corpus, config.build.lda, &fallback);
            index.schema.attributes = topic_names(index.lda->n_topics());
            if (warnings && !fallback.empty()) {
                warnings->push_back(std::to_string(fallback.size()) +
                                    " reviews had no in-vocabulary tokens and received uniform topic vectors");
            }
        }
        index.sentiments = review_sentiments(index.corpus, index.vectors, index.lexicon);
    });

    stage("cluster", [&] {
        const TermStatistics stats(index.corpus);
        const auto rows = all_rows(index.corpus.size());
        index.trees.push_back(build_tree_artifact(kAllEntities, rows, index, stats));
        if (index.corpus.has_entity_info()) {
            for (const auto& entity : precompute_entities(index.corpus, config.build.entity_precompute_limit)) {
                const auto members = index.corpus.reviews_of(entity);
                index.trees.push_back(build_tree_artifact(entity, members, index, stats));
            }
        }
    });
    return index;
}

PipelineResult preprocess(const PipelineConfig& config) {
    PipelineResult result;
    result.artifacts = build_index(config, &result.warnings);
    result.index_dir = config.index_dir;
    stage("index", [&] { return save_index(result.index_dir, result.artifacts); });
    return result;
}

PipelineResult iterate(const PipelineConfig& config, const fs::path& new_schema,
                       const std::optional<fs::path>& extractions) {
    if (config.build.mode != FeatureMode::Extraction) {
        throw ValidationError("iterate requires featurizer = extractions");
    }
    PipelineConfig next = config;
    next.schema = new_schema;
    if (extractions) next.extractions = *extractions;

    std::size_t version = latest_index_version(config.index_dir);
    if (fs::exists(config.index_dir / "manifest.json")) {
        try {
            const auto base = open_index(config.index_dir);
            version = std::max(version, base.index_version);
        } catch (const ValidationError&) {
            // an unreadable flat index still occupies version 1
            version = std::max<std::size_t>(version, 1);
        }
    }
    ++version;

    PipelineResult result;
    result.artifacts = build_index(next, &result.warnings);
    result.artifacts.index_version = version;
    result.artifacts.schema.version = "v" + std::to_string(version);
    result.index_dir = config.index_dir / ("v" + std::to_string(version));
    if (fs::exists(result.index_dir)) throw RuntimeError(result.index_dir.string() + " already exists");
    stage("index", [&] { return save_index(result.index_dir, result.artifacts); });
    return result;
}

std::vector<std::size_t> scope_members(const IndexArtifacts& index, const std::string& entity,
                                       const std::string& path) {
    const ClusterPath p = parse_path(path);
    std::optional<ClusterTree> built;
    const ClusterTree* tree = nullptr;
    if (const auto* t = index.tree_for(entity)) {
        tree = &t->tree;
    } else {
        if (!index.corpus.find_entity(entity)) throw NotFoundError("unknown entity '" + entity + "'");
        const auto members = index.corpus.reviews_of(entity);
        if (members.empty()) {
            if (!p.empty()) throw NotFoundError("no cluster at path '" + path + "'");
            return {};
        }
        built = build_hierarchy(index.vectors, members, index.sentiments, index.params.hierarchy);
        tree = &*built;
    }
    const ClusterNode* node = tree->find(p);
    if (!node) throw NotFoundError("no cluster at path '" + path + "'");
    return node->members;
}

std::vector<std::size_t> run_script(const IndexArtifacts& index, const std::string& script,
                                    std::span<const std::size_t> scope) {
    std::vector<query::Command> history;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < script.size()) {
        auto nl = script.find('\n', start);
        if (nl == std::string::npos) nl = script.size();
        std::string line = script.substr(start, nl - start);
        start = nl + 1;
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (line.back() == '\r') line.pop_back();
        try {
            history.push_back(query::parse(line, index.schema.attributes));
        } catch (const query::ParseError& e) {
            throw query::ParseError("line " + std::to_string(line_no) + ": " + e.detail(), e.position());
        }
    }
    const query::ReviewStore store(index.corpus, index.vectors, index.sentiments);
    return query::evaluate_remote(history, scope, store);
}

}  // namespace revex
