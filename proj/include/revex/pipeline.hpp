#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revex/config.hpp"
#include "revex/index_store.hpp"
#include "revex/summarize.hpp"

namespace revex {

struct PipelineResult {
    std::filesystem::path index_dir;
    IndexArtifacts artifacts;
    std::vector<std::string> warnings;
};

/// Featurize → cluster → label → summarize, in memory. Errors carry the
/// failing stage as a prefix ("featurize: ...").
IndexArtifacts build_index(const PipelineConfig& config, std::vector<std::string>* warnings = nullptr);

/// Cluster tree, labels and node summaries over `members`.
TreeArtifact build_tree_artifact(const std::string& entity, std::span<const std::size_t> members,
                                 const IndexArtifacts& index, const TermStatistics& stats);

/// Entities that get a precomputed tree: by review count descending, ties in
/// entity order, at most `limit`, never empty ones.
std::vector<std::string> precompute_entities(const Corpus& corpus, std::size_t limit);

/// Builds the index and writes it to config.index_dir.
PipelineResult preprocess(const PipelineConfig& config);

/// Rebuilds with a new schema (and optionally new extraction records) into
/// index_dir/v<n>, n one past the newest existing version. Earlier versions
/// are left untouched. Attributes without any record only raise a warning.
PipelineResult iterate(const PipelineConfig& config, const std::filesystem::path& new_schema,
                       const std::optional<std::filesystem::path>& extractions = std::nullopt);

/// Review positions addressed by (entity, path). Entity "all" is the whole
/// corpus; trees missing from the index are built on the fly.
std::vector<std::size_t> scope_members(const IndexArtifacts& index, const std::string& entity,
                                       const std::string& path);

/// Replays a newline-separated command script ('#' comments and blank lines
/// skipped) over the scope. Parse errors name the script line.
std::vector<std::size_t> run_script(const IndexArtifacts& index, const std::string& script,
                                    std::span<const std::size_t> scope);

}  // namespace revex
