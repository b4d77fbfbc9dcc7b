#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "revex/index_store.hpp"

namespace revex {

/// Everything the pipeline and the server read from the configuration file.
/// Relative paths are resolved against the directory holding the file.
struct PipelineConfig {
    std::filesystem::path reviews;
    std::optional<std::filesystem::path> entities;
    std::optional<std::filesystem::path> schema;
    std::optional<std::filesystem::path> extractions;
    std::optional<std::filesystem::path> lexicon_path;
    std::filesystem::path index_dir = "index";
    BuildParams build;
    std::string host = "127.0.0.1";
    int port = 8080;
};

/// Flat `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed values raise ValidationError naming the line.
PipelineConfig parse_config(const std::string& content, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Sets one key as if it had appeared in the file.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});

/// INDEX_DIR, PORT and HOST from the environment take precedence over the file.
void apply_environment(PipelineConfig& config);

/// Invariants that do not depend on the file system: featurizer inputs,
/// n_topics >= 2 for lda, k1/k2/depth >= 1, bins >= 1.
void validate_config(const PipelineConfig& config);

/// Keys accepted by parse_config, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace revex
