#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revex/corpus.hpp"
#include "revex/featurize.hpp"
#include "revex/hierarchy.hpp"
#include "revex/lda.hpp"
#include "revex/summarize.hpp"

namespace revex {

/// Version of the on-disk layout this build reads and writes.
inline constexpr int kIndexFormatVersion = 1;
inline constexpr const char* kAllEntities = "all";

/// Parameters that shaped an index; kept in the manifest so trees for
/// further entities can be built later with identical settings.
struct BuildParams {
    FeatureMode mode = FeatureMode::Extraction;
    HierarchyParams hierarchy;
    SummaryOptions summary;
    LdaParams lda;
    std::size_t entity_precompute_limit = 50;

    bool operator==(const BuildParams& o) const;
};

/// Cluster tree plus per-node summaries keyed by dot path ("" is the root).
struct TreeArtifact {
    std::string entity = kAllEntities;
    ClusterTree tree;
    std::map<std::string, ClusterSummary> summaries;

    bool operator==(const TreeArtifact&) const = default;
};

struct IndexArtifacts {
    int format_version = kIndexFormatVersion;
    std::size_t index_version = 1;
    BuildParams params;
    Corpus corpus;
    Schema schema;                        // attribute names (topic names in topic mode)
    FeatureMatrix vectors;
    std::vector<double> sentiments;
    SentimentLexicon lexicon;
    std::optional<LdaModel> lda;
    std::vector<TreeArtifact> trees;      // trees[0] covers every review

    const TreeArtifact* tree_for(const std::string& entity) const;
    bool operator==(const IndexArtifacts&) const = default;
};

/// Writes manifest.json plus one file per artifact kind. Numeric arrays are
/// little-endian with a shape header. Returns the manifest text.
std::string save_index(const std::filesystem::path& dir, const IndexArtifacts& artifacts);

/// Loads a snapshot written by save_index. Throws NotFoundError when there is
/// no manifest and ValidationError on a format version mismatch.
IndexArtifacts open_index(const std::filesystem::path& dir);

/// `root` itself when it holds a manifest and has no version directories,
/// otherwise the highest root/vN. `version` selects root/v<version>.
std::filesystem::path resolve_index_dir(const std::filesystem::path& root,
                                        std::optional<std::size_t> version = std::nullopt);

nlohmann::json summary_to_json(const ClusterSummary& summary);
ClusterSummary summary_from_json(const nlohmann::json& json);

/// Highest N among root/vN directories (0 when none).
std::size_t latest_index_version(const std::filesystem::path& root);

namespace binary {

enum class DType : std::uint8_t { F64 = 1, U8 = 2, U32 = 3 };

struct Array {
    DType dtype = DType::F64;
    std::vector<std::uint64_t> shape;
    std::vector<double> f64;
    std::vector<std::uint8_t> u8;
    std::vector<std::uint32_t> u32;
};

std::string encode(const Array& array);
Array decode(const std::string& bytes, const std::string& name);

}  // namespace binary

}  // namespace revex
