#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace revex {

inline constexpr const char* kUnknownEntity = "unknown";

struct Review {
    std::string id;
    std::string entity_id;
    std::string text;
    std::optional<double> rating;
    std::optional<std::string> date;  // ISO-8601 calendar date

    bool operator==(const Review&) const = default;
};

struct Coordinates {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const Coordinates&) const = default;
};

struct Entity {
    std::string id;
    std::string name;
    std::optional<Coordinates> coordinates;
    std::optional<std::string> address;
    std::optional<std::string> image_url;
    std::size_t review_count = 0;  // derived

    bool operator==(const Entity&) const = default;
};

/// Reviews in ingestion order plus the entities they belong to.
///
/// Review positions (`std::size_t` indices into `reviews()`) are the stable
/// handle used by every downstream artifact; ingestion order is the default
/// result order everywhere.
class Corpus {
public:
    Corpus() = default;

    /// Validates ids, links reviews to entities and derives review counts.
    /// Reviews pointing at an entity that is not listed are re-homed under
    /// the "unknown" sentinel. When `entities` is empty the corpus runs
    /// without entity information.
    Corpus(std::vector<Review> reviews, std::vector<Entity> entities);

    const std::vector<Review>& reviews() const noexcept { return reviews_; }
    const std::vector<Entity>& entities() const noexcept { return entities_; }
    std::size_t size() const noexcept { return reviews_.size(); }
    bool empty() const noexcept { return reviews_.empty(); }

    /// False when the corpus was loaded without an entity file.
    bool has_entity_info() const noexcept { return has_entity_info_; }

    std::optional<std::size_t> find_review(const std::string& id) const;
    std::optional<std::size_t> find_entity(const std::string& id) const;

    /// Review indices of one entity, ingestion order.
    std::vector<std::size_t> reviews_of(const std::string& entity_id) const;

    bool operator==(const Corpus& other) const {
        return reviews_ == other.reviews_ && entities_ == other.entities_ &&
               has_entity_info_ == other.has_entity_info_;
    }

private:
    std::vector<Review> reviews_;
    std::vector<Entity> entities_;
    bool has_entity_info_ = false;
    std::unordered_map<std::string, std::size_t> review_pos_;
    std::unordered_map<std::string, std::size_t> entity_pos_;
};

struct Schema {
    std::vector<std::string> attributes;
    std::string version;

    std::optional<std::size_t> index_of(const std::string& attribute) const;
    bool operator==(const Schema&) const = default;
};

struct ExtractionRecord {
    std::string review_id;
    std::string attribute;
    double score = 0.0;

    bool operator==(const ExtractionRecord&) const = default;
};

enum class ReviewFormat { Jsonl, Csv };

/// Picks the format from the file extension (".csv" → Csv, otherwise Jsonl).
ReviewFormat guess_review_format(const std::filesystem::path& path);

std::vector<Review> load_reviews(const std::filesystem::path& path, ReviewFormat format);
std::vector<Entity> load_entities(const std::filesystem::path& path);

/// Reviews plus optional entity file.
Corpus load_corpus(const std::filesystem::path& reviews_path,
                   const std::optional<std::filesystem::path>& entities_path);

/// Newline separated attribute names; '#' starts a comment. Names are
/// trimmed and lowercased. Duplicates are an error, and so is an empty list
/// when `require_nonempty` is set (extraction mode).
Schema parse_schema(const std::string& content, bool require_nonempty = true);
Schema load_schema(const std::filesystem::path& path, bool require_nonempty = true);
std::string format_schema(const Schema& schema);

/// Validates records against schema and corpus, then averages duplicate
/// (review, attribute) pairs. Output is sorted by (review position, schema
/// position), independent of input order.
std::vector<ExtractionRecord> validate_extractions(std::vector<ExtractionRecord> records,
                                                   const Schema& schema, const Corpus& corpus);
std::vector<ExtractionRecord> load_extractions(const std::filesystem::path& path,
                                               const Schema& schema, const Corpus& corpus);

void write_reviews_jsonl(const std::filesystem::path& path, const std::vector<Review>& reviews);
void write_entities_jsonl(const std::filesystem::path& path, const std::vector<Entity>& entities);
void write_extractions_jsonl(const std::filesystem::path& path,
                             const std::vector<ExtractionRecord>& records);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace revex
