#include "revex/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "revex/csv.hpp"
#include "revex/error.hpp"

namespace revex {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower_ascii(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.filename().string() + ":" + std::to_string(line);
}

bool is_iso_date(const std::string& s) {
    static const std::regex re(R"(^\d{4}-\d{2}-\d{2}([Tt ][0-9:.]+([Zz]|[+-]\d{2}:?\d{2})?)?$)");
    return std::regex_match(s, re);
}

std::string required_string(const json& obj, const char* field, const std::string& at) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) {
        throw ValidationError(at + ": missing field '" + field + "'");
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw ValidationError(at + ": field '" + field + "' must be a string");
}

std::optional<double> optional_number(const json& obj, const char* field, const std::string& at) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw ValidationError(at + ": field '" + field + "' must be a number");
    return it->get<double>();
}

std::optional<std::string> optional_string(const json& obj, const char* field,
                                           const std::string& at) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ValidationError(at + ": field '" + field + "' must be a string");
    return it->get<std::string>();
}

Review checked_review(Review r, const std::string& at) {
    if (r.id.empty()) throw ValidationError(at + ": field 'id' is empty");
    if (trim(r.text).empty()) throw ValidationError(at + ": field 'text' is empty");
    if (r.date && !is_iso_date(*r.date)) {
        throw ValidationError(at + ": field 'date' is not an ISO-8601 date: " + *r.date);
    }
    return r;
}

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(where(path, lineno) + ": malformed JSON: " + e.what());
        }
        if (!obj.is_object()) throw ValidationError(where(path, lineno) + ": expected a JSON object");
        fn(obj, where(path, lineno));
    }
}

}  // namespace

Corpus::Corpus(std::vector<Review> reviews, std::vector<Entity> entities)
    : reviews_(std::move(reviews)), entities_(std::move(entities)) {
    has_entity_info_ = !entities_.empty();
    for (std::size_t i = 0; i < entities_.size(); ++i) {
        auto& e = entities_[i];
        if (e.id.empty()) throw ValidationError("entity with empty id");
        if (!entity_pos_.emplace(e.id, i).second) {
            throw ValidationError("duplicate entity id " + e.id);
        }
        if (e.coordinates) {
            const auto& c = *e.coordinates;
            if (!(c.lat >= -90.0 && c.lat <= 90.0) || !(c.lon >= -180.0 && c.lon <= 180.0)) {
                throw ValidationError("entity " + e.id + ": coordinates out of range");
            }
        }
        e.review_count = 0;
    }
    for (std::size_t i = 0; i < reviews_.size(); ++i) {
        auto& r = reviews_[i];
        if (!review_pos_.emplace(r.id, i).second) {
            throw ValidationError("duplicate review id " + r.id);
        }
        if (!entity_pos_.contains(r.entity_id)) {
            r.entity_id = kUnknownEntity;
            if (!entity_pos_.contains(kUnknownEntity)) {
                entity_pos_.emplace(kUnknownEntity, entities_.size());
                entities_.push_back(Entity{kUnknownEntity, "Unknown", {}, {}, {}, 0});
            }
        }
        ++entities_[entity_pos_.at(r.entity_id)].review_count;
    }
}

std::optional<std::size_t> Corpus::find_review(const std::string& id) const {
    auto it = review_pos_.find(id);
    if (it == review_pos_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Corpus::find_entity(const std::string& id) const {
    auto it = entity_pos_.find(id);
    if (it == entity_pos_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> Corpus::reviews_of(const std::string& entity_id) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < reviews_.size(); ++i) {
        if (reviews_[i].entity_id == entity_id) out.push_back(i);
    }
    return out;
}

std::optional<std::size_t> Schema::index_of(const std::string& attribute) const {
    auto it = std::find(attributes.begin(), attributes.end(), attribute);
    if (it == attributes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - attributes.begin());
}

ReviewFormat guess_review_format(const std::filesystem::path& path) {
    return lower_ascii(path.extension().string()) == ".csv" ? ReviewFormat::Csv
                                                            : ReviewFormat::Jsonl;
}

std::vector<Review> load_reviews(const std::filesystem::path& path, ReviewFormat format) {
    std::vector<Review> out;
    if (format == ReviewFormat::Jsonl) {
        for_each_jsonl(path, [&](const json& obj, const std::string& at) {
            Review r;
            r.id = required_string(obj, "id", at);
            r.entity_id = required_string(obj, "entity_id", at);
            r.text = required_string(obj, "text", at);
            r.rating = optional_number(obj, "rating", at);
            r.date = optional_string(obj, "date", at);
            out.push_back(checked_review(std::move(r), at));
        });
    } else {
        const auto rows = csv::parse(read_file(path));
        if (rows.empty()) throw ValidationError(path.filename().string() + ": missing CSV header");
        std::map<std::string, std::size_t> col;
        for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
            col[lower_ascii(trim(rows[0].fields[i]))] = i;
        }
        for (const char* needed : {"id", "entity_id", "text"}) {
            if (!col.contains(needed)) {
                throw ValidationError(path.filename().string() + ": CSV header lacks column '" +
                                      needed + "'");
            }
        }
        for (std::size_t ri = 1; ri < rows.size(); ++ri) {
            const auto& row = rows[ri];
            const std::string at = where(path, row.line) + " (row " + std::to_string(ri) + ")";
            auto field = [&](const std::string& name) -> std::optional<std::string> {
                auto it = col.find(name);
                if (it == col.end() || it->second >= row.fields.size()) return std::nullopt;
                return row.fields[it->second];
            };
            Review r;
            r.id = trim(field("id").value_or(""));
            r.entity_id = trim(field("entity_id").value_or(""));
            r.text = field("text").value_or("");
            if (auto rating = field("rating"); rating && !trim(*rating).empty()) {
                try {
                    std::size_t used = 0;
                    r.rating = std::stod(trim(*rating), &used);
                    if (used != trim(*rating).size()) throw std::invalid_argument("trailing");
                } catch (const std::exception&) {
                    throw ValidationError(at + ": field 'rating' is not a number");
                }
            }
            if (auto date = field("date"); date && !trim(*date).empty()) r.date = trim(*date);
            out.push_back(checked_review(std::move(r), at));
        }
    }
    return out;
}

std::vector<Entity> load_entities(const std::filesystem::path& path) {
    std::vector<Entity> out;
    for_each_jsonl(path, [&](const json& obj, const std::string& at) {
        Entity e;
        e.id = required_string(obj, "id", at);
        e.name = optional_string(obj, "name", at).value_or(e.id);
        const auto lat = optional_number(obj, "lat", at);
        const auto lon = optional_number(obj, "lon", at);
        if (lat.has_value() != lon.has_value()) {
            throw ValidationError(at + ": 'lat' and 'lon' must be given together");
        }
        if (lat) {
            if (*lat < -90.0 || *lat > 90.0) throw ValidationError(at + ": field 'lat' out of range");
            if (*lon < -180.0 || *lon > 180.0) throw ValidationError(at + ": field 'lon' out of range");
            e.coordinates = Coordinates{*lat, *lon};
        }
        e.address = optional_string(obj, "address", at);
        e.image_url = optional_string(obj, "image_url", at);
        out.push_back(std::move(e));
    });
    return out;
}

Corpus load_corpus(const std::filesystem::path& reviews_path,
                   const std::optional<std::filesystem::path>& entities_path) {
    auto reviews = load_reviews(reviews_path, guess_review_format(reviews_path));
    std::vector<Entity> entities;
    if (entities_path) entities = load_entities(*entities_path);
    return Corpus(std::move(reviews), std::move(entities));
}

Schema parse_schema(const std::string& content, bool require_nonempty) {
    Schema schema;
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string name = lower_ascii(trim(line));
        if (name.empty()) continue;
        if (schema.index_of(name)) {
            throw ValidationError("duplicate attribute " + name + " (line " +
                                  std::to_string(lineno) + ")");
        }
        schema.attributes.push_back(std::move(name));
    }
    if (require_nonempty && schema.attributes.empty()) {
        throw ValidationError("schema has no attributes");
    }
    return schema;
}

Schema load_schema(const std::filesystem::path& path, bool require_nonempty) {
    Schema schema = parse_schema(read_file(path), require_nonempty);
    schema.version = path.filename().string();
    return schema;
}

std::string format_schema(const Schema& schema) {
    std::string out;
    for (const auto& a : schema.attributes) out += a + "\n";
    return out;
}

std::vector<ExtractionRecord> validate_extractions(std::vector<ExtractionRecord> records,
                                                   const Schema& schema, const Corpus& corpus) {
    // (review position, attribute position) → (sum, count)
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> acc;
    for (const auto& rec : records) {
        const auto attr = schema.index_of(rec.attribute);
        if (!attr) throw ValidationError("unknown attribute " + rec.attribute + " for review " + rec.review_id);
        const auto review = corpus.find_review(rec.review_id);
        if (!review) throw ValidationError("extraction references unknown review id " + rec.review_id);
        if (!(rec.score >= -1.0 && rec.score <= 1.0)) {
            throw ValidationError("score out of [-1,1] for review " + rec.review_id + ", attribute " +
                                  rec.attribute);
        }
        auto& slot = acc[{*review, *attr}];
        slot.first += rec.score;
        slot.second += 1;
    }
    std::vector<ExtractionRecord> out;
    out.reserve(acc.size());
    for (const auto& [key, sum] : acc) {
        out.push_back({corpus.reviews()[key.first].id, schema.attributes[key.second],
                       sum.first / static_cast<double>(sum.second)});
    }
    return out;
}

std::vector<ExtractionRecord> load_extractions(const std::filesystem::path& path,
                                               const Schema& schema, const Corpus& corpus) {
    std::vector<ExtractionRecord> records;
    for_each_jsonl(path, [&](const json& obj, const std::string& at) {
        ExtractionRecord rec;
        rec.review_id = required_string(obj, "review_id", at);
        rec.attribute = lower_ascii(trim(required_string(obj, "attribute", at)));
        const auto score = optional_number(obj, "score", at);
        if (!score) throw ValidationError(at + ": missing field 'score'");
        rec.score = *score;
        if (!schema.index_of(rec.attribute)) {
            throw ValidationError(at + ": unknown attribute " + rec.attribute);
        }
        if (!(rec.score >= -1.0 && rec.score <= 1.0)) {
            throw ValidationError(at + ": score out of [-1,1]");
        }
        records.push_back(std::move(rec));
    });
    return validate_extractions(std::move(records), schema, corpus);
}

void write_reviews_jsonl(const std::filesystem::path& path, const std::vector<Review>& reviews) {
    std::string out;
    for (const auto& r : reviews) {
        json obj = {{"id", r.id}, {"entity_id", r.entity_id}, {"text", r.text}};
        if (r.rating) obj["rating"] = *r.rating;
        if (r.date) obj["date"] = *r.date;
        out += obj.dump() + "\n";
    }
    write_file(path, out);
}

void write_entities_jsonl(const std::filesystem::path& path, const std::vector<Entity>& entities) {
    std::string out;
    for (const auto& e : entities) {
        json obj = {{"id", e.id}, {"name", e.name}};
        if (e.coordinates) {
            obj["lat"] = e.coordinates->lat;
            obj["lon"] = e.coordinates->lon;
        }
        if (e.address) obj["address"] = *e.address;
        if (e.image_url) obj["image_url"] = *e.image_url;
        out += obj.dump() + "\n";
    }
    write_file(path, out);
}

void write_extractions_jsonl(const std::filesystem::path& path,
                             const std::vector<ExtractionRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += json{{"review_id", rec.review_id}, {"attribute", rec.attribute}, {"score", rec.score}}
                   .dump() +
               "\n";
    }
    write_file(path, out);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError("cannot write " + path.string());
    out << content;
    if (!out) throw RuntimeError("write failed for " + path.string());
}

}  // namespace revex
