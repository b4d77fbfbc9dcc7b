#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "revex/corpus.hpp"
#include "revex/error.hpp"
#include "revex/featurize.hpp"

namespace revex::query {

/// Names that can be sorted, filtered, or colored by: the schema attributes
/// plus the pseudo-attributes "sentiment" and "length" (characters).
struct AttributeRef {
    enum class Kind { Schema, Sentiment, Length };
    Kind kind = Kind::Schema;
    std::size_t index = 0;  // schema position for Kind::Schema
    std::string name;

    bool operator==(const AttributeRef&) const = default;
};

enum class Direction { Asc, Desc };
enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal, NotEqual };

struct Sort {
    AttributeRef attribute;
    Direction direction = Direction::Desc;
};

struct Filter {
    AttributeRef attribute;
    Comparator comparator = Comparator::Greater;
    double value = 0.0;
};

struct Grep {
    std::string pattern;  // regex source (literals are escaped)
    bool case_insensitive = true;
    std::shared_ptr<const std::regex> regex;

    bool matches(const std::string& text) const;
};

struct Color {
    AttributeRef attribute;
};

struct Reset {};

using CommandOp = std::variant<Sort, Filter, Grep, Color, Reset>;

struct Command {
    CommandOp op;
    std::string source;  // the text the command was parsed from

    /// Canonical command text, e.g. "tSort(cleanliness, desc)".
    std::string to_string() const;
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& message, std::size_t position)
        : ValidationError(message + " at position " + std::to_string(position)), position_(position),
          detail_(message) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t position_;
    std::string detail_;
};

/// Parses one command against the schema attribute list.
///
///   tSort(attr [, asc|desc])         default desc
///   tFilter(attr, <|<=|>|>=|==|!= number)
///   tGrep(/regex/[i] | "literal")    literals match case-insensitively
///   tColor(attr)
///   tReset()
Command parse(std::string_view input, const std::vector<std::string>& attributes);

/// Read access to review text and attribute values for evaluation.
class ReviewStore {
public:
    ReviewStore(const Corpus& corpus, const FeatureMatrix& vectors, std::span<const double> sentiments);

    const std::string& text(std::size_t review) const { return corpus_->reviews()[review].text; }
    std::optional<double> value(std::size_t review, const AttributeRef& attribute) const;
    std::size_t size() const noexcept { return corpus_->size(); }

private:
    const Corpus* corpus_;
    const FeatureMatrix* vectors_;
    std::span<const double> sentiments_;
    std::vector<double> lengths_;
};

struct Session {
    std::vector<std::size_t> initial;      // the selected scope, in scope order
    std::vector<std::size_t> working_set;  // subsequence of `initial`, possibly reordered
    std::vector<Command> history;
    std::optional<AttributeRef> color;
};

Session start_session(std::vector<std::size_t> initial);

/// Applies one command to the working set. Sort is stable and puts reviews
/// lacking the attribute last in either direction; Filter keeps reviews that
/// have the attribute and satisfy the predicate; Grep keeps raw-text
/// matches; Color only records the attribute; Reset restores the initial set
/// and clears history and color.
Session apply(Session session, const Command& command, const ReviewStore& store);
void apply_in_place(Session& session, const Command& command, const ReviewStore& store);

/// Replays `history` over the whole scope and returns the resulting order.
std::vector<std::size_t> evaluate_remote(std::span<const Command> history, std::span<const std::size_t> scope,
                                         const ReviewStore& store);

/// Wire variant: command strings are parsed here; a bad entry raises a
/// ParseError naming its history index.
std::vector<std::size_t> evaluate_remote(const std::vector<std::string>& history,
                                         std::span<const std::size_t> scope,
                                         const std::vector<std::string>& attributes, const ReviewStore& store);

}  // namespace revex::query
