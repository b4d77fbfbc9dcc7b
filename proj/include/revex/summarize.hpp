#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "revex/corpus.hpp"
#include "revex/featurize.hpp"

namespace revex {

struct TermScore {
    std::string term;
    double score = 0.0;

    bool operator==(const TermScore&) const = default;
};

/// Per-review length counts and n-gram ids, plus corpus document
/// frequencies. Built once; idf is a corpus constant shared by every cluster.
class TermStatistics {
public:
    explicit TermStatistics(const Corpus& corpus);

    std::size_t review_count() const noexcept { return chars_.size(); }
    std::size_t chars(std::size_t review) const { return chars_[review]; }
    std::size_t words(std::size_t review) const { return words_[review]; }
    std::size_t sentences(std::size_t review) const { return sentences_[review]; }

    /// gram = 1 (stopword-free tokens) or 2 (adjacent surviving-token pairs).
    const std::vector<std::uint32_t>& grams(std::size_t review, int gram) const;
    const std::string& term(std::uint32_t id, int gram) const;
    std::optional<std::uint32_t> term_id(const std::string& term, int gram) const;
    std::size_t document_frequency(std::uint32_t id, int gram) const;
    std::size_t vocabulary_size(int gram) const;

    /// ln((1+R)/(1+df)) + 1.
    double idf(std::uint32_t id, int gram) const;

private:
    struct Table {
        std::vector<std::string> terms;
        std::unordered_map<std::string, std::uint32_t> ids;
        std::vector<std::size_t> df;
        std::vector<std::vector<std::uint32_t>> per_review;

        std::uint32_t intern(const std::string& t);
    };
    const Table& table(int gram) const;

    std::vector<std::size_t> chars_;
    std::vector<std::size_t> words_;
    std::vector<std::size_t> sentences_;
    Table unigrams_;
    Table bigrams_;
};

/// Top-n terms of the cluster by tf·idf, where tf is the term's count over
/// all member reviews divided by the total gram count. Sorted by score
/// descending, ties by term. n == 0 gives an empty list.
std::vector<TermScore> tfidf_top_terms(const TermStatistics& stats,
                                       std::span<const std::size_t> members, std::size_t n, int gram);

class Histogram {
public:
    Histogram() = default;
    /// `bins` uniform bins spanning [-1,1]; the last bin is right-closed.
    explicit Histogram(std::size_t bins);

    void add(double score);
    std::size_t bin_of(double score) const;

    const std::vector<double>& edges() const noexcept { return edges_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept { return total_; }
    std::size_t bins() const noexcept { return counts_.size(); }

    static Histogram from_counts(std::vector<std::uint64_t> counts);

    bool operator==(const Histogram&) const = default;

private:
    std::vector<double> edges_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

inline constexpr std::size_t kDefaultBins = 8;
inline constexpr std::size_t kDefaultTopN = 5;

/// Histogram of the present scores of one attribute over `members`.
Histogram attribute_histogram(const FeatureMatrix& vectors, std::span<const std::size_t> members,
                              std::size_t attribute, std::size_t bins = kDefaultBins);
/// Name-based variant; throws ValidationError for attributes outside the list.
Histogram attribute_histogram(const FeatureMatrix& vectors, std::span<const std::size_t> members,
                              const std::vector<std::string>& attributes, const std::string& attribute,
                              std::size_t bins = kDefaultBins);

/// L1 distance of the two count vectors after normalizing each by its total.
/// Range [0,2]; two empty histograms are 0 apart, one empty one is 2 away.
/// Throws ValidationError when the binning differs.
double histogram_distance(const Histogram& a, const Histogram& b);

struct ClusterSummary {
    std::size_t size = 0;
    double avg_chars = 0.0;
    double avg_words = 0.0;
    double avg_sentences = 0.0;
    double avg_sentiment = 0.0;
    std::vector<TermScore> top_words;
    std::vector<TermScore> top_bigrams;
    std::vector<std::string> attributes;          // schema order
    std::vector<Histogram> histograms;            // aligned with attributes
    std::vector<std::optional<double>> attr_means;  // absent when nobody mentions it
    std::vector<std::size_t> attr_present;          // reviews mentioning each attribute

    bool operator==(const ClusterSummary&) const = default;
};

struct SummaryOptions {
    std::size_t n_top = kDefaultTopN;
    std::size_t bins = kDefaultBins;
};

ClusterSummary summarize_cluster(std::span<const std::size_t> members, const TermStatistics& stats,
                                 const FeatureMatrix& vectors, std::span<const double> sentiments,
                                 const std::vector<std::string>& attributes,
                                 const SummaryOptions& options = {});

struct AttributeDistance {
    std::string attribute;
    double distance = 0.0;
};

/// Per-attribute histogram distances, largest first, ties in schema order.
/// m == 0 returns every attribute.
std::vector<AttributeDistance> top_divergent_attributes(const ClusterSummary& a,
                                                        const ClusterSummary& b, std::size_t m);

}  // namespace revex
