#include "revex/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "revex/error.hpp"
#include "revex/text.hpp"

namespace revex {

std::uint32_t TermStatistics::Table::intern(const std::string& t) {
    auto [it, inserted] = ids.emplace(t, static_cast<std::uint32_t>(terms.size()));
    if (inserted) {
        terms.push_back(t);
        df.push_back(0);
    }
    return it->second;
}

TermStatistics::TermStatistics(const Corpus& corpus) {
    const std::size_t n = corpus.size();
    chars_.resize(n);
    words_.resize(n);
    sentences_.resize(n);
    unigrams_.per_review.resize(n);
    bigrams_.per_review.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& body = corpus.reviews()[i].text;
        chars_[i] = text::char_count(body);
        words_[i] = text::word_count(body);
        sentences_[i] = text::sentence_count(body);

        const auto tokens = text::content_tokens(body);
        auto& uni = unigrams_.per_review[i];
        for (const auto& t : tokens) uni.push_back(unigrams_.intern(t));
        auto& bi = bigrams_.per_review[i];
        for (std::size_t j = 1; j < tokens.size(); ++j) {
            bi.push_back(bigrams_.intern(tokens[j - 1] + " " + tokens[j]));
        }
        for (Table* table : {&unigrams_, &bigrams_}) {
            std::unordered_set<std::uint32_t> seen(table->per_review[i].begin(), table->per_review[i].end());
            for (auto id : seen) ++table->df[id];
        }
    }
}

const TermStatistics::Table& TermStatistics::table(int gram) const {
    if (gram == 1) return unigrams_;
    if (gram == 2) return bigrams_;
    throw ValidationError("gram must be 1 or 2");
}

const std::vector<std::uint32_t>& TermStatistics::grams(std::size_t review, int gram) const {
    return table(gram).per_review[review];
}

const std::string& TermStatistics::term(std::uint32_t id, int gram) const { return table(gram).terms[id]; }

std::optional<std::uint32_t> TermStatistics::term_id(const std::string& t, int gram) const {
    const auto& tab = table(gram);
    auto it = tab.ids.find(t);
    if (it == tab.ids.end()) return std::nullopt;
    return it->second;
}

std::size_t TermStatistics::document_frequency(std::uint32_t id, int gram) const {
    return table(gram).df[id];
}

std::size_t TermStatistics::vocabulary_size(int gram) const { return table(gram).terms.size(); }

double TermStatistics::idf(std::uint32_t id, int gram) const {
    const double r = static_cast<double>(review_count());
    const double df = static_cast<double>(document_frequency(id, gram));
    return std::log((1.0 + r) / (1.0 + df)) + 1.0;
}

std::vector<TermScore> tfidf_top_terms(const TermStatistics& stats, std::span<const std::size_t> members,
                                       std::size_t n, int gram) {
    if (n == 0) return {};
    std::unordered_map<std::uint32_t, std::size_t> counts;
    std::size_t total = 0;
    for (std::size_t m : members) {
        for (auto id : stats.grams(m, gram)) {
            ++counts[id];
            ++total;
        }
    }
    std::vector<TermScore> scored;
    scored.reserve(counts.size());
    for (const auto& [id, c] : counts) {
        const double tf = static_cast<double>(c) / static_cast<double>(total);
        scored.push_back({stats.term(id, gram), tf * stats.idf(id, gram)});
    }
    auto better = [](const TermScore& a, const TermScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    };
    if (scored.size() > n) {
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
        scored.resize(n);
    } else {
        std::sort(scored.begin(), scored.end(), better);
    }
    return scored;
}

Histogram::Histogram(std::size_t bins) : counts_(bins, 0) {
    if (bins == 0) throw ValidationError("histogram needs at least one bin");
    edges_.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        edges_[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(bins);
    }
}

std::size_t Histogram::bin_of(double score) const {
    const double clamped = std::clamp(score, -1.0, 1.0);
    const auto idx = static_cast<std::size_t>(std::floor((clamped + 1.0) * static_cast<double>(bins()) / 2.0));
    return std::min(idx, bins() - 1);
}

void Histogram::add(double score) {
    ++counts_[bin_of(score)];
    ++total_;
}

Histogram Histogram::from_counts(std::vector<std::uint64_t> counts) {
    Histogram h(counts.size());
    h.total_ = 0;
    for (auto c : counts) h.total_ += c;
    h.counts_ = std::move(counts);
    return h;
}

Histogram attribute_histogram(const FeatureMatrix& vectors, std::span<const std::size_t> members,
                              std::size_t attribute, std::size_t bins) {
    if (attribute >= vectors.dims()) throw ValidationError("attribute index out of range");
    Histogram h(bins);
    for (std::size_t m : members) {
        if (auto v = vectors.get(m, attribute)) h.add(*v);
    }
    return h;
}

Histogram attribute_histogram(const FeatureMatrix& vectors, std::span<const std::size_t> members,
                              const std::vector<std::string>& attributes, const std::string& attribute,
                              std::size_t bins) {
    auto it = std::find(attributes.begin(), attributes.end(), attribute);
    if (it == attributes.end()) throw ValidationError("unknown attribute " + attribute);
    return attribute_histogram(vectors, members, static_cast<std::size_t>(it - attributes.begin()), bins);
}

double histogram_distance(const Histogram& a, const Histogram& b) {
    if (a.edges() != b.edges()) throw ValidationError("histogram binning mismatch");
    if (a.total() == 0 && b.total() == 0) return 0.0;
    if (a.total() == 0 || b.total() == 0) return 2.0;
    const double ta = static_cast<double>(a.total());
    const double tb = static_cast<double>(b.total());
    double d = 0.0;
    for (std::size_t i = 0; i < a.bins(); ++i) {
        d += std::abs(static_cast<double>(a.counts()[i]) / ta - static_cast<double>(b.counts()[i]) / tb);
    }
    // disjoint supports can round to 2 + ulp
    return std::min(d, 2.0);
}

ClusterSummary summarize_cluster(std::span<const std::size_t> members, const TermStatistics& stats,
                                 const FeatureMatrix& vectors, std::span<const double> sentiments,
                                 const std::vector<std::string>& attributes,
                                 const SummaryOptions& options) {
    ClusterSummary s;
    s.size = members.size();
    s.attributes = attributes;
    s.histograms.assign(attributes.size(), Histogram(options.bins));
    s.attr_means.assign(attributes.size(), std::nullopt);
    s.attr_present.assign(attributes.size(), 0);
    if (!members.empty()) {
        double chars = 0.0, words = 0.0, sentences = 0.0, sentiment = 0.0;
        for (std::size_t m : members) {
            chars += static_cast<double>(stats.chars(m));
            words += static_cast<double>(stats.words(m));
            sentences += static_cast<double>(stats.sentences(m));
            sentiment += sentiments[m];
        }
        const double n = static_cast<double>(members.size());
        s.avg_chars = chars / n;
        s.avg_words = words / n;
        s.avg_sentences = sentences / n;
        s.avg_sentiment = sentiment / n;
    }
    s.top_words = tfidf_top_terms(stats, members, options.n_top, 1);
    s.top_bigrams = tfidf_top_terms(stats, members, options.n_top, 2);

    std::vector<double> sums(attributes.size(), 0.0);
    for (std::size_t m : members) {
        for (std::size_t a = 0; a < attributes.size(); ++a) {
            if (auto v = vectors.get(m, a)) {
                s.histograms[a].add(*v);
                sums[a] += *v;
                ++s.attr_present[a];
            }
        }
    }
    for (std::size_t a = 0; a < attributes.size(); ++a) {
        if (s.attr_present[a] > 0) s.attr_means[a] = sums[a] / static_cast<double>(s.attr_present[a]);
    }
    return s;
}

std::vector<AttributeDistance> top_divergent_attributes(const ClusterSummary& a, const ClusterSummary& b,
                                                        std::size_t m) {
    if (a.attributes != b.attributes) throw ValidationError("summaries use different schemas");
    std::vector<AttributeDistance> out;
    for (std::size_t i = 0; i < a.attributes.size(); ++i) {
        out.push_back({a.attributes[i], histogram_distance(a.histograms[i], b.histograms[i])});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& x, const auto& y) { return x.distance > y.distance; });
    if (m > 0 && out.size() > m) out.resize(m);
    return out;
}

}  // namespace revex
