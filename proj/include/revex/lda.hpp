#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revex/corpus.hpp"
#include "revex/featurize.hpp"

namespace revex {

struct LdaParams {
    std::size_t n_topics = 10;
    double alpha = 0.0;  // <= 0 selects 50 / n_topics
    double beta = 0.01;
    std::size_t iterations = 500;
    std::uint64_t seed = 42;
    std::size_t min_document_frequency = 2;
    // Held-out inference: total sweeps and how many trailing sweeps are averaged.
    std::size_t inference_iterations = 100;
    std::size_t inference_average = 50;
};

/// Fitted collapsed-Gibbs LDA model. Immutable after fitting.
class LdaModel {
public:
    LdaModel() = default;
    LdaModel(std::size_t n_topics, double alpha, double beta, std::uint64_t seed,
             std::vector<std::string> vocabulary, std::vector<std::uint32_t> topic_word_counts);

    std::size_t n_topics() const noexcept { return n_topics_; }
    std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }

    /// Row k of the K×V topic-word distribution; each row sums to one.
    std::span<const double> topic(std::size_t k) const {
        return {topic_word_.data() + k * vocabulary_.size(), vocabulary_.size()};
    }
    const std::vector<double>& topic_word() const noexcept { return topic_word_; }
    /// Final sampler counts n(k, w), K×V row-major.
    const std::vector<std::uint32_t>& topic_word_counts() const noexcept { return counts_; }

    /// Vocabulary id of `term`, or -1.
    long word_id(std::string_view term) const;

    bool operator==(const LdaModel& other) const {
        return n_topics_ == other.n_topics_ && alpha_ == other.alpha_ && beta_ == other.beta_ &&
               seed_ == other.seed_ && vocabulary_ == other.vocabulary_ && counts_ == other.counts_;
    }

private:
    std::size_t n_topics_ = 0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    std::uint64_t seed_ = 0;
    std::vector<std::string> vocabulary_;
    std::vector<std::uint32_t> counts_;
    std::vector<double> topic_word_;
    std::unordered_map<std::string, std::size_t> word_ids_;
};

/// Fits LDA on the given documents. Vocabulary: stopword-free tokens with
/// document frequency >= min_document_frequency, sorted lexicographically.
LdaModel fit_lda(std::span<const std::string> documents, const LdaParams& params);
LdaModel fit_lda(const Corpus& corpus, const LdaParams& params);

struct TopicInference {
    std::vector<double> proportions;  // K entries, sums to one
    bool fallback = false;            // no in-vocabulary tokens, uniform returned
};

/// Held-out Gibbs sampling with the topic-word distribution fixed. The
/// returned proportions average the trailing `inference_average` sweeps.
TopicInference infer_doc_topics(const LdaModel& model, std::string_view document,
                                std::uint64_t seed, const LdaParams& params = {});

/// Topic-mode vectors for every review. Review i is inferred with a seed
/// derived from (model seed, i), so rows can be computed in any order.
/// `fallback_rows` receives the indices that got the uniform fallback.
FeatureMatrix topic_vectors(const LdaModel& model, const Corpus& corpus, const LdaParams& params,
                            std::vector<std::size_t>* fallback_rows = nullptr);

/// "topic1" .. "topicK": attribute names used for topic-mode vectors.
std::vector<std::string> topic_names(std::size_t n_topics);

}  // namespace revex
