#include "revex/lda.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "revex/error.hpp"
#include "revex/rng.hpp"
#include "revex/text.hpp"

namespace revex {

namespace {

std::size_t sample_discrete(std::span<const double> weights, double total, Rng& rng) {
    double u = rng.uniform() * total;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        if (u < weights[k]) return k;
        u -= weights[k];
    }
    return weights.size() - 1;
}

}  // namespace

LdaModel::LdaModel(std::size_t n_topics, double alpha, double beta, std::uint64_t seed,
                   std::vector<std::string> vocabulary, std::vector<std::uint32_t> topic_word_counts)
    : n_topics_(n_topics), alpha_(alpha), beta_(beta), seed_(seed),
      vocabulary_(std::move(vocabulary)), counts_(std::move(topic_word_counts)) {
    const std::size_t V = vocabulary_.size();
    if (counts_.size() != n_topics_ * V) throw ValidationError("LDA count matrix shape mismatch");
    for (std::size_t w = 0; w < V; ++w) word_ids_.emplace(vocabulary_[w], w);
    topic_word_.resize(n_topics_ * V);
    for (std::size_t k = 0; k < n_topics_; ++k) {
        double total = 0.0;
        for (std::size_t w = 0; w < V; ++w) total += counts_[k * V + w];
        const double denom = total + static_cast<double>(V) * beta_;
        for (std::size_t w = 0; w < V; ++w) {
            topic_word_[k * V + w] = (counts_[k * V + w] + beta_) / denom;
        }
    }
}

long LdaModel::word_id(std::string_view term) const {
    auto it = word_ids_.find(std::string(term));
    return it == word_ids_.end() ? -1 : static_cast<long>(it->second);
}

LdaModel fit_lda(std::span<const std::string> documents, const LdaParams& params) {
    if (params.n_topics < 1) throw ValidationError("n_topics must be >= 1");
    if (documents.empty()) throw ValidationError("cannot fit LDA on an empty corpus");
    if (params.beta <= 0.0) throw ValidationError("beta must be positive");
    const std::size_t K = params.n_topics;
    const double alpha = params.alpha > 0.0 ? params.alpha : 50.0 / static_cast<double>(K);

    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(documents.size());
    std::map<std::string, std::size_t> df;
    for (const auto& doc : documents) {
        tokens.push_back(text::content_tokens(doc));
        std::unordered_set<std::string> seen(tokens.back().begin(), tokens.back().end());
        for (const auto& t : seen) ++df[t];
    }
    std::vector<std::string> vocabulary;
    for (const auto& [term, n] : df) {
        if (n >= params.min_document_frequency) vocabulary.push_back(term);
    }
    if (vocabulary.empty()) {
        throw ValidationError("LDA vocabulary is empty after pruning (min document frequency " +
                              std::to_string(params.min_document_frequency) +
                              "); lower the pruning threshold or supply more text");
    }
    std::unordered_map<std::string, std::uint32_t> ids;
    for (std::size_t w = 0; w < vocabulary.size(); ++w) {
        ids.emplace(vocabulary[w], static_cast<std::uint32_t>(w));
    }
    const std::size_t V = vocabulary.size();

    std::vector<std::vector<std::uint32_t>> words(tokens.size());
    for (std::size_t d = 0; d < tokens.size(); ++d) {
        for (const auto& t : tokens[d]) {
            if (auto it = ids.find(t); it != ids.end()) words[d].push_back(it->second);
        }
    }

    Rng rng(params.seed);
    std::vector<std::vector<std::uint32_t>> z(words.size());
    std::vector<std::uint32_t> doc_topic(words.size() * K, 0);
    std::vector<std::uint32_t> topic_word(K * V, 0);
    std::vector<std::uint32_t> topic_total(K, 0);
    for (std::size_t d = 0; d < words.size(); ++d) {
        z[d].resize(words[d].size());
        for (std::size_t i = 0; i < words[d].size(); ++i) {
            const auto k = static_cast<std::uint32_t>(rng.index(K));
            z[d][i] = k;
            ++doc_topic[d * K + k];
            ++topic_word[k * V + words[d][i]];
            ++topic_total[k];
        }
    }

    const double v_beta = static_cast<double>(V) * params.beta;
    std::vector<double> weights(K);
    for (std::size_t it = 0; it < params.iterations; ++it) {
        for (std::size_t d = 0; d < words.size(); ++d) {
            for (std::size_t i = 0; i < words[d].size(); ++i) {
                const std::uint32_t w = words[d][i];
                std::uint32_t k = z[d][i];
                --doc_topic[d * K + k];
                --topic_word[k * V + w];
                --topic_total[k];
                double total = 0.0;
                for (std::size_t t = 0; t < K; ++t) {
                    weights[t] = (doc_topic[d * K + t] + alpha) *
                                 (topic_word[t * V + w] + params.beta) / (topic_total[t] + v_beta);
                    total += weights[t];
                }
                k = static_cast<std::uint32_t>(sample_discrete(weights, total, rng));
                z[d][i] = k;
                ++doc_topic[d * K + k];
                ++topic_word[k * V + w];
                ++topic_total[k];
            }
        }
    }
    return LdaModel(K, alpha, params.beta, params.seed, std::move(vocabulary), std::move(topic_word));
}

LdaModel fit_lda(const Corpus& corpus, const LdaParams& params) {
    std::vector<std::string> docs;
    docs.reserve(corpus.size());
    for (const auto& r : corpus.reviews()) docs.push_back(r.text);
    return fit_lda(docs, params);
}

TopicInference infer_doc_topics(const LdaModel& model, std::string_view document,
                                std::uint64_t seed, const LdaParams& params) {
    const std::size_t K = model.n_topics();
    TopicInference out;
    std::vector<std::size_t> words;
    for (const auto& t : text::content_tokens(document)) {
        if (long id = model.word_id(t); id >= 0) words.push_back(static_cast<std::size_t>(id));
    }
    if (words.empty() || K == 0) {
        out.proportions.assign(K, K == 0 ? 0.0 : 1.0 / static_cast<double>(K));
        out.fallback = true;
        return out;
    }

    const std::size_t V = model.vocabulary_size();
    const auto& phi = model.topic_word();
    const double alpha = model.alpha();
    Rng rng(seed);
    std::vector<std::size_t> z(words.size());
    std::vector<double> n_dk(K, 0.0);
    for (std::size_t i = 0; i < words.size(); ++i) {
        z[i] = rng.index(K);
        n_dk[z[i]] += 1.0;
    }

    const std::size_t sweeps = std::max<std::size_t>(params.inference_iterations, 1);
    const std::size_t averaged = std::clamp<std::size_t>(params.inference_average, 1, sweeps);
    const double denom = static_cast<double>(words.size()) + static_cast<double>(K) * alpha;
    std::vector<double> acc(K, 0.0);
    std::vector<double> weights(K);
    for (std::size_t s = 0; s < sweeps; ++s) {
        for (std::size_t i = 0; i < words.size(); ++i) {
            n_dk[z[i]] -= 1.0;
            double total = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                weights[k] = (n_dk[k] + alpha) * phi[k * V + words[i]];
                total += weights[k];
            }
            z[i] = sample_discrete(weights, total, rng);
            n_dk[z[i]] += 1.0;
        }
        if (s + averaged >= sweeps) {
            for (std::size_t k = 0; k < K; ++k) acc[k] += (n_dk[k] + alpha) / denom;
        }
    }
    double total = 0.0;
    for (double v : acc) total += v;
    out.proportions.resize(K);
    for (std::size_t k = 0; k < K; ++k) out.proportions[k] = acc[k] / total;
    return out;
}

FeatureMatrix topic_vectors(const LdaModel& model, const Corpus& corpus, const LdaParams& params,
                            std::vector<std::size_t>* fallback_rows) {
    FeatureMatrix m(FeatureMode::Topic, corpus.size(), model.n_topics());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const std::size_t path[] = {i};
        const auto inferred =
            infer_doc_topics(model, corpus.reviews()[i].text, derive_seed(model.seed(), path), params);
        if (inferred.fallback && fallback_rows) fallback_rows->push_back(i);
        for (std::size_t k = 0; k < model.n_topics(); ++k) m.set(i, k, inferred.proportions[k]);
    }
    return m;
}

std::vector<std::string> topic_names(std::size_t n_topics) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n_topics; ++k) names.push_back("topic" + std::to_string(k + 1));
    return names;
}

}  // namespace revex
