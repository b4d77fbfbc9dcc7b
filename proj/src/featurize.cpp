#include "revex/featurize.hpp"

#include <charconv>
#include <sstream>

#include "builtin_lexicon.hpp"
#include "revex/error.hpp"
#include "revex/text.hpp"

namespace revex {

std::string_view to_string(FeatureMode mode) {
    return mode == FeatureMode::Extraction ? "extraction" : "topic";
}

FeatureMode feature_mode_from_string(std::string_view s) {
    if (s == "extraction") return FeatureMode::Extraction;
    if (s == "topic") return FeatureMode::Topic;
    throw ValidationError("unknown feature mode '" + std::string(s) + "'");
}

FeatureMatrix FeatureMatrix::from_raw(FeatureMode mode, std::size_t rows, std::size_t dims,
                                      std::vector<double> values,
                                      std::vector<unsigned char> present) {
    if (values.size() != rows * dims || present.size() != rows * dims) {
        throw ValidationError("feature matrix shape mismatch");
    }
    FeatureMatrix m;
    m.mode_ = mode;
    m.rows_ = rows;
    m.dims_ = dims;
    m.values_ = std::move(values);
    m.present_ = std::move(present);
    return m;
}

FeatureMatrix vectors_from_extractions(const std::vector<ExtractionRecord>& records,
                                       const Schema& schema, const Corpus& corpus) {
    FeatureMatrix m(FeatureMode::Extraction, corpus.size(), schema.attributes.size());
    // Records are expected to be validated (and therefore already averaged);
    // average again here so unvalidated input cannot produce last-wins values.
    std::vector<double> sum(m.rows() * m.dims(), 0.0);
    std::vector<std::size_t> count(m.rows() * m.dims(), 0);
    for (const auto& rec : records) {
        const auto row = corpus.find_review(rec.review_id);
        const auto dim = schema.index_of(rec.attribute);
        if (!row || !dim) {
            throw ValidationError("extraction record does not resolve: " + rec.review_id + "/" +
                                  rec.attribute);
        }
        sum[*row * m.dims() + *dim] += rec.score;
        ++count[*row * m.dims() + *dim];
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t d = 0; d < m.dims(); ++d) {
            const auto n = count[r * m.dims() + d];
            if (n > 0) m.set(r, d, sum[r * m.dims() + d] / static_cast<double>(n));
        }
    }
    return m;
}

SentimentLexicon::SentimentLexicon(std::map<std::string, double> entries) {
    for (auto& [term, valence] : entries) {
        if (!(valence >= -1.0 && valence <= 1.0)) {
            throw ValidationError("lexicon valence out of [-1,1] for '" + term + "'");
        }
        std::string lowered = term;
        for (char& c : lowered) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        if (!entries_.emplace(lowered, valence).second) {
            throw ValidationError("duplicate lexicon term '" + lowered + "'");
        }
    }
}

SentimentLexicon SentimentLexicon::builtin() { return parse(detail::kBuiltinLexicon); }

SentimentLexicon SentimentLexicon::parse(const std::string& content) {
    std::map<std::string, double> entries;
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ValidationError("lexicon line " + std::to_string(lineno) + ": expected term<TAB>valence");
        }
        std::string term = line.substr(0, tab);
        std::string num = line.substr(tab + 1);
        while (!num.empty() && (num.back() == '\r' || num.back() == ' ')) num.pop_back();
        double valence = 0.0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), valence);
        if (ec != std::errc() || ptr != num.data() + num.size()) {
            throw ValidationError("lexicon line " + std::to_string(lineno) + ": bad valence '" + num + "'");
        }
        if (!entries.emplace(term, valence).second) {
            throw ValidationError("duplicate lexicon term '" + term + "'");
        }
    }
    return SentimentLexicon(std::move(entries));
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
    return parse(read_file(path));
}

std::optional<double> SentimentLexicon::valence(std::string_view term) const {
    auto it = entries_.find(term);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string SentimentLexicon::to_tsv() const {
    std::string out;
    char buf[32];
    for (const auto& [term, valence] : entries_) {
        auto res = std::to_chars(buf, buf + sizeof buf, valence);
        out += term + '\t' + std::string(buf, res.ptr) + '\n';
    }
    return out;
}

double lexicon_sentiment(std::string_view review_text, const SentimentLexicon& lexicon) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (const auto& token : text::tokenize(review_text)) {
        if (auto v = lexicon.valence(token)) {
            sum += *v;
            ++hits;
        }
    }
    return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

double extraction_sentiment(const FeatureMatrix& vectors, std::size_t row) {
    double sum = 0.0;
    std::size_t n = 0;
    const auto values = vectors.values(row);
    for (std::size_t d = 0; d < vectors.dims(); ++d) {
        if (vectors.present(row, d)) {
            sum += values[d];
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::vector<double> review_sentiments(const Corpus& corpus, const FeatureMatrix& vectors,
                                      const SentimentLexicon& lexicon) {
    std::vector<double> out(corpus.size(), 0.0);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        out[i] = vectors.mode() == FeatureMode::Extraction
                     ? extraction_sentiment(vectors, i)
                     : lexicon_sentiment(corpus.reviews()[i].text, lexicon);
    }
    return out;
}

}  // namespace revex
