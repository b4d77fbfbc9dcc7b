#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revex/corpus.hpp"

namespace revex {

enum class FeatureMode { Extraction, Topic };

std::string_view to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(std::string_view s);

/// Row-major per-review feature vectors, aligned with corpus order.
///
/// Extraction mode: values in [-1,1], zero wherever `present` is false.
/// Topic mode: non-negative values summing to one, everything present.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(FeatureMode mode, std::size_t rows, std::size_t dims)
        : mode_(mode), rows_(rows), dims_(dims), values_(rows * dims, 0.0),
          present_(rows * dims, 0) {}

    FeatureMode mode() const noexcept { return mode_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t dims() const noexcept { return dims_; }

    std::span<const double> values(std::size_t row) const {
        return {values_.data() + row * dims_, dims_};
    }
    std::span<double> values(std::size_t row) { return {values_.data() + row * dims_, dims_}; }

    bool present(std::size_t row, std::size_t dim) const { return present_[row * dims_ + dim] != 0; }
    void set(std::size_t row, std::size_t dim, double value) {
        values_[row * dims_ + dim] = value;
        present_[row * dims_ + dim] = 1;
    }

    std::optional<double> get(std::size_t row, std::size_t dim) const {
        if (!present(row, dim)) return std::nullopt;
        return values_[row * dims_ + dim];
    }

    const std::vector<double>& raw_values() const noexcept { return values_; }
    const std::vector<unsigned char>& raw_present() const noexcept { return present_; }

    static FeatureMatrix from_raw(FeatureMode mode, std::size_t rows, std::size_t dims,
                                  std::vector<double> values, std::vector<unsigned char> present);

    bool operator==(const FeatureMatrix&) const = default;

private:
    FeatureMode mode_ = FeatureMode::Extraction;
    std::size_t rows_ = 0;
    std::size_t dims_ = 0;
    std::vector<double> values_;
    std::vector<unsigned char> present_;
};

/// One vector per corpus review; dimension = schema size.
FeatureMatrix vectors_from_extractions(const std::vector<ExtractionRecord>& records,
                                       const Schema& schema, const Corpus& corpus);

/// Term → valence in [-1,1].
class SentimentLexicon {
public:
    SentimentLexicon() = default;
    explicit SentimentLexicon(std::map<std::string, double> entries);

    /// The small English lexicon compiled into the library.
    static SentimentLexicon builtin();
    /// `term<TAB>valence` per line, '#' comments allowed.
    static SentimentLexicon parse(const std::string& content);
    static SentimentLexicon load(const std::filesystem::path& path);

    std::optional<double> valence(std::string_view term) const;
    const std::map<std::string, double, std::less<>>& entries() const noexcept { return entries_; }
    std::string to_tsv() const;

    bool operator==(const SentimentLexicon&) const = default;

private:
    std::map<std::string, double, std::less<>> entries_;
};

/// Mean valence of lexicon tokens in `text`; 0 without hits.
double lexicon_sentiment(std::string_view text, const SentimentLexicon& lexicon);

/// Mean of the present attribute scores; 0 when nothing is present.
double extraction_sentiment(const FeatureMatrix& vectors, std::size_t row);

/// Per-review sentiment for the whole corpus in the matrix's mode.
std::vector<double> review_sentiments(const Corpus& corpus, const FeatureMatrix& vectors,
                                      const SentimentLexicon& lexicon);

}  // namespace revex
