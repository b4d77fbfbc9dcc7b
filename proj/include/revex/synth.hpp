#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "revex/corpus.hpp"

namespace revex {

/// Deterministic hotel-review corpus with extraction records, used for the
/// walkthrough, benchmarks, and end-to-end tests.
struct SynthOptions {
    std::size_t reviews = 10000;
    std::size_t entities = 60;
    std::uint64_t seed = 7;
};

struct SynthCorpus {
    std::vector<Review> reviews;
    std::vector<Entity> entities;
    Schema schema;  // 21 attributes
    std::vector<ExtractionRecord> extractions;  // may repeat (review, attribute) pairs
};

SynthCorpus generate_corpus(const SynthOptions& options = {});

/// Writes reviews.jsonl, entities.jsonl, schema.txt, extractions.jsonl and a
/// config.txt pointing at them (index_dir = index).
void write_corpus(const std::filesystem::path& dir, const SynthCorpus& corpus);

}  // namespace revex
