#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "revex/config.hpp"
#include "revex/corpus.hpp"
#include "revex/synth.hpp"

namespace revex::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("revex_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Review review(std::string id, std::string entity, std::string text) {
    Review r;
    r.id = std::move(id);
    r.entity_id = std::move(entity);
    r.text = std::move(text);
    return r;
}

inline Corpus corpus_of(const std::vector<std::string>& texts, const std::string& entity = "e1") {
    std::vector<Review> reviews;
    for (std::size_t i = 0; i < texts.size(); ++i) reviews.push_back(review("r" + std::to_string(i), entity, texts[i]));
    return Corpus(std::move(reviews), {});
}

/// Writes a small synthetic corpus into `dir` and returns its config with the
/// index directed to dir/index.
inline PipelineConfig synth_config(const std::filesystem::path& dir, std::size_t reviews = 800,
                                   std::size_t entities = 8) {
    SynthOptions o;
    o.reviews = reviews;
    o.entities = entities;
    write_corpus(dir, generate_corpus(o));
    return load_config(dir / "config.txt");
}

}  // namespace revex::testing
