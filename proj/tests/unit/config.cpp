#include <doctest.h>

#include <cstdlib>

#include "revex/config.hpp"
#include "revex/error.hpp"
#include "support.hpp"

using namespace revex;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& content) {
    try {
        parse_config(content, "/base");
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

std::string validation_error(const PipelineConfig& c) {
    try {
        validate_config(c);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

PipelineConfig valid() {
    return parse_config("reviews = r.jsonl\nschema = s.txt\nextractions = x.jsonl\n", "/base");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parses every key") {
    const auto c = parse_config(R"(
# comment line
reviews = data/reviews.jsonl   # trailing comment
entities = /abs/entities.jsonl
schema = schema.txt
extractions = x.jsonl
lexicon_path = lex.tsv
index_dir = out/index
featurizer = lda
n_topics = 7
alpha = 0.5
beta = 0.02
iterations = 33
seed = 9
k1 = 6
k2 = 4
depth = 3
min_cluster_size = 12
kmeans_max_iter = 50
kmeans_tol = 0.001
n_top = 8
bins = 10
entity_precompute_limit = 5
host = 0.0.0.0
port = 9000
)",
                                "/base");
    CHECK(c.reviews == fs::path("/base/data/reviews.jsonl"));
    CHECK(c.entities == fs::path("/abs/entities.jsonl"));
    CHECK(c.schema == fs::path("/base/schema.txt"));
    CHECK(c.lexicon_path == fs::path("/base/lex.tsv"));
    CHECK(c.index_dir == fs::path("/base/out/index"));
    CHECK(c.build.mode == FeatureMode::Topic);
    CHECK(c.build.lda.n_topics == 7);
    CHECK(c.build.lda.alpha == 0.5);
    CHECK(c.build.lda.beta == 0.02);
    CHECK(c.build.lda.iterations == 33);
    CHECK(c.build.lda.seed == 9);
    CHECK(c.build.hierarchy.seed == 9);
    CHECK(c.build.hierarchy.k1 == 6);
    CHECK(c.build.hierarchy.k2 == 4);
    CHECK(c.build.hierarchy.depth == 3);
    CHECK(c.build.hierarchy.min_cluster_size == 12);
    CHECK(c.build.hierarchy.kmeans_max_iter == 50);
    CHECK(c.build.hierarchy.kmeans_tol == 0.001);
    CHECK(c.build.summary.n_top == 8);
    CHECK(c.build.summary.bins == 10);
    CHECK(c.build.entity_precompute_limit == 5);
    CHECK(c.host == "0.0.0.0");
    CHECK(c.port == 9000);
    CHECK(config_keys().size() == 23);
}

TEST_CASE("defaults") {
    const auto c = parse_config("reviews = r.jsonl", "/base");
    CHECK(c.index_dir == fs::path("/base/index"));
    CHECK(c.build.mode == FeatureMode::Extraction);
    CHECK(c.build.hierarchy.k1 == 5);
    CHECK(c.build.hierarchy.k2 == 3);
    CHECK(c.build.hierarchy.depth == 5);
    CHECK(c.build.summary.bins == 8);
    CHECK(c.port == 8080);
    CHECK_FALSE(c.entities.has_value());
}

TEST_CASE("malformed lines name the line") {
    CHECK(error_of("reviews = r\nnonsense\n") == "config line 2: expected key = value");
    CHECK(error_of("\n\ncolour = red").starts_with("config line 3: unknown config key 'colour'"));
    CHECK(error_of("k1 = five").find("expected a number, got 'five'") != std::string::npos);
    CHECK(error_of("k1 = -1").find("must be non-negative") != std::string::npos);
    CHECK(error_of("k1 = 2.5").find("expected a number") != std::string::npos);
    CHECK(error_of("port = 70000").find("out of range") != std::string::npos);
    CHECK(error_of("featurizer = bert").find("expected lda or extractions") != std::string::npos);
}

TEST_CASE("validation rules") {
    CHECK(validation_error(valid()).empty());

    auto c = valid();
    c.schema.reset();
    CHECK(validation_error(c).find("requires a schema") != std::string::npos);
    c = valid();
    c.extractions.reset();
    CHECK(validation_error(c).find("requires an extractions") != std::string::npos);

    c = parse_config("reviews = r\nfeaturizer = lda\nn_topics = 1", "/base");
    CHECK(validation_error(c).find("n_topics >= 2") != std::string::npos);
    c = parse_config("reviews = r\nfeaturizer = lda\nn_topics = 3\nbeta = 0", "/base");
    CHECK(validation_error(c).find("beta > 0") != std::string::npos);
    c = parse_config("reviews = r\nfeaturizer = lda\nn_topics = 3\niterations = 0", "/base");
    CHECK(validation_error(c).find("iterations >= 1") != std::string::npos);
    c = parse_config("reviews = r\nfeaturizer = lda\nn_topics = 3", "/base");
    CHECK(validation_error(c).empty());

    for (const char* key : {"k1", "k2", "depth"}) {
        c = valid();
        set_config_value(c, key, "0");
        CHECK(validation_error(c).find("must be >= 1") != std::string::npos);
    }
    c = valid();
    set_config_value(c, "bins", "0");
    CHECK(validation_error(c).find("bins") != std::string::npos);
    c = parse_config("schema = s\nextractions = x", "/base");
    CHECK(validation_error(c).find("reviews path is required") != std::string::npos);
}

TEST_CASE("files, environment and overrides") {
    testing::TempDir dir;
    fs::create_directories(dir / "sub");
    write_file(dir / "sub" / "c.txt", "reviews = r.jsonl\nport = 1234\n");
    auto c = load_config(dir / "sub" / "c.txt");
    CHECK(c.reviews == (dir / "sub" / "r.jsonl").lexically_normal());
    CHECK(c.port == 1234);
    CHECK_THROWS_AS(load_config(dir / "absent.txt"), NotFoundError);

    ::setenv("PORT", "4321", 1);
    ::setenv("INDEX_DIR", "/env/index", 1);
    ::setenv("HOST", "0.0.0.0", 1);
    apply_environment(c);
    ::unsetenv("PORT");
    ::unsetenv("INDEX_DIR");
    ::unsetenv("HOST");
    CHECK(c.port == 4321);
    CHECK(c.index_dir == fs::path("/env/index"));
    CHECK(c.host == "0.0.0.0");

    // flags come last and win
    set_config_value(c, "port", "5555");
    CHECK(c.port == 5555);
}

}  // TEST_SUITE
