#include <doctest.h>

#include <json.hpp>
#include <set>
#include <sstream>

#include "revex/error.hpp"
#include "revex/pipeline.hpp"
#include "revex/query.hpp"
#include "support.hpp"

using namespace revex;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kNumericFiles = {"vectors.bin", "present.bin", "sentiment.bin",
                                                "trees/all/members.bin", "trees/all/centroids.bin"};

// Writes schema and matching extraction files holding the first `n` attributes.
std::pair<fs::path, fs::path> narrowed(const fs::path& dir, const std::vector<std::string>& attributes,
                                       std::size_t n, const std::string& extra = "") {
    const std::set<std::string> keep(attributes.begin(), attributes.begin() + static_cast<std::ptrdiff_t>(n));
    std::string schema;
    for (std::size_t i = 0; i < n; ++i) schema += attributes[i] + "\n";
    if (!extra.empty()) schema += extra + "\n";
    std::istringstream in(read_file(dir / "extractions.jsonl"));
    std::string line, records;
    while (std::getline(in, line)) {
        if (keep.count(nlohmann::json::parse(line).at("attribute").get<std::string>())) records += line + "\n";
    }
    const auto tag = std::to_string(n) + extra;
    write_file(dir / ("schema_" + tag + ".txt"), schema);
    write_file(dir / ("extractions_" + tag + ".jsonl"), records);
    return {dir / ("schema_" + tag + ".txt"), dir / ("extractions_" + tag + ".jsonl")};
}

ErrorKind kind_of(const std::function<void()>& f, std::string* message = nullptr) {
    try {
        f();
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Runtime;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("preprocess writes a complete flat index") {
    testing::TempDir dir;
    const auto config = testing::synth_config(dir.path(), 600, 6);
    const auto result = preprocess(config);
    CHECK(result.index_dir == config.index_dir);
    const auto index = open_index(config.index_dir);
    CHECK(index == result.artifacts);
    CHECK(index.index_version == 1);
    CHECK(index.corpus.size() == 600);
    CHECK(index.schema.attributes.size() == 21);
    CHECK(index.trees.front().entity == kAllEntities);
    // one tree per non-empty listed entity plus the whole corpus
    CHECK(index.trees.size() == 1 + precompute_entities(index.corpus, 50).size());
    for (const auto& t : index.trees) {
        t.tree.visit([&](const ClusterNode& n) { CHECK(t.summaries.count(format_path(n.path)) == 1); });
    }
}

TEST_CASE("two preprocess runs are byte-identical") {
    testing::TempDir dir;
    auto config = testing::synth_config(dir.path(), 400, 5);
    preprocess(config);
    const auto first = config.index_dir;
    config.index_dir = dir / "again";
    preprocess(config);
    for (const auto& f : kNumericFiles) CHECK(read_file(first / f) == read_file(config.index_dir / f));
    CHECK(read_file(first / "trees/all/tree.json") == read_file(config.index_dir / "trees/all/tree.json"));
    CHECK(read_file(first / "trees/all/summaries.json") ==
          read_file(config.index_dir / "trees/all/summaries.json"));
}

TEST_CASE("iterate writes new versions beside the old ones") {
    testing::TempDir dir;
    const auto config = testing::synth_config(dir.path(), 500, 5);
    preprocess(config);
    const auto attrs = open_index(config.index_dir).schema.attributes;
    const auto flat_manifest = read_file(config.index_dir / "manifest.json");

    std::vector<std::string> manifests;
    std::size_t expected_version = 2;
    for (std::size_t n : {3, 7, 10}) {
        const auto [schema, records] = narrowed(dir.path(), attrs, n);
        const auto r = iterate(config, schema, records);
        CHECK(r.index_dir == config.index_dir / ("v" + std::to_string(expected_version)));
        CHECK(r.artifacts.index_version == expected_version);
        CHECK(r.artifacts.schema.version == "v" + std::to_string(expected_version));
        CHECK(r.artifacts.schema.attributes.size() == n);
        manifests.push_back(read_file(r.index_dir / "manifest.json"));
        ++expected_version;
    }
    // earlier versions untouched
    CHECK(read_file(config.index_dir / "manifest.json") == flat_manifest);
    for (std::size_t v = 2; v <= 4; ++v) {
        CHECK(read_file(config.index_dir / ("v" + std::to_string(v)) / "manifest.json") == manifests[v - 2]);
        CHECK(open_index(config.index_dir / ("v" + std::to_string(v))).schema.attributes.size() ==
              std::vector<std::size_t>{3, 7, 10}[v - 2]);
    }
    CHECK(resolve_index_dir(config.index_dir) == config.index_dir / "v4");
    CHECK(open_index(config.index_dir).schema.attributes.size() == 21);
}

TEST_CASE("iterating on the same schema changes only the version") {
    testing::TempDir dir;
    const auto config = testing::synth_config(dir.path(), 400, 4);
    preprocess(config);
    const auto r = iterate(config, *config.schema);
    for (const auto& f : kNumericFiles) CHECK(read_file(config.index_dir / f) == read_file(r.index_dir / f));
    auto a = nlohmann::json::parse(read_file(config.index_dir / "manifest.json"));
    auto b = nlohmann::json::parse(read_file(r.index_dir / "manifest.json"));
    CHECK(a["index_version"] == 1);
    CHECK(b["index_version"] == 2);
    for (auto* m : {&a, &b}) {
        m->erase("index_version");
        m->erase("schema_version");
    }
    CHECK(a == b);
}

TEST_CASE("attributes without records only warn") {
    testing::TempDir dir;
    const auto config = testing::synth_config(dir.path(), 300, 3);
    const auto attrs = generate_corpus({300, 3, 7}).schema.attributes;
    const auto [schema, records] = narrowed(dir.path(), attrs, 4, "spa");
    const auto r = iterate(config, schema, records);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("spa") != std::string::npos);
    CHECK(r.artifacts.schema.attributes.back() == "spa");
    // no flat index yet, so numbering starts at v1
    CHECK(r.index_dir == config.index_dir / "v1");
}

TEST_CASE("stage errors keep their kind") {
    testing::TempDir dir;
    auto config = testing::synth_config(dir.path(), 200, 3);

    std::string msg;
    auto c = config;
    c.extractions.reset();
    CHECK(kind_of([&] { build_index(c); }, &msg) == ErrorKind::Validation);
    CHECK(msg.find("extractions") != std::string::npos);

    c = config;
    c.extractions = dir / "absent.jsonl";
    CHECK(kind_of([&] { build_index(c); }, &msg) == ErrorKind::NotFound);
    CHECK(msg.starts_with("featurize: "));

    c = config;
    c.reviews = dir / "absent.jsonl";
    CHECK(kind_of([&] { build_index(c); }, &msg) == ErrorKind::NotFound);
    CHECK(msg.starts_with("corpus: "));

    write_file(dir / "bad_schema.txt", "location\n");
    CHECK(kind_of([&] { iterate(config, dir / "bad_schema.txt"); }, &msg) == ErrorKind::Validation);
    CHECK(msg.find("unknown attribute") != std::string::npos);

    c = config;
    set_config_value(c, "featurizer", "lda");
    set_config_value(c, "n_topics", "3");
    CHECK(kind_of([&] { iterate(c, *config.schema); }) == ErrorKind::Validation);
}

TEST_CASE("iterate refuses an existing version directory") {
    testing::TempDir dir;
    const auto config = testing::synth_config(dir.path(), 200, 3);
    preprocess(config);
    fs::create_directories(config.index_dir / "v2");  // no manifest, so not counted
    CHECK(kind_of([&] { iterate(config, *config.schema); }) == ErrorKind::Runtime);
}

TEST_CASE("precomputed entities") {
    std::vector<Review> reviews;
    for (const auto& [entity, n] : std::vector<std::pair<std::string, int>>{{"b", 3}, {"a", 3}, {"c", 5}}) {
        for (int i = 0; i < n; ++i) reviews.push_back(testing::review(entity + std::to_string(i), entity, "x"));
    }
    std::vector<Entity> entities(4);
    entities[0].id = "a";
    entities[1].id = "b";
    entities[2].id = "c";
    entities[3].id = "d";
    const Corpus corpus(reviews, entities);
    CHECK(precompute_entities(corpus, 10) == std::vector<std::string>{"c", "a", "b"});
    CHECK(precompute_entities(corpus, 2) == std::vector<std::string>{"c", "a"});
    CHECK(precompute_entities(corpus, 0).empty());
}

TEST_CASE("scopes resolve through stored and on-the-fly trees") {
    testing::TempDir dir;
    auto config = testing::synth_config(dir.path(), 600, 6);
    set_config_value(config, "entity_precompute_limit", "2");
    const auto index = build_index(config);
    CHECK(index.trees.size() == 3);
    CHECK(scope_members(index, "all", "").size() == 600);
    const auto first = scope_members(index, "all", "0");
    CHECK(first == index.trees[0].tree.find(ClusterPath{0})->members);

    // an entity outside the precomputed set gets the same tree it would have had
    const std::string late = index.corpus.entities().back().id;
    REQUIRE(index.tree_for(late) == nullptr);
    const auto members = index.corpus.reviews_of(late);
    const auto tree = build_hierarchy(index.vectors, members, index.sentiments, index.params.hierarchy);
    CHECK(scope_members(index, late, "") == tree.root().members);
    if (!tree.root().is_leaf()) CHECK(scope_members(index, late, "0") == tree.root().children[0].members);

    CHECK(kind_of([&] { scope_members(index, "nope", ""); }) == ErrorKind::NotFound);
    CHECK(kind_of([&] { scope_members(index, "all", "9.9.9"); }) == ErrorKind::NotFound);
    CHECK(kind_of([&] { scope_members(index, "all", "1..2"); }) == ErrorKind::Validation);
}

TEST_CASE("scripts skip comments and name the failing line") {
    testing::TempDir dir;
    const auto config = testing::synth_config(dir.path(), 300, 3);
    const auto index = build_index(config);
    const auto scope = scope_members(index, "all", "");
    const auto ids = run_script(index, "# carpet complaints\n\ntGrep(\"carpet\")\ntSort(sentiment, asc)\n", scope);
    for (auto i : ids) {
        std::string lower = index.corpus.reviews()[i].text;
        for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        CHECK(lower.find("carpet") != std::string::npos);
    }
    for (std::size_t i = 1; i < ids.size(); ++i) CHECK(index.sentiments[ids[i - 1]] <= index.sentiments[ids[i]]);
    CHECK(run_script(index, "", scope) == scope);
    try {
        run_script(index, "tSort(location)\n\ntFilter(location)\n", scope);
        FAIL("expected a parse error");
    } catch (const query::ParseError& e) {
        CHECK(e.detail().starts_with("line 3: "));
    }
}

}  // TEST_SUITE
