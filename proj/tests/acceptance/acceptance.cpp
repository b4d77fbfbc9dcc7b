// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "query_fixture.hpp"
#include "revex/api_service.hpp"
#include "revex/kmeans.hpp"
#include "revex/labeling.hpp"
#include "revex/lda.hpp"
#include "revex/pca.hpp"
#include "revex/pipeline.hpp"
#include "revex/query.hpp"
#include "revex/summarize.hpp"
#include "support.hpp"

using namespace revex;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Thrown by expect(); carries the first violated condition.
struct Violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Violation(what);
}

struct Runner {
    int failures = 0;

    void check(const std::string& name, const std::function<std::string()>& body) {
        std::string detail;
        bool ok = false;
        try {
            detail = body();
            ok = true;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        if (!ok) ++failures;
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    }
};

// The 10k-review synthetic corpus, preprocessed once and shared.
struct SynthIndex {
    testing::TempDir dir;
    PipelineConfig config;
    IndexArtifacts index;
    double seconds = 0.0;
};

SynthIndex& synth_index() {
    static std::unique_ptr<SynthIndex> s;
    if (!s) {
        auto out = std::make_unique<SynthIndex>();
        write_corpus(out->dir.path(), generate_corpus());
        out->config = load_config(out->dir / "config.txt");
        const auto start = Clock::now();
        preprocess(out->config);
        out->seconds = seconds_since(start);
        out->index = open_index(out->config.index_dir);
        s = std::move(out);
    }
    return *s;
}

std::string hierarchy_shape() {
    auto& s = synth_index();
    const auto& p = s.index.params.hierarchy;
    expect(p.k1 == 5 && p.k2 == 3 && p.depth == 5, "config is not K1=5, K2=3, d=5");
    const auto& tree = s.index.trees.front().tree;
    expect(tree.root().size() == 10000, "root does not hold every review");
    expect(tree.max_depth() <= 5, "depth exceeds 5");
    std::size_t nodes = 0;
    tree.visit([&](const ClusterNode& n) {
        ++nodes;
        if (n.is_leaf()) return;
        expect(n.children.size() <= (n.path.empty() ? 5u : 3u), "fan-out exceeded at " + format_path(n.path));
        std::vector<std::size_t> joined;
        for (const auto& c : n.children) {
            expect(!c.members.empty(), "empty child at " + format_path(c.path));
            joined.insert(joined.end(), c.members.begin(), c.members.end());
        }
        std::sort(joined.begin(), joined.end());
        expect(std::adjacent_find(joined.begin(), joined.end()) == joined.end(),
               "children overlap at " + format_path(n.path));
        expect(joined == n.members, "children do not cover parent at " + format_path(n.path));
    });
    // every precomputed entity tree obeys the same bounds
    for (const auto& t : s.index.trees) {
        expect(t.tree.max_depth() <= 5, "entity tree too deep: " + t.entity);
        t.tree.visit([&](const ClusterNode& n) {
            expect(n.children.size() <= (n.path.empty() ? 5u : 3u), "entity fan-out exceeded: " + t.entity);
        });
    }
    expect(s.seconds < 60.0, "preprocess took " + std::to_string(s.seconds) + " s");
    std::ostringstream out;
    out << nodes << " nodes, root fan-out " << tree.root().children.size() << ", depth " << tree.max_depth()
        << ", preprocess " << s.seconds << " s";
    return out.str();
}

std::string kmeans_oracle() {
    Rng rng(2024);
    double worst = 0.0;
    const int instances = 200;
    for (int t = 0; t < instances; ++t) {
        const std::size_t n = 2 + rng.index(7);
        std::vector<double> xs(n);
        for (auto& x : xs) x = 20.0 * rng.uniform() - 10.0;
        const auto r = kmeans({xs, 1}, 2, 7000 + static_cast<std::uint64_t>(t), {.max_iter = 100, .tol = 0.0, .restarts = 10});
        const double best = testing::best_two_partition(xs);
        worst = std::max(worst, std::abs(r.inertia - best));
        expect(std::abs(r.inertia - best) <= 1e-9, "instance " + std::to_string(t) + " off by " +
                                                       std::to_string(r.inertia - best));
    }
    return std::to_string(instances) + " instances, max deviation " + std::to_string(worst);
}

std::string pca_oracle() {
    Rng rng(77);
    double worst = 0.0, worst_ortho = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t dims = 2 + rng.index(40);
        std::vector<double> pts(5 * dims);
        for (auto& v : pts) v = rng.normal();
        const auto p = pca_project(pts, dims);
        const auto o = testing::covariance_pca(pts, 5, dims);
        expect(p.components.size() == o.components.size(), "component count differs");
        for (std::size_t j = 0; j < p.components.size(); ++j) {
            for (std::size_t d = 0; d < dims; ++d) worst = std::max(worst, std::abs(p.components[j][d] - o.components[j][d]));
            for (std::size_t i = 0; i < 5; ++i) worst = std::max(worst, std::abs(p.coords[i][j] - o.coords[i][j]));
        }
        for (std::size_t a = 0; a < p.components.size(); ++a) {
            for (std::size_t b = 0; b < p.components.size(); ++b) {
                double dot = 0.0;
                for (std::size_t d = 0; d < dims; ++d) dot += p.components[a][d] * p.components[b][d];
                worst_ortho = std::max(worst_ortho, std::abs(dot - (a == b ? 1.0 : 0.0)));
            }
        }
    }
    expect(worst <= 1e-8, "projection deviation " + std::to_string(worst));
    expect(worst_ortho <= 1e-9, "orthonormality deviation " + std::to_string(worst_ortho));
    std::ostringstream out;
    out << "100 centroid sets, max deviation " << worst << ", orthonormality " << worst_ortho;
    return out.str();
}

std::string tfidf_oracle() {
    Rng rng(5150);
    std::size_t compared = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto docs = testing::random_docs(rng, 1 + rng.index(50));
        const Corpus c = testing::corpus_of(docs);
        const TermStatistics stats(c);
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (rng.uniform() < 0.6) members.push_back(i);
        }
        for (int gram : {1, 2}) {
            const auto expected = testing::brute_tfidf(docs, members, gram);
            const auto got = tfidf_top_terms(stats, members, expected.size() + 1, gram);
            expect(got.size() == expected.size(), "term count differs");
            for (std::size_t i = 0; i < got.size(); ++i) {
                expect(got[i].term == expected[i].term, "ordering differs at rank " + std::to_string(i));
                expect(std::abs(got[i].score - expected[i].score) <= 1e-9, "score differs for " + got[i].term);
            }
            compared += got.size();
        }
    }
    return "100 corpora, " + std::to_string(compared) + " ranked terms identical";
}

std::string lda_recovery() {
    const std::vector<std::vector<std::string>> vocab = {
        {"pool", "swim", "towel", "sunbed", "water", "slide", "lounge", "cabana", "splash", "lifeguard"},
        {"pasta", "pizza", "dessert", "waiter", "menu", "wine", "salad", "steak", "soup", "bread"},
        {"carpet", "stain", "mold", "dust", "sheets", "pillow", "blanket", "curtain", "mattress", "smell"}};
    // planted topic-word distributions: Zipf-like weights within each vocabulary
    std::vector<std::vector<double>> planted(3, std::vector<double>(10));
    for (auto& row : planted) {
        double z = 0;
        for (std::size_t w = 0; w < 10; ++w) z += row[w] = 1.0 / static_cast<double>(w + 1);
        for (auto& v : row) v /= z;
    }
    Rng rng(31337);
    std::vector<std::string> docs;
    for (int d = 0; d < 300; ++d) {
        const std::size_t main = static_cast<std::size_t>(d % 3);
        std::string doc;
        for (int i = 0; i < 40; ++i) {
            const std::size_t topic = rng.uniform() < 0.8 ? main : rng.index(3);
            double u = rng.uniform();
            std::size_t w = 0;
            while (w + 1 < 10 && u >= planted[topic][w]) u -= planted[topic][w++];
            doc += vocab[topic][w] + " ";
        }
        docs.push_back(doc);
    }
    LdaParams p;
    p.n_topics = 3;
    p.iterations = 200;
    p.seed = 8;
    const auto start = Clock::now();
    const auto model = fit_lda(docs, p);
    const auto again = fit_lda(docs, p);
    const double elapsed = seconds_since(start);

    double cos[3][3];
    for (std::size_t k = 0; k < 3; ++k) {
        const auto row = model.topic(k);
        for (std::size_t t = 0; t < 3; ++t) {
            std::vector<double> truth(model.vocabulary_size(), 0.0);
            for (std::size_t w = 0; w < 10; ++w) {
                const auto id = model.word_id(vocab[t][w]);
                expect(id >= 0, "planted word missing from vocabulary: " + vocab[t][w]);
                truth[static_cast<std::size_t>(id)] = planted[t][w];
            }
            double dot = 0, na = 0, nb = 0;
            for (std::size_t v = 0; v < truth.size(); ++v) {
                dot += row[v] * truth[v];
                na += row[v] * row[v];
                nb += truth[v] * truth[v];
            }
            cos[k][t] = dot / std::sqrt(na * nb);
        }
    }
    // greedy matching: repeatedly take the best remaining (learned, planted) pair
    std::set<std::size_t> used_k, used_t;
    double weakest = 1.0;
    for (int round = 0; round < 3; ++round) {
        double best = -1;
        std::size_t bk = 0, bt = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t t = 0; t < 3; ++t) {
                if (!used_k.count(k) && !used_t.count(t) && cos[k][t] > best) {
                    best = cos[k][t];
                    bk = k;
                    bt = t;
                }
            }
        }
        used_k.insert(bk);
        used_t.insert(bt);
        weakest = std::min(weakest, best);
    }
    expect(weakest >= 0.8, "weakest matched cosine " + std::to_string(weakest));
    const auto& a = model.topic_word();
    const auto& b = again.topic_word();
    expect(model == again && a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0,
           "fixed-seed reruns differ");
    expect(elapsed < 30.0, "two fits took " + std::to_string(elapsed) + " s");
    std::ostringstream out;
    out << "weakest matched cosine " << weakest << ", reruns bitwise identical, " << elapsed << " s for two fits";
    return out.str();
}

std::string summary_consistency() {
    auto& s = synth_index();
    double worst = 0.0;
    std::size_t parents = 0;
    for (const auto& t : s.index.trees) {
        t.tree.visit([&](const ClusterNode& n) {
            if (n.is_leaf()) return;
            ++parents;
            const auto& ps = t.summaries.at(format_path(n.path));
            double chars = 0, words = 0, sentences = 0, sentiment = 0;
            for (const auto& c : n.children) {
                const auto& cs = t.summaries.at(format_path(c.path));
                const double w = static_cast<double>(cs.size);
                chars += w * cs.avg_chars;
                words += w * cs.avg_words;
                sentences += w * cs.avg_sentences;
                sentiment += w * cs.avg_sentiment;
            }
            const double total = static_cast<double>(ps.size);
            for (double d : {chars / total - ps.avg_chars, words / total - ps.avg_words,
                             sentences / total - ps.avg_sentences, sentiment / total - ps.avg_sentiment}) {
                worst = std::max(worst, std::abs(d));
            }
        });
    }
    expect(worst <= 1e-9, "max deviation " + std::to_string(worst));
    std::ostringstream out;
    out << parents << " parent nodes across " << s.index.trees.size() << " trees, max deviation " << worst;
    return out.str();
}

std::string histogram_metric() {
    Rng rng(4242);
    for (int t = 0; t < 1000; ++t) {
        const auto a = testing::random_histogram(rng, 8);
        const auto b = testing::random_histogram(rng, 8);
        const auto c = testing::random_histogram(rng, 8);
        const double ab = histogram_distance(a, b);
        expect(histogram_distance(a, a) == 0.0, "identity fails");
        expect(ab == histogram_distance(b, a), "symmetry fails");
        expect(histogram_distance(a, c) <= ab + histogram_distance(b, c) + 1e-12, "triangle inequality fails");
        expect(ab >= 0.0 && ab <= 2.0, "range fails");
    }
    const auto x = Histogram::from_counts({3, 0, 1, 0});
    const auto scaled = Histogram::from_counts({6, 0, 2, 0});
    const auto disjoint = Histogram::from_counts({0, 5, 0, 2});
    expect(histogram_distance(x, scaled) == 0.0, "identical shapes not at 0");
    expect(histogram_distance(x, disjoint) == 2.0, "disjoint supports not at 2");
    return "1000 triples; endpoints exactly 0 and 2";
}

std::string query_language() {
    const std::vector<std::string> attrs = {"cleanliness", "staff", "food", "location"};
    const std::vector<std::pair<std::string, std::string>> golden = {
        {"tSort(cleanliness)", "tSort(cleanliness, desc)"},
        {"tSort( Staff , asc )", "tSort(staff, asc)"},
        {"tFilter(food, >= 0.5)", "tFilter(food, >= 0.5)"},
        {"tFilter(sentiment,<-0.25)", "tFilter(sentiment, < -0.25)"},
        {"tGrep(/clean(ed)?/i)", "tGrep(/clean(ed)?/i)"},
        {"tGrep(\"great location\")", "tGrep(/great location/i)"},
        {"tColor(length)", "tColor(length)"},
        {"tReset()", "tReset()"},
    };
    for (const auto& [in, canonical] : golden) {
        expect(query::parse(in, attrs).to_string() == canonical, "golden parse differs for " + in);
    }
    const std::vector<std::pair<std::string, std::size_t>> errors = {
        {"", 0},           {"tSrot(food)", 0},     {"tSort food", 6},        {"tSort(wifi)", 6},
        {"tSort(food, up)", 12}, {"tSort(food", 10}, {"tFilter(food)", 12},  {"tFilter(food, ~ 1)", 14},
        {"tFilter(food, > x)", 16}, {"tGrep()", 6},  {"tGrep(/abc)", 6},     {"tGrep(/[a/)", 6},
        {"tColor(food, staff)", 11}, {"tReset(x)", 7},
    };
    for (const auto& [in, pos] : errors) {
        try {
            query::parse(in, attrs);
            expect(false, "accepted invalid command '" + in + "'");
        } catch (const query::ParseError& e) {
            expect(e.position() == pos, "wrong error position for '" + in + "'");
        }
    }

    const auto f = testing::make_query_fixture(1000, 17);
    const query::ReviewStore store(f.corpus, f.vectors, f.sentiments);
    Rng rng(1000);
    std::size_t replays = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<std::size_t> scope;
        for (std::size_t i = 0; i < 1000; ++i) {
            if (t % 4 == 0 || rng.uniform() < 0.4) scope.push_back(i);
        }
        std::vector<testing::ChainStep> chain;
        std::vector<std::string> wire;
        auto session = query::start_session(scope);
        const auto len = 1 + rng.index(6);
        for (std::size_t i = 0; i < len; ++i) {
            chain.push_back(testing::random_step(rng, attrs));
            wire.push_back(chain.back().text);
            query::apply_in_place(session, query::parse(wire.back(), attrs), store);
        }
        const auto naive = testing::naive_evaluate(f, chain, scope);
        expect(session.working_set == naive, "local result differs from naive scan on chain " + std::to_string(t));
        expect(query::evaluate_remote(wire, scope, attrs, store) == naive,
               "remote result differs from naive scan on chain " + std::to_string(t));
        expect(query::evaluate_remote(session.history, session.initial, store) == session.working_set,
               "replay differs on chain " + std::to_string(t));
        ++replays;
    }
    return std::to_string(golden.size()) + " golden parses, " + std::to_string(errors.size()) +
           " error cases, " + std::to_string(replays) + " chains agree with the naive scan";
}

std::string labeling_rule() {
    const std::vector<std::string> attrs = {"cleanliness", "staff", "food", "location"};
    // both positive, both led by cleanliness; the weaker one should fall to food
    const std::vector<double> strong = {10.0, 4.0, 1.0, 0.0};
    const std::vector<double> weak = {6.0, 1.0, 5.0, 0.0};
    for (bool swapped : {false, true}) {
        std::vector<SiblingLabelInput> in = {{rank_attributes(strong, 1, attrs), 1}, {rank_attributes(weak, 1, attrs), 1}};
        if (swapped) std::swap(in[0], in[1]);
        auto labels = label_siblings(in);
        if (swapped) std::swap(labels[0], labels[1]);
        expect(labels == std::vector<std::string>{"cleanliness", "food"}, "disambiguation gave " + labels[0] + "/" + labels[1]);
    }
    Rng rng(99);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> c(attrs.size());
        for (auto& x : c) x = 5.0 * rng.normal();
        const double s = 1e-3 + 1e3 * rng.uniform();
        auto scaled = c;
        for (auto& x : scaled) x *= s;
        const double sentiment = rng.normal();
        expect(label_cluster(c, sentiment, attrs) == label_cluster(scaled, sentiment, attrs),
               "scaling changed the label");
    }
    return "runner-up assigned to the weaker sibling; 1000 scalings keep the argmax label";
}

std::string pagination() {
    testing::TempDir dir;
    std::string reviews, records;
    for (int i = 0; i < 25; ++i) {
        const std::string id = "p" + std::to_string(i);
        reviews += nlohmann::json{{"id", id}, {"entity_id", "e"}, {"text", "review " + id}}.dump() + "\n";
        records += nlohmann::json{{"review_id", id}, {"attribute", "room"}, {"score", 0.1 * (i % 7) - 0.3}}.dump() + "\n";
    }
    write_file(dir / "reviews.jsonl", reviews);
    write_file(dir / "extractions.jsonl", records);
    write_file(dir / "schema.txt", "room\n");
    write_file(dir / "config.txt", "reviews = reviews.jsonl\nschema = schema.txt\nextractions = extractions.jsonl\n");
    const auto config = load_config(dir / "config.txt");
    preprocess(config);
    ApiService api(open_index(config.index_dir), config.index_dir);
    const auto members = api.index().trees.front().tree.root().members;
    expect(members.size() == 25, "cluster does not have 25 members");

    std::vector<std::size_t> sizes;
    std::vector<std::string> seen;
    for (std::size_t offset = 0;; offset += 10) {
        const auto r = api.handle("GET", "/api/reviews", {{"offset", std::to_string(offset)}}, "");
        expect(r.status == 200, "status " + std::to_string(r.status));
        const auto& page = r.body["reviews"];
        if (page.empty()) break;
        sizes.push_back(page.size());
        for (const auto& rev : page) seen.push_back(rev["id"]);
    }
    expect(sizes == std::vector<std::size_t>{10, 10, 5}, "page sizes are not 10/10/5");
    expect(std::set<std::string>(seen.begin(), seen.end()).size() == 25, "duplicates across pages");
    std::vector<std::string> expected;
    for (auto m : members) expected.push_back(api.index().corpus.reviews()[m].id);
    expect(seen == expected, "pages do not enumerate the cluster in order");
    return "pages 10/10/5, 25 distinct reviews in cluster order";
}

std::string reproducibility() {
    testing::TempDir dir;
    write_corpus(dir.path(), generate_corpus());
    auto config = load_config(dir / "config.txt");
    config.index_dir = dir / "run1";
    preprocess(config);
    config.index_dir = dir / "run2";
    preprocess(config);
    std::size_t files = 0, bytes = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir / "run1")) {
        if (!entry.is_regular_file() || entry.path().extension() != ".bin") continue;
        const auto rel = fs::relative(entry.path(), dir / "run1");
        const auto a = read_file(entry.path());
        expect(fs::exists(dir / "run2" / rel), "missing in second run: " + rel.string());
        expect(a == read_file(dir / "run2" / rel), "bytes differ: " + rel.string());
        ++files;
        bytes += a.size();
    }
    expect(files > 0, "no numeric artifacts found");
    return std::to_string(files) + " numeric files (" + std::to_string(bytes) + " bytes) identical";
}

}  // namespace

int main() {
    Runner r;
    r.check("hierarchy shape", hierarchy_shape);
    r.check("k-means oracle", kmeans_oracle);
    r.check("PCA oracle", pca_oracle);
    r.check("TF-IDF oracle", tfidf_oracle);
    r.check("LDA recovery", lda_recovery);
    r.check("summary consistency", summary_consistency);
    r.check("histogram distance metric", histogram_metric);
    r.check("query language", query_language);
    r.check("labeling rule", labeling_rule);
    r.check("pagination", pagination);
    r.check("end-to-end reproducibility", reproducibility);
    std::cout << (r.failures == 0 ? "all criteria pass" : std::to_string(r.failures) + " criteria failed")
              << std::endl;
    return r.failures == 0 ? 0 : 1;
}
