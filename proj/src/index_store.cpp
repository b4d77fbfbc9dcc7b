#include "revex/index_store.hpp"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "revex/error.hpp"

namespace revex {

using nlohmann::json;
namespace fs = std::filesystem;

bool BuildParams::operator==(const BuildParams& o) const {
    const auto& h = hierarchy;
    const auto& oh = o.hierarchy;
    return mode == o.mode && h.k1 == oh.k1 && h.k2 == oh.k2 && h.depth == oh.depth &&
           h.min_cluster_size == oh.min_cluster_size && h.seed == oh.seed &&
           h.kmeans_max_iter == oh.kmeans_max_iter && h.kmeans_tol == oh.kmeans_tol &&
           summary.n_top == o.summary.n_top && summary.bins == o.summary.bins &&
           lda.n_topics == o.lda.n_topics && lda.alpha == o.lda.alpha && lda.beta == o.lda.beta &&
           lda.iterations == o.lda.iterations && lda.seed == o.lda.seed &&
           lda.min_document_frequency == o.lda.min_document_frequency &&
           lda.inference_iterations == o.lda.inference_iterations &&
           lda.inference_average == o.lda.inference_average &&
           entity_precompute_limit == o.entity_precompute_limit;
}

const TreeArtifact* IndexArtifacts::tree_for(const std::string& entity) const {
    for (const auto& t : trees) {
        if (t.entity == entity) return &t;
    }
    return nullptr;
}

namespace binary {

namespace {

constexpr char kMagic[4] = {'R', 'V', 'X', 'A'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Reader {
    const std::string& bytes;
    const std::string& name;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > bytes.size()) throw ValidationError(name + ": truncated array file");
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(bytes[pos++]);
    }
};

}  // namespace

std::string encode(const Array& a) {
    std::string out(kMagic, 4);
    put_u32(out, 1);
    out.push_back(static_cast<char>(a.dtype));
    out.push_back(static_cast<char>(a.shape.size()));
    out.push_back(0);
    out.push_back(0);
    for (auto d : a.shape) put_u64(out, d);
    switch (a.dtype) {
        case DType::F64:
            for (double v : a.f64) put_u64(out, std::bit_cast<std::uint64_t>(v));
            break;
        case DType::U8:
            out.append(reinterpret_cast<const char*>(a.u8.data()), a.u8.size());
            break;
        case DType::U32:
            for (auto v : a.u32) put_u32(out, v);
            break;
    }
    return out;
}

Array decode(const std::string& bytes, const std::string& name) {
    Reader r{bytes, name};
    r.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ValidationError(name + ": not an array file");
    r.pos = 4;
    if (r.u32() != 1) throw ValidationError(name + ": unsupported array encoding");
    Array a;
    a.dtype = static_cast<DType>(r.u8());
    const std::size_t ndim = r.u8();
    r.u8();
    r.u8();
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
        a.shape.push_back(r.u64());
        count *= a.shape.back();
    }
    switch (a.dtype) {
        case DType::F64:
            r.need(count * 8);
            a.f64.resize(count);
            for (auto& v : a.f64) v = std::bit_cast<double>(r.u64());
            break;
        case DType::U8:
            r.need(count);
            a.u8.assign(bytes.begin() + static_cast<std::ptrdiff_t>(r.pos),
                        bytes.begin() + static_cast<std::ptrdiff_t>(r.pos + count));
            r.pos += count;
            break;
        case DType::U32:
            r.need(count * 4);
            a.u32.resize(count);
            for (auto& v : a.u32) v = r.u32();
            break;
        default:
            throw ValidationError(name + ": unknown dtype");
    }
    if (r.pos != bytes.size()) throw ValidationError(name + ": trailing bytes in array file");
    return a;
}

}  // namespace binary

namespace {

json params_to_json(const BuildParams& p) {
    return {
        {"featurizer", std::string(to_string(p.mode))},
        {"k1", p.hierarchy.k1},
        {"k2", p.hierarchy.k2},
        {"depth", p.hierarchy.depth},
        {"min_cluster_size", p.hierarchy.min_cluster_size},
        {"seed", p.hierarchy.seed},
        {"kmeans_max_iter", p.hierarchy.kmeans_max_iter},
        {"kmeans_tol", p.hierarchy.kmeans_tol},
        {"n_top", p.summary.n_top},
        {"bins", p.summary.bins},
        {"n_topics", p.lda.n_topics},
        {"alpha", p.lda.alpha},
        {"beta", p.lda.beta},
        {"iterations", p.lda.iterations},
        {"lda_seed", p.lda.seed},
        {"min_document_frequency", p.lda.min_document_frequency},
        {"inference_iterations", p.lda.inference_iterations},
        {"inference_average", p.lda.inference_average},
        {"entity_precompute_limit", p.entity_precompute_limit},
    };
}

BuildParams params_from_json(const json& j) {
    BuildParams p;
    p.mode = feature_mode_from_string(j.at("featurizer").get<std::string>());
    p.hierarchy.k1 = j.at("k1");
    p.hierarchy.k2 = j.at("k2");
    p.hierarchy.depth = j.at("depth");
    p.hierarchy.min_cluster_size = j.at("min_cluster_size");
    p.hierarchy.seed = j.at("seed");
    p.hierarchy.kmeans_max_iter = j.at("kmeans_max_iter");
    p.hierarchy.kmeans_tol = j.at("kmeans_tol");
    p.summary.n_top = j.at("n_top");
    p.summary.bins = j.at("bins");
    p.lda.n_topics = j.at("n_topics");
    p.lda.alpha = j.at("alpha");
    p.lda.beta = j.at("beta");
    p.lda.iterations = j.at("iterations");
    p.lda.seed = j.at("lda_seed");
    p.lda.min_document_frequency = j.at("min_document_frequency");
    p.lda.inference_iterations = j.at("inference_iterations");
    p.lda.inference_average = j.at("inference_average");
    p.entity_precompute_limit = j.at("entity_precompute_limit");
    return p;
}

json terms_to_json(const std::vector<TermScore>& terms) {
    json arr = json::array();
    for (const auto& t : terms) arr.push_back({t.term, t.score});
    return arr;
}

std::vector<TermScore> terms_from_json(const json& arr) {
    std::vector<TermScore> out;
    for (const auto& t : arr) out.push_back({t.at(0).get<std::string>(), t.at(1).get<double>()});
    return out;
}

}  // namespace

json summary_to_json(const ClusterSummary& s) {
    json attrs = json::array();
    for (std::size_t i = 0; i < s.attributes.size(); ++i) {
        json a = {{"name", s.attributes[i]},
                  {"counts", s.histograms[i].counts()},
                  {"total", s.histograms[i].total()},
                  {"present", s.attr_present[i]}};
        if (s.attr_means[i]) a["mean"] = *s.attr_means[i];
        attrs.push_back(std::move(a));
    }
    return {{"size", s.size},
            {"avg_chars", s.avg_chars},
            {"avg_words", s.avg_words},
            {"avg_sentences", s.avg_sentences},
            {"avg_sentiment", s.avg_sentiment},
            {"top_words", terms_to_json(s.top_words)},
            {"top_bigrams", terms_to_json(s.top_bigrams)},
            {"attributes", attrs}};
}

ClusterSummary summary_from_json(const json& j) {
    ClusterSummary s;
    s.size = j.at("size");
    s.avg_chars = j.at("avg_chars");
    s.avg_words = j.at("avg_words");
    s.avg_sentences = j.at("avg_sentences");
    s.avg_sentiment = j.at("avg_sentiment");
    s.top_words = terms_from_json(j.at("top_words"));
    s.top_bigrams = terms_from_json(j.at("top_bigrams"));
    for (const auto& a : j.at("attributes")) {
        s.attributes.push_back(a.at("name"));
        s.histograms.push_back(Histogram::from_counts(a.at("counts").get<std::vector<std::uint64_t>>()));
        s.attr_present.push_back(a.at("present"));
        if (a.contains("mean")) {
            s.attr_means.emplace_back(a.at("mean").get<double>());
        } else {
            s.attr_means.emplace_back(std::nullopt);
        }
    }
    return s;
}

namespace {

void save_tree(const fs::path& dir, const TreeArtifact& t, std::size_t dims) {
    fs::create_directories(dir);
    json nodes = json::array();
    binary::Array members{binary::DType::U32, {0}, {}, {}, {}};
    binary::Array centroids{binary::DType::F64, {0, dims}, {}, {}, {}};
    std::size_t count = 0;
    t.tree.visit([&](const ClusterNode& n) {
        nodes.push_back({{"path", format_path(n.path)},
                         {"size", n.size()},
                         {"children", n.children.size()},
                         {"label", n.label},
                         {"x", n.coord[0]},
                         {"y", n.coord[1]},
                         {"avg_sentiment", n.avg_sentiment}});
        for (auto m : n.members) members.u32.push_back(static_cast<std::uint32_t>(m));
        centroids.f64.insert(centroids.f64.end(), n.centroid.begin(), n.centroid.end());
        ++count;
    });
    members.shape[0] = members.u32.size();
    centroids.shape[0] = count;
    write_file(dir / "tree.json", json{{"entity", t.entity}, {"nodes", nodes}}.dump(1) + "\n");
    write_file(dir / "members.bin", binary::encode(members));
    write_file(dir / "centroids.bin", binary::encode(centroids));

    json summaries = json::object();
    for (const auto& [path, s] : t.summaries) summaries[path] = summary_to_json(s);
    write_file(dir / "summaries.json", summaries.dump(1) + "\n");
}

TreeArtifact open_tree(const fs::path& dir) {
    TreeArtifact t;
    const json tree = json::parse(read_file(dir / "tree.json"));
    t.entity = tree.at("entity");
    const auto members = binary::decode(read_file(dir / "members.bin"), "members.bin");
    const auto centroids = binary::decode(read_file(dir / "centroids.bin"), "centroids.bin");
    const std::size_t dims = centroids.shape.size() == 2 ? centroids.shape[1] : 0;

    std::size_t member_pos = 0;
    std::size_t index = 0;
    for (const auto& jn : tree.at("nodes")) {
        const ClusterPath path = parse_path(jn.at("path").get<std::string>());
        ClusterNode node;
        node.path = path;
        const std::size_t size = jn.at("size");
        if (member_pos + size > members.u32.size()) throw ValidationError("members.bin shorter than tree.json");
        node.members.assign(members.u32.begin() + static_cast<std::ptrdiff_t>(member_pos),
                            members.u32.begin() + static_cast<std::ptrdiff_t>(member_pos + size));
        member_pos += size;
        node.centroid.assign(centroids.f64.begin() + static_cast<std::ptrdiff_t>(index * dims),
                             centroids.f64.begin() + static_cast<std::ptrdiff_t>((index + 1) * dims));
        node.label = jn.at("label");
        node.coord = {jn.at("x").get<double>(), jn.at("y").get<double>()};
        node.avg_sentiment = jn.at("avg_sentiment");
        ++index;
        if (path.empty()) {
            t.tree = ClusterTree(std::move(node));
            continue;
        }
        ClusterPath parent_path(path.begin(), path.end() - 1);
        ClusterNode* parent = t.tree.find(parent_path);
        if (!parent || parent->children.size() != path.back()) {
            throw ValidationError("tree.json nodes out of order at path " + format_path(path));
        }
        parent->children.push_back(std::move(node));
    }

    const json summaries = json::parse(read_file(dir / "summaries.json"));
    for (const auto& [path, s] : summaries.items()) t.summaries.emplace(path, summary_from_json(s));
    return t;
}

}  // namespace

std::string save_index(const fs::path& dir, const IndexArtifacts& a) {
    fs::create_directories(dir);
    const std::size_t rows = a.vectors.rows();
    const std::size_t dims = a.vectors.dims();
    if (rows != a.corpus.size() || a.sentiments.size() != rows) {
        throw ValidationError("index artifacts are inconsistent with the corpus");
    }
    if (a.trees.empty()) throw ValidationError("index artifacts contain no cluster tree");

    std::vector<std::string> files;
    auto put = [&](const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        files.push_back(name);
    };

    write_reviews_jsonl(dir / "reviews.jsonl", a.corpus.reviews());
    files.push_back("reviews.jsonl");
    if (a.corpus.has_entity_info()) {
        write_entities_jsonl(dir / "entities.jsonl", a.corpus.entities());
        files.push_back("entities.jsonl");
    }
    put("schema.txt", format_schema(a.schema));
    put("lexicon.tsv", a.lexicon.to_tsv());
    put("vectors.bin", binary::encode({binary::DType::F64, {rows, dims}, a.vectors.raw_values(), {}, {}}));
    put("present.bin", binary::encode({binary::DType::U8, {rows, dims}, {}, a.vectors.raw_present(), {}}));
    put("sentiment.bin", binary::encode({binary::DType::F64, {rows}, a.sentiments, {}, {}}));
    if (a.lda) {
        std::string vocab;
        for (const auto& w : a.lda->vocabulary()) vocab += w + "\n";
        put("lda_vocab.txt", vocab);
        put("lda_counts.bin", binary::encode({binary::DType::U32,
                                              {a.lda->n_topics(), a.lda->vocabulary_size()},
                                              {}, {}, a.lda->topic_word_counts()}));
    }

    json trees = json::array();
    for (std::size_t i = 0; i < a.trees.size(); ++i) {
        const std::string sub = i == 0 ? "trees/all" : "trees/e" + std::to_string(i);
        save_tree(dir / sub, a.trees[i], dims);
        trees.push_back({{"entity", a.trees[i].entity}, {"dir", sub}});
    }

    json manifest = {
        {"format_version", a.format_version},
        {"index_version", a.index_version},
        {"feature_mode", std::string(to_string(a.vectors.mode()))},
        {"dims", dims},
        {"attributes", a.schema.attributes},
        {"schema_version", a.schema.version},
        {"review_count", rows},
        {"entities_enabled", a.corpus.has_entity_info()},
        {"params", params_to_json(a.params)},
        {"trees", trees},
        {"files", files},
    };
    if (a.lda) {
        manifest["lda"] = {{"n_topics", a.lda->n_topics()},
                           {"alpha", a.lda->alpha()},
                           {"beta", a.lda->beta()},
                           {"seed", a.lda->seed()}};
    }
    const std::string text = manifest.dump(2) + "\n";
    write_file(dir / "manifest.json", text);
    return text;
}

IndexArtifacts open_index(const fs::path& dir) {
    if (!fs::exists(dir / "manifest.json")) {
        throw NotFoundError("no manifest in " + dir.string() + "; run `revex preprocess` first");
    }
    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("manifest.json is malformed: ") + e.what());
    }
    const int version = manifest.value("format_version", 0);
    if (version != kIndexFormatVersion) {
        throw ValidationError("index format version mismatch: index has version " + std::to_string(version) +
                              ", reader expects " + std::to_string(kIndexFormatVersion) +
                              "; re-run `revex preprocess` to rebuild the index");
    }

    IndexArtifacts a;
    try {
        a.format_version = version;
        a.index_version = manifest.at("index_version");
        a.params = params_from_json(manifest.at("params"));

        auto reviews = load_reviews(dir / "reviews.jsonl", ReviewFormat::Jsonl);
        std::vector<Entity> entities;
        if (manifest.at("entities_enabled").get<bool>()) entities = load_entities(dir / "entities.jsonl");
        a.corpus = Corpus(std::move(reviews), std::move(entities));

        a.schema = parse_schema(read_file(dir / "schema.txt"), false);
        a.schema.version = manifest.at("schema_version");
        a.lexicon = SentimentLexicon::parse(read_file(dir / "lexicon.tsv"));

        const auto mode = feature_mode_from_string(manifest.at("feature_mode").get<std::string>());
        auto values = binary::decode(read_file(dir / "vectors.bin"), "vectors.bin");
        auto present = binary::decode(read_file(dir / "present.bin"), "present.bin");
        if (values.shape.size() != 2) throw ValidationError("vectors.bin must be 2-D");
        a.vectors = FeatureMatrix::from_raw(mode, values.shape[0], values.shape[1], std::move(values.f64),
                                            std::move(present.u8));
        a.sentiments = binary::decode(read_file(dir / "sentiment.bin"), "sentiment.bin").f64;

        if (manifest.contains("lda")) {
            const auto& l = manifest.at("lda");
            std::vector<std::string> vocab;
            const std::string text = read_file(dir / "lda_vocab.txt");
            std::size_t start = 0;
            while (start < text.size()) {
                const auto nl = text.find('\n', start);
                vocab.push_back(text.substr(start, nl - start));
                if (nl == std::string::npos) break;
                start = nl + 1;
            }
            auto counts = binary::decode(read_file(dir / "lda_counts.bin"), "lda_counts.bin");
            a.lda = LdaModel(l.at("n_topics"), l.at("alpha"), l.at("beta"), l.at("seed"), std::move(vocab),
                             std::move(counts.u32));
        }

        for (const auto& t : manifest.at("trees")) a.trees.push_back(open_tree(dir / t.at("dir").get<std::string>()));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("index is malformed: ") + e.what());
    }
    if (a.vectors.rows() != a.corpus.size() || a.sentiments.size() != a.corpus.size()) {
        throw ValidationError("index arrays do not match the review count");
    }
    return a;
}

std::size_t latest_index_version(const fs::path& root) {
    std::size_t best = 0;
    if (!fs::is_directory(root)) return 0;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() < 2 || name[0] != 'v') continue;
        std::size_t n = 0;
        bool digits = true;
        for (std::size_t i = 1; i < name.size(); ++i) {
            if (name[i] < '0' || name[i] > '9') {
                digits = false;
                break;
            }
            n = n * 10 + static_cast<std::size_t>(name[i] - '0');
        }
        if (digits && fs::exists(entry.path() / "manifest.json")) best = std::max(best, n);
    }
    return best;
}

fs::path resolve_index_dir(const fs::path& root, std::optional<std::size_t> version) {
    if (version) {
        const fs::path p = root / ("v" + std::to_string(*version));
        if (!fs::exists(p / "manifest.json")) throw NotFoundError("index version " + p.string() + " not found");
        return p;
    }
    const std::size_t latest = latest_index_version(root);
    if (latest > 0) return root / ("v" + std::to_string(latest));
    return root;
}

}  // namespace revex
