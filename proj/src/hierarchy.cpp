#include "revex/hierarchy.hpp"

#include <algorithm>
#include <charconv>

#include "revex/error.hpp"
#include "revex/kmeans.hpp"
#include "revex/pca.hpp"
#include "revex/rng.hpp"

namespace revex {

std::string format_path(std::span<const std::size_t> path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out.push_back('.');
        out += std::to_string(path[i]);
    }
    return out;
}

ClusterPath parse_path(std::string_view text) {
    ClusterPath path;
    if (text.empty()) return path;
    std::size_t start = 0;
    while (true) {
        const auto dot = text.find('.', start);
        const auto part = text.substr(start, dot == std::string_view::npos ? dot : dot - start);
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
            throw ValidationError("malformed cluster path '" + std::string(text) + "'");
        }
        path.push_back(value);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return path;
}

const ClusterNode* ClusterTree::find(std::span<const std::size_t> path) const {
    const ClusterNode* node = &root_;
    for (std::size_t idx : path) {
        if (idx >= node->children.size()) return nullptr;
        node = &node->children[idx];
    }
    return node;
}

ClusterNode* ClusterTree::find(std::span<const std::size_t> path) {
    return const_cast<ClusterNode*>(std::as_const(*this).find(path));
}

namespace {

void visit_node(const ClusterNode& n, const std::function<void(const ClusterNode&)>& fn) {
    fn(n);
    for (const auto& c : n.children) visit_node(c, fn);
}

void visit_node(ClusterNode& n, const std::function<void(ClusterNode&)>& fn) {
    fn(n);
    for (auto& c : n.children) visit_node(c, fn);
}

}  // namespace

void ClusterTree::visit(const std::function<void(const ClusterNode&)>& fn) const { visit_node(root_, fn); }
void ClusterTree::visit(const std::function<void(ClusterNode&)>& fn) { visit_node(root_, fn); }

std::size_t ClusterTree::node_count() const {
    std::size_t n = 0;
    visit([&](const ClusterNode&) { ++n; });
    return n;
}

std::size_t ClusterTree::max_depth() const {
    std::size_t d = 0;
    visit([&](const ClusterNode& node) { d = std::max(d, node.path.size()); });
    return d;
}

std::vector<double> mean_vector(const FeatureMatrix& vectors, std::span<const std::size_t> members) {
    std::vector<double> mean(vectors.dims(), 0.0);
    if (members.empty()) return mean;
    for (std::size_t m : members) {
        const auto v = vectors.values(m);
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += v[j];
    }
    for (double& x : mean) x /= static_cast<double>(members.size());
    return mean;
}

double cluster_avg_sentiment(std::span<const double> sentiments, std::span<const std::size_t> members) {
    if (members.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t m : members) sum += sentiments[m];
    return sum / static_cast<double>(members.size());
}

namespace {

struct Builder {
    const FeatureMatrix& vectors;
    std::span<const double> sentiments;
    const HierarchyParams& params;
    std::size_t min_size;

    ClusterNode make_node(ClusterPath path, std::vector<std::size_t> members) const {
        ClusterNode node;
        node.path = std::move(path);
        node.centroid = mean_vector(vectors, members);
        node.avg_sentiment = cluster_avg_sentiment(sentiments, members);
        node.members = std::move(members);
        return node;
    }

    void split(ClusterNode& node) const {
        const bool is_root = node.path.empty();
        if (!is_root) {
            if (node.path.size() >= params.depth) return;
            if (node.size() < min_size || node.size() < 2) return;
        }
        if (params.depth == 0 || node.size() == 0) return;

        const std::size_t k = std::min(is_root ? params.k1 : params.k2, node.size());
        std::vector<double> points;
        points.reserve(node.size() * vectors.dims());
        for (std::size_t m : node.members) {
            const auto v = vectors.values(m);
            points.insert(points.end(), v.begin(), v.end());
        }
        KMeansOptions options;
        options.max_iter = params.kmeans_max_iter;
        options.tol = params.kmeans_tol;
        const auto result =
            kmeans(PointSet{points, vectors.dims()}, k, derive_seed(params.seed, node.path), options);

        std::vector<std::vector<std::size_t>> groups(k);
        for (std::size_t i = 0; i < node.size(); ++i) {
            groups[result.assignments[i]].push_back(node.members[i]);
        }
        std::erase_if(groups, [](const auto& g) { return g.empty(); });
        if (groups.size() < 2 && !is_root) return;

        for (auto& g : groups) {
            ClusterPath child_path = node.path;
            child_path.push_back(node.children.size());
            node.children.push_back(make_node(std::move(child_path), std::move(g)));
        }

        std::vector<double> centroids;
        for (const auto& c : node.children) centroids.insert(centroids.end(), c.centroid.begin(), c.centroid.end());
        const auto layout = pca_project(centroids, vectors.dims());
        for (std::size_t i = 0; i < node.children.size(); ++i) node.children[i].coord = layout.coords[i];

        // A single effective cluster is identical to its parent; stop there.
        if (node.children.size() < 2) return;
        for (auto& c : node.children) split(c);
    }
};

}  // namespace

ClusterTree build_hierarchy(const FeatureMatrix& vectors, std::span<const std::size_t> members,
                            std::span<const double> sentiments, const HierarchyParams& params) {
    if (params.k1 < 1 || params.k2 < 1) throw ValidationError("k1 and k2 must be >= 1");
    Builder builder{vectors, sentiments, params, params.effective_min_cluster_size()};
    std::vector<std::size_t> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    ClusterNode root = builder.make_node({}, std::move(sorted));
    builder.split(root);
    return ClusterTree(std::move(root));
}

}  // namespace revex
