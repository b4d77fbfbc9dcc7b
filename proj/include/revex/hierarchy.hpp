#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revex/featurize.hpp"

namespace revex {

using ClusterPath = std::vector<std::size_t>;

/// "2.0.1" ↔ {2,0,1}; the root is the empty string.
std::string format_path(std::span<const std::size_t> path);
/// Throws ValidationError on malformed input.
ClusterPath parse_path(std::string_view text);

struct ClusterNode {
    ClusterPath path;
    std::vector<std::size_t> members;  // corpus review positions, ascending
    std::vector<double> centroid;
    std::array<double, 2> coord{0.0, 0.0};  // layout among siblings
    double avg_sentiment = 0.0;
    std::string label;
    std::vector<ClusterNode> children;

    std::size_t size() const noexcept { return members.size(); }
    bool is_leaf() const noexcept { return children.empty(); }
    bool operator==(const ClusterNode&) const = default;
};

struct HierarchyParams {
    std::size_t k1 = 5;
    std::size_t k2 = 3;
    std::size_t depth = 5;
    std::size_t min_cluster_size = 0;  // 0 selects max(2*k2, 20)
    std::uint64_t seed = 42;
    std::size_t kmeans_max_iter = 100;
    double kmeans_tol = 1e-4;

    std::size_t effective_min_cluster_size() const {
        return min_cluster_size > 0 ? min_cluster_size : std::max<std::size_t>(2 * k2, 20);
    }
};

class ClusterTree {
public:
    ClusterTree() = default;
    explicit ClusterTree(ClusterNode root) : root_(std::move(root)) {}

    const ClusterNode& root() const noexcept { return root_; }
    ClusterNode& root() noexcept { return root_; }

    const ClusterNode* find(std::span<const std::size_t> path) const;
    ClusterNode* find(std::span<const std::size_t> path);

    /// Pre-order traversal (parent before children, children in index order).
    void visit(const std::function<void(const ClusterNode&)>& fn) const;
    void visit(const std::function<void(ClusterNode&)>& fn);

    std::size_t node_count() const;
    std::size_t max_depth() const;

    bool operator==(const ClusterTree&) const = default;

private:
    ClusterNode root_;
};

/// Mean of the member vectors.
std::vector<double> mean_vector(const FeatureMatrix& vectors, std::span<const std::size_t> members);

/// Arithmetic mean of per-review sentiment over `members` (0 when empty).
double cluster_avg_sentiment(std::span<const double> sentiments, std::span<const std::size_t> members);

/// Recursive k-means over `members`: the root splits into at most k1
/// children, deeper nodes into at most k2, until `depth` is reached or a node
/// is smaller than the minimum cluster size. Each split is seeded from
/// (seed, path) so subtrees do not depend on traversal order. Sibling
/// centroids are laid out in 2-D by PCA and every node carries its average
/// sentiment. Labels are left empty (see labeling.hpp).
ClusterTree build_hierarchy(const FeatureMatrix& vectors, std::span<const std::size_t> members,
                            std::span<const double> sentiments, const HierarchyParams& params);

}  // namespace revex
