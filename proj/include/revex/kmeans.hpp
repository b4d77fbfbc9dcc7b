#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace revex {

/// Dense row-major point set view: `count` points of `dims` coordinates.
struct PointSet {
    std::span<const double> data;
    std::size_t dims = 0;

    std::size_t size() const noexcept { return dims == 0 ? 0 : data.size() / dims; }
    std::span<const double> operator[](std::size_t i) const { return data.subspan(i * dims, dims); }
};

struct KMeansOptions {
    std::size_t max_iter = 100;
    double tol = 1e-4;         // relative centroid movement
    std::size_t restarts = 1;  // best of n k-means++ initializations by inertia
};

struct KMeansResult {
    std::vector<std::size_t> assignments;  // point → cluster
    std::vector<double> centroids;         // k × dims, row-major
    std::size_t k = 0;
    std::size_t dims = 0;
    double inertia = 0.0;
    std::size_t iterations_run = 0;
    /// Inertia after each assignment step (non-increasing).
    std::vector<double> inertia_history;

    std::span<const double> centroid(std::size_t c) const {
        return {centroids.data() + c * dims, dims};
    }
    std::vector<std::size_t> cluster_sizes() const;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Lloyd's algorithm with k-means++ seeding. Points go to the nearest
/// centroid, ties to the lowest index. An empty cluster is reseeded at the
/// point farthest from its assigned centroid.
///
/// Throws ValidationError("insufficient points") when points.size() < k.
KMeansResult kmeans(const PointSet& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

}  // namespace revex
