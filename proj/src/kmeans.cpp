#include "revex/kmeans.hpp"

#include <cmath>
#include <limits>

#include "revex/error.hpp"
#include "revex/rng.hpp"

namespace revex {

namespace {

std::vector<double> plus_plus_init(const PointSet& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.size();
    const std::size_t dims = points.dims;
    std::vector<double> centroids;
    centroids.reserve(k * dims);
    auto push = [&](std::size_t i) {
        const auto p = points[i];
        centroids.insert(centroids.end(), p.begin(), p.end());
    };
    push(rng.index(n));
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
        const std::span<const double> last(centroids.data() + (c - 1) * dims, dims);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points[i], last));
            total += d2[i];
        }
        if (total <= 0.0) {
            push(rng.index(n));
            continue;
        }
        double u = rng.uniform() * total;
        std::size_t chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (u < d2[i]) {
                chosen = i;
                break;
            }
            u -= d2[i];
        }
        // Rounding can land on a zero-weight point; step to a positive one.
        while (d2[chosen] <= 0.0 && chosen > 0) --chosen;
        push(chosen);
    }
    return centroids;
}

// Returns the number of changed assignments and writes inertia.
std::size_t assign(const PointSet& points, const std::vector<double>& centroids, std::size_t k,
                   std::vector<std::size_t>& assignments, std::vector<double>& dist, double& inertia) {
    std::size_t changed = 0;
    inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            const double d = squared_distance(
                points[i], std::span<const double>(centroids.data() + c * points.dims, points.dims));
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (assignments[i] != best) ++changed;
        assignments[i] = best;
        dist[i] = best_d;
        inertia += best_d;
    }
    return changed;
}

KMeansResult lloyd(const PointSet& points, std::size_t k, Rng& rng, const KMeansOptions& options) {
    const std::size_t n = points.size();
    const std::size_t dims = points.dims;
    KMeansResult result;
    result.k = k;
    result.dims = dims;
    result.centroids = plus_plus_init(points, k, rng);
    result.assignments.assign(n, std::numeric_limits<std::size_t>::max());
    std::vector<double> dist(n, 0.0);

    double inertia = 0.0;
    assign(points, result.centroids, k, result.assignments, dist, inertia);
    result.inertia_history.push_back(inertia);

    std::vector<double> sums(k * dims);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        result.iterations_run = iter + 1;
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = points[i];
            const std::size_t c = result.assignments[i];
            for (std::size_t j = 0; j < dims; ++j) sums[c * dims + j] += p[j];
            ++counts[c];
        }
        std::vector<double> updated(k * dims);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < dims; ++j) {
                updated[c * dims + j] = counts[c] > 0 ? sums[c * dims + j] / static_cast<double>(counts[c])
                                                      : result.centroids[c * dims + j];
            }
        }
        // Empty clusters take over the point farthest from its centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (dist[i] > far_d && counts[result.assignments[i]] > 1) {
                    far_d = dist[i];
                    far = i;
                }
            }
            if (far_d <= 0.0) continue;  // every point sits on its centroid
            const auto p = points[far];
            std::copy(p.begin(), p.end(), updated.begin() + static_cast<std::ptrdiff_t>(c * dims));
            --counts[result.assignments[far]];
            counts[c] = 1;
            dist[far] = 0.0;
        }

        double shift = 0.0;
        double scale = 0.0;
        for (std::size_t j = 0; j < k * dims; ++j) {
            const double delta = updated[j] - result.centroids[j];
            shift += delta * delta;
            scale += result.centroids[j] * result.centroids[j];
        }
        result.centroids = std::move(updated);

        const std::size_t changed = assign(points, result.centroids, k, result.assignments, dist, inertia);
        result.inertia_history.push_back(inertia);
        if (changed == 0) break;
        if (std::sqrt(shift) <= options.tol * std::max(std::sqrt(scale), 1e-12)) break;
    }
    result.inertia = inertia;
    return result;
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<std::size_t> KMeansResult::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : assignments) ++sizes[a];
    return sizes;
}

KMeansResult kmeans(const PointSet& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (points.size() < k) {
        throw ValidationError("insufficient points: " + std::to_string(points.size()) +
                              " points for k=" + std::to_string(k));
    }
    Rng rng(seed);
    KMeansResult best;
    const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
    for (std::size_t r = 0; r < restarts; ++r) {
        KMeansResult candidate = lloyd(points, k, rng, options);
        if (r == 0 || candidate.inertia < best.inertia) best = std::move(candidate);
    }
    return best;
}

}  // namespace revex
