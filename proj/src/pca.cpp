#include "revex/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace revex {

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n) {
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

    double total = 0.0;
    for (double x : a) total += x * x;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        }
        if (off <= 1e-30 * total || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return at(i, i) > at(j, j); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = at(order[j], order[j]);
        for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + j] = v[r * n + order[j]];
    }
    return out;
}

PcaProjection pca_project(std::span<const double> points, std::size_t dims) {
    PcaProjection out;
    const std::size_t k = dims == 0 ? 0 : points.size() / dims;
    out.coords.assign(k, {0.0, 0.0});
    if (k <= 1) return out;

    std::vector<double> mean(dims, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < dims; ++j) mean[j] += points[i * dims + j];
    }
    for (double& m : mean) m /= static_cast<double>(k);
    std::vector<double> centered(k * dims);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < dims; ++j) centered[i * dims + j] = points[i * dims + j] - mean[j];
    }

    // Eigen-decompose the k × k Gram matrix; its non-zero spectrum equals the
    // (scaled) covariance spectrum and k is tiny compared to dims.
    std::vector<double> gram(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double s = 0.0;
            for (std::size_t j = 0; j < dims; ++j) s += centered[a * dims + j] * centered[b * dims + j];
            gram[a * k + b] = s;
            gram[b * k + a] = s;
        }
    }
    double trace = 0.0;
    for (std::size_t a = 0; a < k; ++a) trace += gram[a * k + a];
    if (trace <= 0.0) return out;
    const SymmetricEigen eig = jacobi_eigen(gram, k);

    for (std::size_t c = 0; c < std::min<std::size_t>(2, k); ++c) {
        const double lambda = eig.values[c];
        if (!(lambda > 1e-12 * trace)) break;
        std::vector<double> dir(dims, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const double u = eig.vectors[i * k + c];
            for (std::size_t j = 0; j < dims; ++j) dir[j] += centered[i * dims + j] * u;
        }
        for (const auto& prev : out.components) {
            double dot = 0.0;
            for (std::size_t j = 0; j < dims; ++j) dot += dir[j] * prev[j];
            for (std::size_t j = 0; j < dims; ++j) dir[j] -= dot * prev[j];
        }
        double norm = 0.0;
        for (double x : dir) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        std::size_t largest = 0;
        for (std::size_t j = 0; j < dims; ++j) {
            if (std::abs(dir[j]) > std::abs(dir[largest])) largest = j;
        }
        const double sign = dir[largest] < 0.0 ? -1.0 : 1.0;
        for (double& x : dir) x *= sign / norm;

        double variance = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double proj = 0.0;
            for (std::size_t j = 0; j < dims; ++j) proj += centered[i * dims + j] * dir[j];
            out.coords[i][c] = proj;
            variance += proj * proj;
        }
        out.explained_variance.push_back(variance / static_cast<double>(k));
        out.components.push_back(std::move(dir));
    }
    return out;
}

}  // namespace revex
