#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace revex {

struct PcaProjection {
    /// k × 2 coordinates, row-major.
    std::vector<std::array<double, 2>> coords;
    /// Up to two unit-length principal directions in the input space. A
    /// direction is missing when its variance is zero.
    std::vector<std::vector<double>> components;
    /// Population variance along each returned direction, descending.
    std::vector<double> explained_variance;
};

/// Projects k points (row-major, `dims` wide) onto their top two principal
/// components after mean-centering. Sign convention: the largest-magnitude
/// loading of each component is positive (first index wins ties).
/// One point maps to (0,0); zero-variance directions give zero coordinates.
PcaProjection pca_project(std::span<const double> points, std::size_t dims);

struct SymmetricEigen {
    std::vector<double> values;   // descending
    std::vector<double> vectors;  // column j is the eigenvector of values[j], n × n row-major
};

/// Cyclic Jacobi eigen-decomposition of a symmetric n × n matrix.
SymmetricEigen jacobi_eigen(std::vector<double> matrix, std::size_t n);

}  // namespace revex
