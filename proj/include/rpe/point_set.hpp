#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rpe {

// Row-major n x d coordinate block.
struct PointSet {
    size_t n = 0;
    size_t d = 0;
    std::vector<double> coords; // n * d

    PointSet() = default;
    PointSet(size_t n_, size_t d_) : n(n_), d(d_), coords(n_ * d_, 0.0) {}

    double& at(size_t i, size_t j) { return coords[i * d + j]; }
    double at(size_t i, size_t j) const { return coords[i * d + j]; }

    std::span<const double> point(size_t i) const { return {coords.data() + i * d, d}; }
    std::span<double> point(size_t i) { return {coords.data() + i * d, d}; }
};

// Throws validation_error on shape mismatch or non-finite coordinates.
void validate(const PointSet& ps);

double squared_distance(std::span<const double> a, std::span<const double> b);

// Largest pairwise distance; 0 for n < 2. Exact O(n^2) for n <= 2048, else a
// deterministic subsample backed estimate that still covers the bounding box.
double diameter(const PointSet& ps);

// Mean squared pairwise distance. All pairs for n <= 2048; above that a
// deterministic subsample of 2048 pairs (seeded only by n).
double mean_squared_pairwise_distance(const PointSet& ps);

// The pair list mean_squared_pairwise_distance averages over (exposed so the
// normalized-scale gradient can differentiate through the same pairs).
std::vector<std::pair<uint32_t, uint32_t>> msd_pairs(size_t n);

} // namespace rpe
