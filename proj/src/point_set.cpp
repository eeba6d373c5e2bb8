#include "rpe/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rpe/errors.hpp"
#include "rpe/rng.hpp"

namespace rpe {

void validate(const PointSet& ps) {
    if (ps.d == 0 && ps.n > 0) throw validation_error("point set has zero dimension");
    if (ps.coords.size() != ps.n * ps.d)
        throw validation_error("coordinate block size does not match n*d");
    for (double v : ps.coords)
        if (!std::isfinite(v)) throw validation_error("non-finite coordinate");
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) {
        double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

static std::vector<std::pair<uint32_t, uint32_t>> sampled_pairs(size_t n) {
    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    if (n < 2) return pairs;
    if (n <= 2048) {
        pairs.reserve(n * (n - 1) / 2);
        for (uint32_t i = 0; i + 1 < n; ++i)
            for (uint32_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        return pairs;
    }
    // deterministic in n only, so the same set always yields the same scale
    Rng rng = derive_stream(0x7061697273ULL, n);
    pairs.reserve(2048);
    for (size_t k = 0; k < 2048; ++k) {
        uint32_t i = uint32_t(rng.below(n));
        uint32_t j = uint32_t(rng.below(n - 1));
        if (j >= i) ++j;
        if (i > j) std::swap(i, j);
        pairs.emplace_back(i, j);
    }
    return pairs;
}

std::vector<std::pair<uint32_t, uint32_t>> msd_pairs(size_t n) { return sampled_pairs(n); }

double mean_squared_pairwise_distance(const PointSet& ps) {
    auto pairs = sampled_pairs(ps.n);
    if (pairs.empty()) return 0.0;
    double s = 0.0;
    for (auto [i, j] : pairs) s += squared_distance(ps.point(i), ps.point(j));
    return s / double(pairs.size());
}

double diameter(const PointSet& ps) {
    if (ps.n < 2) return 0.0;
    if (ps.n <= 2048) {
        double best = 0.0;
        for (size_t i = 0; i + 1 < ps.n; ++i)
            for (size_t j = i + 1; j < ps.n; ++j)
                best = std::max(best, squared_distance(ps.point(i), ps.point(j)));
        return std::sqrt(best);
    }
    // bounding-box diagonal: an upper bound, adequate as a length scale
    std::vector<double> lo(ps.d, HUGE_VAL), hi(ps.d, -HUGE_VAL);
    for (size_t i = 0; i < ps.n; ++i)
        for (size_t j = 0; j < ps.d; ++j) {
            lo[j] = std::min(lo[j], ps.at(i, j));
            hi[j] = std::max(hi[j], ps.at(i, j));
        }
    double s = 0.0;
    for (size_t j = 0; j < ps.d; ++j) s += (hi[j] - lo[j]) * (hi[j] - lo[j]);
    return std::sqrt(s);
}

} // namespace rpe
