#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpe/point_set.hpp"

namespace rpe {

enum class ScaleMode { raw, normalized };

ScaleMode scale_mode_from_string(const std::string& s);
std::string to_string(ScaleMode m);

// k anchor centers in the same space as the points they score.
struct AnchorSet {
    size_t k = 0;
    size_t d = 0;
    std::vector<double> centers; // k * d, row-major
    double alpha = 10.0;
    ScaleMode scale_mode = ScaleMode::raw;

    double& at(size_t j, size_t c) { return centers[j * d + c]; }
    double at(size_t j, size_t c) const { return centers[j * d + c]; }
    std::span<const double> center(size_t j) const { return {centers.data() + j * d, d}; }
};

// Row-stochastic responsibilities p_ij = softmax_j(-alpha_eff * |x_i - c_j|^2)
// and cluster masses p_j = mean_i p_ij.
struct SoftAssignment {
    size_t n = 0;
    size_t k = 0;
    std::vector<double> p;      // n * k, rows sum to 1
    std::vector<double> masses; // k, sums to 1
    double alpha_eff = 0.0;     // alpha after scale normalization

    double at(size_t i, size_t j) const { return p[i * k + j]; }
};

struct EntropyReport {
    double value = 0.0; // nats
    size_t k = 0;       // number of clusters/cells the value ranges over
};

struct HDiffGradient {
    std::vector<double> points;  // n * d
    std::vector<double> anchors; // k * d
};

SoftAssignment compute_soft_assignments(const PointSet& S, const AnchorSet& A);

// Entropy of the soft cluster masses, in nats. 0 <= value <= log k.
EntropyReport h_diff(const PointSet& S, const AnchorSet& A);
double h_diff_value(const PointSet& S, const AnchorSet& A);

// Exact chain-rule gradient of h_diff through the softmax, the squared
// distances and (in normalized mode) the data-dependent scale.
HDiffGradient grad_h_diff(const PointSet& S, const AnchorSet& A);

// Distance of each anchor from its responsibility-squared weighted centroid
// sum_i p_ij^2 x_i / sum_i p_ij^2. Diagnostic only: this is the stationarity
// condition of a simplified gradient that drops the cross-cluster softmax
// coupling, so it is generally nonzero at true critical points.
std::vector<double> anchor_fixed_point_residuals(const PointSet& S, const AnchorSet& A);

enum class AnchorInit { kmeanspp, random };

AnchorInit anchor_init_from_string(const std::string& s);

struct FitOptions {
    size_t k = 0; // 0 -> max(1, min(16, n/4))
    double alpha = 10.0;
    ScaleMode scale_mode = ScaleMode::raw;
    AnchorInit init = AnchorInit::kmeanspp;
    size_t steps = 200;
    double lr = 0.05;
    uint64_t seed = 0;
};

struct FitResult {
    AnchorSet anchors;
    std::vector<double> trace; // h_diff after 0..steps steps, non-increasing
    size_t steps_run = 0;
};

// k-means++ or random distinct-point anchor initialization (seeded).
AnchorSet init_anchors(const PointSet& S, size_t k, double alpha, ScaleMode mode,
                       AnchorInit init, uint64_t seed);

// Gradient descent on the anchors to minimize h_diff, with a step-halving
// safeguard so the returned trace is non-increasing. Stops early once the
// anchor gradient norm drops below 1e-8.
FitResult fit_anchors(const PointSet& S, const FitOptions& opt);
FitResult fit_anchors_from(const PointSet& S, AnchorSet A, size_t steps, double lr);

// Entropy of the hard nearest-anchor assignment (ties -> lowest index);
// empty clusters contribute zero. This is the alpha -> infinity limit.
EntropyReport discrete_limit_entropy(const PointSet& S, const AnchorSet& A);

struct ElbowResult {
    size_t k = 0;
    std::vector<size_t> k_values;
    std::vector<double> curve; // fitted h_diff per k
    bool no_elbow = false;
    bool weak_curvature = false;
};

// Fits anchors for each k in [k_min, k_max] and picks the k with the largest
// curvature (absolute second difference) of the h_diff-vs-k curve.
ElbowResult select_k_elbow(const PointSet& S, size_t k_min, size_t k_max, FitOptions opt);

struct RowEntropyResult {
    double value = 0.0;
    std::vector<double> grad; // same shape as the input, empty unless requested
};

// Sum over rows of the Shannon entropy of each row of a row-stochastic
// matrix. Gradient entries are -(log a + 1) where a > 0 and 0 where a == 0.
RowEntropyResult row_entropy_sum(const std::vector<double>& rows, size_t n_rows,
                                 size_t n_cols, bool with_grad = false);

size_t default_k(size_t n);

} // namespace rpe
