#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpe/entropy.hpp"
#include "rpe/halfspace.hpp"
#include "rpe/point_set.hpp"

namespace rpe {

enum class EstimatorKind { ball, halfspace };

EstimatorKind estimator_from_string(const std::string& s);
std::string to_string(EstimatorKind e);

struct RestructureConfig {
    double lambda = 0.1;
    double mu = 0.01;
    EstimatorKind estimator = EstimatorKind::ball;
    size_t k = 0; // 0 -> max(1, min(16, n/4))
    double alpha = 10.0;
    ScaleMode scale_mode = ScaleMode::raw;
    AnchorInit anchor_init = AnchorInit::kmeanspp;
    size_t m = 3;
    double tau = 0.25;
    size_t refit_every = 25;
    size_t steps = 500;
    double lr = 1e-3;
    uint64_t seed = 0;
};

struct LossTerms {
    double chamfer = 0.0;
    double entropy = 0.0;
    double stability = 0.0; // mean squared displacement, so mu is n-independent
    double total = 0.0;     // chamfer + lambda * entropy + mu * stability
};

struct TraceRow {
    size_t step = 0;
    double chamfer = 0.0;
    double entropy = 0.0;
    double stability = 0.0;
    double total = 0.0;
    double lr = 0.0;
};

struct RestructureResult {
    PointSet output;
    std::vector<double> displacement; // n * d, output = input + displacement exactly
    std::vector<TraceRow> trace;      // row 0 is the identity, total non-increasing
    size_t iterations_run = 0;
};

// Loss terms for a candidate S2 against the original S, with the estimator
// (anchors or halfspaces) fit deterministically on S2 from the config.
LossTerms loss_eval(const PointSet& S, const PointSet& S2, const RestructureConfig& cfg);

// Gradient descent on the displacement field (initialized to zero) with
// cosine-annealed learning rate, a step-halving safeguard that keeps the
// trace total non-increasing, and estimator refits every refit_every steps.
RestructureResult restructure(const PointSet& S, const RestructureConfig& cfg);

} // namespace rpe
