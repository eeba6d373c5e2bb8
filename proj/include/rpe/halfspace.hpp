#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpe/partition.hpp"
#include "rpe/point_set.hpp"

namespace rpe {

// m hyperplanes w_t . x = b_t with a shared temperature tau.
struct HalfspaceSet {
    size_t m = 0;
    size_t d = 0;
    std::vector<double> w; // m * d
    std::vector<double> b; // m
    double tau = 0.25;

    double& wat(size_t t, size_t c) { return w[t * d + c]; }
    double wat(size_t t, size_t c) const { return w[t * d + c]; }
    std::span<const double> normal(size_t t) const { return {w.data() + t * d, d}; }
};

// Sign-pattern cells realized by the data. codes are lexicographically sorted
// bit vectors, bit t = 1 when w_t . x >= b_t.
struct CellGating {
    size_t m = 0;
    std::vector<std::vector<uint8_t>> codes;
    std::vector<double> soft_masses; // per cell, sums to 1
    bool on_boundary = false;        // some point sat exactly on a hyperplane
};

struct HSoftGradient {
    std::vector<double> points; // n * d
    std::vector<double> w;      // m * d
    std::vector<double> b;      // m
};

// sigma((w.x - b)/tau); 1/(4 tau)-Lipschitz in w.x.
double soft_halfspace(std::span<const double> x, std::span<const double> w, double b,
                      double tau);

CellGating enumerate_cells(const PointSet& S, const HalfspaceSet& H);

// Normalized product gate over the realized cells, computed in log space.
std::vector<double> cell_gates(std::span<const double> x, const HalfspaceSet& H,
                               const CellGating& G);

// Entropy of the mean gate masses q_j = mean_i g_j(x_i), in nats.
double h_soft(const PointSet& S, const HalfspaceSet& H, const CellGating& G);
double h_soft_with_grad(const PointSet& S, const HalfspaceSet& H, const CellGating& G,
                        HSoftGradient& grad);

// min over points and hyperplanes of |w_t . x - b_t| / |w_t|.
double empirical_margin(const PointSet& S, const HalfspaceSet& H);

// Hard sign-pattern assignment of each point to one of G's cells.
HardPartition hard_masses(const PointSet& S, const HalfspaceSet& H, const CellGating& G);

enum class HalfspaceInit { principal, maxmargin, random };

HalfspaceInit halfspace_init_from_string(const std::string& s);
std::string to_string(HalfspaceInit s);

// principal: cuts normal to the top principal directions at quantile offsets.
// maxmargin: widest-gap splits of 1-D projections along a deterministic
//            direction fan (plus the principal directions).
// random:    seeded unit normals, offsets through the coordinate-wise median.
HalfspaceSet init_halfspaces(const PointSet& S, size_t m, double tau, HalfspaceInit strategy,
                             uint64_t seed);

struct BoundReport {
    double margin = 0.0;      // empirical margin of the data
    double eps_smooth = 0.0;  // exp(-margin / (4 tau))
    double lipschitz = 0.0;   // 1 / (4 tau)
    double rademacher = 0.0;  // C * lipschitz * sqrt(d log m / n)
    double slack = 0.0;       // sqrt(log(2/delta) / (2n))
    double delta = 0.05;
    double constant_c = 1.0;
    double eps_total = 0.0;
    double bound = 0.0; // eps_total * log(K / eps_total), or the vacuous form
    bool vacuous = false;
    size_t cells = 0; // K
    size_t m = 0;
    size_t n = 0;
    size_t d = 0;
    double tau = 0.0;
};

struct BoundOptions {
    double delta = 0.05;
    double constant_c = 1.0;
    bool infinite_n = false; // zero out the finite-sample terms
};

BoundReport evaluate_bound(const PointSet& S, const HalfspaceSet& H, const CellGating& G,
                           const BoundOptions& opt);

struct HalfspaceFitOptions {
    size_t m = 3;
    double tau = 0.25;
    HalfspaceInit strategy = HalfspaceInit::maxmargin;
    size_t steps = 0;
    double lr = 0.05;
    uint64_t seed = 0;
};

struct HalfspaceFitResult {
    HalfspaceSet halfspaces;
    CellGating gating;
    double value = 0.0;        // final h_soft
    std::vector<double> trace; // h_soft after 0..steps_run steps, non-increasing
    size_t steps_run = 0;
};

// Initializes hyperplanes, then optionally gradient-descends (w, b) on h_soft
// with step halving; w is renormalized to unit length (b rescaled with it)
// after every accepted step and the realized cells are re-enumerated.
HalfspaceFitResult fit_halfspaces(const PointSet& S, const HalfspaceFitOptions& opt);

} // namespace rpe
