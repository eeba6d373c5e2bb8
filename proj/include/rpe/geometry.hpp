#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rpe/partition.hpp"
#include "rpe/point_set.hpp"

namespace rpe {

// op_count tallies the comparison-level work an algorithm performs: sort
// comparator calls plus orientation / dominance tests. Wall time is measured
// separately so benchmark byte-for-byte determinism can ignore it.
struct HullResult {
    std::vector<std::array<double, 2>> vertices; // CCW, starting at the lexicographic minimum
    double area = 0.0;
    uint64_t op_count = 0;
    uint64_t elapsed_ns = 0;
};

struct MaximaResult {
    std::vector<size_t> indices; // ascending
    uint64_t op_count = 0;
    uint64_t elapsed_ns = 0;
};

HullResult monotone_chain_hull(const PointSet& S);
HullResult chans_hull(const PointSet& S);
HullResult partition_merge_hull(const PointSet& S, const HardPartition& P);

double hull_area(const std::vector<std::array<double, 2>>& vertices);
double hull_error_pct(const HullResult& truth, const HullResult& predicted);

double hausdorff(const PointSet& A, const PointSet& B);
double chamfer(const PointSet& A, const PointSet& B);
// Gradient of chamfer(A, B) with respect to the coordinates of B, treating
// nearest-neighbour assignments as locally constant (ties -> lowest index).
double chamfer_with_grad(const PointSet& A, const PointSet& B, std::vector<double>& grad_b);

MaximaResult maxima_3d(const PointSet& S);
MaximaResult adaptive_maxima(const PointSet& S, const HardPartition& P);
double maxima_f1(const std::vector<size_t>& predicted, const std::vector<size_t>& truth);

} // namespace rpe
