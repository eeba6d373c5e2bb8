#pragma once

#include <cstdint>
#include <vector>

#include "rpe/partition.hpp"
#include "rpe/point_set.hpp"

namespace rpe {

struct OraclePartitionResult {
    double entropy_nats = 0.0;       // sum |P| log(n/|P|)
    double entropy_normalized = 0.0; // divided by n
    HardPartition partition;
};

// Bitmasks of the nonempty proper subsets T with conv(T) and conv(S\T)
// strictly separated. Sorted ascending.
struct RealizableSubsetIndex {
    size_t n = 0;
    std::vector<uint32_t> masks;
};

struct ArrangementLine {
    std::vector<double> w; // unit normal
    double b = 0.0;
};

struct ArrangementResult {
    OraclePartitionResult result;
    std::vector<ArrangementLine> lines;
};

OraclePartitionResult partition_entropy(const HardPartition& P, size_t expected_n = 0);

// d = 2 only; size guard n <= 20. Separability decided by convex-hull
// disjointness (strict: touching hulls are not separable).
RealizableSubsetIndex realizable_subsets_2d(const PointSet& S);

// Minimum-entropy partition into at least parts_min realizable parts,
// bitmask DP over the realizable-subset index. Size guard n <= 15.
// Ties resolve to the lexicographically smallest partition encoding.
OraclePartitionResult min_entropy_partition(const PointSet& S, size_t parts_min = 2);

// Minimum cell-partition entropy over arrangements of m distinct candidate
// lines (all lines through point pairs plus their epsilon offsets), each
// required to split S nontrivially. Size guards n <= 64, m <= 3.
ArrangementResult min_entropy_arrangement(const PointSet& S, size_t m);

// Entropy of a labeled generating partition.
OraclePartitionResult generating_partition_entropy(const std::vector<uint32_t>& labels);

} // namespace rpe
