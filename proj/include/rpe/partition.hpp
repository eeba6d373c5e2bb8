#pragma once

#include <cstdint>
#include <vector>

namespace rpe {

// Dense partition of n items into nonempty parts, labels are a restricted
// growth string (part ids appear in first-seen order) so equal partitions
// compare equal and the encoding is the lexicographic canonical form.
struct HardPartition {
    size_t n = 0;
    std::vector<uint32_t> labels;   // n entries in [0, part_sizes.size())
    std::vector<size_t> part_sizes; // all nonzero
};

// Normalizes arbitrary labels into the canonical form above.
HardPartition partition_from_labels(const std::vector<uint32_t>& labels);

} // namespace rpe
