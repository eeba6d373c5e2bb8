#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rpe {

struct ScatterAxes {
    std::string x_label = "x";
    std::string y_label = "y";
    std::string title;
};

// Static scatter plot with linear axes (data range padded 5%), tick labels
// and one marker class per label value. Output is byte-deterministic.
std::string emit_svg_scatter(const std::vector<std::array<double, 2>>& points,
                             const std::vector<uint32_t>& labels, const ScatterAxes& axes);

} // namespace rpe
