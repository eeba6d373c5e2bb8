#include "rpe/svg.hpp"

#include <algorithm>
#include <cstdio>

#include "rpe/errors.hpp"

namespace rpe {

namespace {

constexpr int kWidth = 640, kHeight = 480;
constexpr int kMarginLeft = 64, kMarginRight = 24, kMarginTop = 40, kMarginBottom = 48;
constexpr int kTicks = 5;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo, hi;
    double scale(double v, double out_lo, double out_hi) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

Range padded(double lo, double hi) {
    double pad = (hi - lo) * 0.05;
    if (pad == 0.0) pad = 0.5;
    return {lo - pad, hi + pad};
}

} // namespace

std::string emit_svg_scatter(const std::vector<std::array<double, 2>>& points,
                             const std::vector<uint32_t>& labels, const ScatterAxes& axes) {
    if (points.empty()) throw validation_error("scatter plot needs at least one point");
    if (!labels.empty() && labels.size() != points.size())
        throw validation_error("label count does not match the point count");

    double x_lo = points[0][0], x_hi = x_lo, y_lo = points[0][1], y_hi = y_lo;
    for (const auto& p : points) {
        x_lo = std::min(x_lo, p[0]);
        x_hi = std::max(x_hi, p[0]);
        y_lo = std::min(y_lo, p[1]);
        y_hi = std::max(y_hi, p[1]);
    }
    Range rx = padded(x_lo, x_hi), ry = padded(y_lo, y_hi);
    double px0 = kMarginLeft, px1 = kWidth - kMarginRight;
    double py0 = kHeight - kMarginBottom, py1 = kMarginTop; // y axis points up

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!axes.title.empty())
        s += "<text x=\"" + num(kWidth / 2.0) +
             "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + axes.title + "</text>\n";

    s += "<line x1=\"" + num(px0) + "\" y1=\"" + num(py0) + "\" x2=\"" + num(px1) + "\" y2=\"" +
         num(py0) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(px0) + "\" y1=\"" + num(py0) + "\" x2=\"" + num(px0) + "\" y2=\"" +
         num(py1) + "\" stroke=\"black\"/>\n";

    for (int t = 0; t < kTicks; ++t) {
        double f = double(t) / (kTicks - 1);
        double xv = rx.lo + f * (rx.hi - rx.lo);
        double yv = ry.lo + f * (ry.hi - ry.lo);
        double xp = px0 + f * (px1 - px0);
        double yp = py0 + f * (py1 - py0);
        s += "<line x1=\"" + num(xp) + "\" y1=\"" + num(py0) + "\" x2=\"" + num(xp) + "\" y2=\"" +
             num(py0 + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(xp) + "\" y=\"" + num(py0 + 18) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + num(xv) + "</text>\n";
        s += "<line x1=\"" + num(px0 - 5) + "\" y1=\"" + num(yp) + "\" x2=\"" + num(px0) +
             "\" y2=\"" + num(yp) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(px0 - 8) + "\" y=\"" + num(yp + 3) +
             "\" text-anchor=\"end\" font-size=\"10\">" + num(yv) + "</text>\n";
    }
    s += "<text x=\"" + num((px0 + px1) / 2) + "\" y=\"" + num(kHeight - 10.0) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + axes.x_label + "</text>\n";
    s += "<text x=\"16\" y=\"" + num((py0 + py1) / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num((py0 + py1) / 2) + ")\">" + axes.y_label + "</text>\n";

    for (size_t i = 0; i < points.size(); ++i) {
        uint32_t cls = labels.empty() ? 0 : labels[i];
        const char* color = kPalette[cls % (sizeof(kPalette) / sizeof(kPalette[0]))];
        s += "<circle cx=\"" + num(rx.scale(points[i][0], px0, px1)) + "\" cy=\"" +
             num(ry.scale(points[i][1], py0, py1)) + "\" r=\"3\" fill=\"" + color +
             "\" fill-opacity=\"0.75\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace rpe
