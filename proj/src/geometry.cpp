#include "rpe/geometry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "rpe/errors.hpp"

namespace rpe {

namespace {

using Pt = std::array<double, 2>;
using Clock = std::chrono::steady_clock;

uint64_t ns_since(Clock::time_point t0) {
    return uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

int orient(const Pt& a, const Pt& b, const Pt& c, uint64_t& ops) {
    ++ops;
    long double abx = (long double)b[0] - a[0], aby = (long double)b[1] - a[1];
    long double acx = (long double)c[0] - a[0], acy = (long double)c[1] - a[1];
    long double cross = abx * acy - aby * acx;
    long double scale = std::fabs(abx * acy) + std::fabs(aby * acx);
    if (std::fabs(cross) <= 1e-12L * scale) return 0;
    return cross > 0 ? 1 : -1;
}

double dist2(const Pt& a, const Pt& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

// Andrew's monotone chain with strict turns; counted sort + orientation tests
std::vector<Pt> chain_hull(std::vector<Pt> pts, uint64_t& ops) {
    std::sort(pts.begin(), pts.end(), [&ops](const Pt& a, const Pt& b) {
        ++ops;
        return a < b;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<Pt> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i], ops) <= 0) --k;
        h[k++] = pts[i];
    }
    size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && orient(h[k - 2], h[k - 1], pts[i], ops) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

std::vector<Pt> canonical(std::vector<Pt> hull) {
    if (hull.size() < 2) return hull;
    auto it = std::min_element(hull.begin(), hull.end());
    std::rotate(hull.begin(), it, hull.end());
    return hull;
}

double shoelace(const std::vector<Pt>& v) {
    if (v.size() < 3) return 0.0;
    long double a = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Pt& p = v[i];
        const Pt& q = v[(i + 1) % v.size()];
        a += (long double)p[0] * q[1] - (long double)q[0] * p[1];
    }
    return double(std::fabs(a) * 0.5L);
}

std::vector<Pt> gather_2d(const PointSet& S) {
    validate(S);
    if (S.d != 2) throw validation_error("hull operations need d = 2");
    std::vector<Pt> pts(S.n);
    for (size_t i = 0; i < S.n; ++i) pts[i] = {S.at(i, 0), S.at(i, 1)};
    return pts;
}

HullResult finish_hull(std::vector<Pt> verts, uint64_t ops, Clock::time_point t0) {
    HullResult r;
    r.vertices = canonical(std::move(verts));
    r.area = shoelace(r.vertices);
    r.op_count = ops;
    r.elapsed_ns = ns_since(t0);
    return r;
}

// Exact nearest-neighbour grid for 2-D point sets. Ring expansion stops once
// the ring's distance lower bound exceeds the best hit, so results match the
// brute-force scan (ties resolved to the lowest index in both).
struct NnGrid {
    const PointSet& pts;
    double x0 = 0, y0 = 0, cell = 1;
    int64_t gw = 1, gh = 1;
    std::vector<std::vector<uint32_t>> bins;

    explicit NnGrid(const PointSet& Y) : pts(Y) {
        double x1 = Y.at(0, 0), y1 = Y.at(0, 1);
        x0 = x1;
        y0 = y1;
        for (size_t i = 1; i < Y.n; ++i) {
            x0 = std::min(x0, Y.at(i, 0));
            x1 = std::max(x1, Y.at(i, 0));
            y0 = std::min(y0, Y.at(i, 1));
            y1 = std::max(y1, Y.at(i, 1));
        }
        double span = std::max(x1 - x0, y1 - y0);
        double side = std::ceil(std::sqrt(double(Y.n)));
        cell = std::max(span / side, 1e-12 * std::max(span, 1.0));
        gw = int64_t((x1 - x0) / cell) + 1;
        gh = int64_t((y1 - y0) / cell) + 1;
        bins.assign(size_t(gw * gh), {});
        for (size_t i = 0; i < Y.n; ++i) {
            int64_t cx = int64_t((Y.at(i, 0) - x0) / cell);
            int64_t cy = int64_t((Y.at(i, 1) - y0) / cell);
            cx = std::clamp(cx, int64_t(0), gw - 1);
            cy = std::clamp(cy, int64_t(0), gh - 1);
            bins[size_t(cy * gw + cx)].push_back(uint32_t(i));
        }
    }

    std::pair<double, uint32_t> nearest(double qx, double qy) const {
        int64_t cx = int64_t(std::floor((qx - x0) / cell));
        int64_t cy = int64_t(std::floor((qy - y0) / cell));
        double best = std::numeric_limits<double>::infinity();
        uint32_t best_i = 0;
        auto scan = [&](int64_t bx, int64_t by) {
            if (bx < 0 || bx >= gw || by < 0 || by >= gh) return;
            for (uint32_t i : bins[size_t(by * gw + bx)]) {
                double dx = qx - pts.at(i, 0), dy = qy - pts.at(i, 1);
                double d2 = dx * dx + dy * dy;
                if (d2 < best || (d2 == best && i < best_i)) {
                    best = d2;
                    best_i = i;
                }
            }
        };
        int64_t rmax = std::max(gw, gh) + std::max(std::abs(cx), std::abs(cy)) + 1;
        for (int64_t r = 0; r <= rmax; ++r) {
            if (std::isfinite(best)) {
                double lb = double(r - 1) * cell;
                if (lb > 0 && lb * lb > best) break;
            }
            if (r == 0) {
                scan(cx, cy);
                continue;
            }
            for (int64_t bx = cx - r; bx <= cx + r; ++bx) {
                scan(bx, cy - r);
                scan(bx, cy + r);
            }
            for (int64_t by = cy - r + 1; by <= cy + r - 1; ++by) {
                scan(cx - r, by);
                scan(cx + r, by);
            }
        }
        return {best, best_i};
    }
};

std::pair<double, uint32_t> nearest_brute(const PointSet& Y, const double* q, size_t d) {
    double best = std::numeric_limits<double>::infinity();
    uint32_t best_i = 0;
    for (size_t j = 0; j < Y.n; ++j) {
        double d2 = 0;
        for (size_t t = 0; t < d; ++t) {
            double diff = q[t] - Y.at(j, t);
            d2 += diff * diff;
        }
        if (d2 < best) {
            best = d2;
            best_i = uint32_t(j);
        }
    }
    return {best, best_i};
}

// nearest-neighbour index in B for every point of A (ties -> lowest index)
void all_nearest(const PointSet& A, const PointSet& B, std::vector<double>& d2,
                 std::vector<uint32_t>& idx) {
    d2.resize(A.n);
    idx.resize(A.n);
    if (B.d == 2 && B.n >= 32) {
        NnGrid grid(B);
        for (size_t i = 0; i < A.n; ++i) {
            auto [b, j] = grid.nearest(A.at(i, 0), A.at(i, 1));
            d2[i] = b;
            idx[i] = j;
        }
    } else {
        for (size_t i = 0; i < A.n; ++i) {
            auto [b, j] = nearest_brute(B, A.point(i).data(), A.d);
            d2[i] = b;
            idx[i] = j;
        }
    }
}

// counting map comparator used by the maxima staircase
struct CountedLess {
    uint64_t* ops;
    bool operator()(double a, double b) const {
        ++*ops;
        return a < b;
    }
};

// 3-D maxima by plane sweep: x descending, equal-x batches queried against a
// (y, z) staircase of the already-swept points before being inserted
MaximaResult sweep_maxima(const PointSet& S, const std::vector<size_t>& subset) {
    MaximaResult r;
    uint64_t ops = 0;
    std::vector<size_t> order = subset;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        ++ops;
        if (S.at(a, 0) != S.at(b, 0)) return S.at(a, 0) > S.at(b, 0);
        if (S.at(a, 1) != S.at(b, 1)) return S.at(a, 1) > S.at(b, 1);
        return S.at(a, 2) > S.at(b, 2);
    });

    std::map<double, double, CountedLess> stair{CountedLess{&ops}};
    auto dominated = [&](double y, double z) {
        auto it = stair.upper_bound(y);
        return it != stair.end() && it->second > z;
    };
    auto insert = [&](double y, double z) {
        auto it = stair.lower_bound(y);
        if (it != stair.end() && it->second >= z) return; // covered
        while (it != stair.begin()) {
            auto prev = std::prev(it);
            if (prev->second <= z) it = stair.erase(prev);
            else break;
        }
        stair.emplace_hint(it, y, z);
    };

    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && S.at(order[j], 0) == S.at(order[i], 0)) ++j;
        for (size_t t = i; t < j; ++t)
            if (!dominated(S.at(order[t], 1), S.at(order[t], 2))) r.indices.push_back(order[t]);
        for (size_t t = i; t < j; ++t) insert(S.at(order[t], 1), S.at(order[t], 2));
        i = j;
    }
    std::sort(r.indices.begin(), r.indices.end());
    r.op_count = ops;
    return r;
}

void require_partition(const PointSet& S, const HardPartition& P) {
    if (P.n != S.n || P.labels.size() != S.n)
        throw validation_error("partition does not cover the point set");
    for (uint32_t l : P.labels)
        if (l >= P.part_sizes.size()) throw validation_error("partition label out of range");
}

} // namespace

HullResult monotone_chain_hull(const PointSet& S) {
    auto t0 = Clock::now();
    uint64_t ops = 0;
    std::vector<Pt> hull = chain_hull(gather_2d(S), ops);
    return finish_hull(std::move(hull), ops, t0);
}

HullResult chans_hull(const PointSet& S) {
    auto t0 = Clock::now();
    std::vector<Pt> pts = gather_2d(S);
    uint64_t ops = 0;

    for (size_t m = 4;; m *= m) {
        size_t groups = (pts.size() + m - 1) / m;
        if (groups <= 1) {
            std::vector<Pt> hull = chain_hull(pts, ops);
            return finish_hull(std::move(hull), ops, t0);
        }
        std::vector<std::vector<Pt>> hulls(groups);
        for (size_t g = 0; g < groups; ++g) {
            size_t lo = g * m, hi = std::min(lo + m, pts.size());
            hulls[g] = chain_hull({pts.begin() + lo, pts.begin() + hi}, ops);
        }
        Pt start = hulls[0][0];
        for (const auto& h : hulls)
            for (const Pt& v : h) start = std::min(start, v);

        // gift wrap over the group hulls, at most m steps before retrying
        std::vector<Pt> wrap{start};
        Pt cur = start;
        bool closed = false, stuck = false;
        for (size_t step = 0; step < m; ++step) {
            Pt best{};
            bool have = false;
            for (const auto& h : hulls)
                for (const Pt& v : h) {
                    if (v == cur) continue;
                    if (!have) {
                        best = v;
                        have = true;
                        continue;
                    }
                    int o = orient(cur, best, v, ops);
                    if (o < 0 || (o == 0 && dist2(cur, v) > dist2(cur, best))) best = v;
                }
            if (!have) {
                stuck = true; // all points coincide
                break;
            }
            if (best == start) {
                closed = true;
                break;
            }
            wrap.push_back(best);
            cur = best;
        }
        if (closed || stuck) return finish_hull(std::move(wrap), ops, t0);
    }
}

HullResult partition_merge_hull(const PointSet& S, const HardPartition& P) {
    auto t0 = Clock::now();
    std::vector<Pt> pts = gather_2d(S);
    require_partition(S, P);

    uint64_t ops = 0;
    std::vector<std::vector<Pt>> parts(P.part_sizes.size());
    for (size_t k = 0; k < parts.size(); ++k) parts[k].reserve(P.part_sizes[k]);
    for (size_t i = 0; i < S.n; ++i) parts[P.labels[i]].push_back(pts[i]);

    std::vector<Pt> candidates;
    for (auto& part : parts) {
        uint64_t part_ops = 0;
        std::vector<Pt> h = chain_hull(std::move(part), part_ops);
        candidates.insert(candidates.end(), h.begin(), h.end());
        ops += part_ops;
    }
    std::vector<Pt> hull = chain_hull(std::move(candidates), ops);
    return finish_hull(std::move(hull), ops, t0);
}

double hull_area(const std::vector<std::array<double, 2>>& vertices) {
    return shoelace(vertices);
}

double hull_error_pct(const HullResult& truth, const HullResult& predicted) {
    if (!(truth.area > 0.0)) throw validation_error("reference hull area must be positive");
    return std::fabs(truth.area - predicted.area) / truth.area * 100.0;
}

double hausdorff(const PointSet& A, const PointSet& B) {
    validate(A);
    validate(B);
    if (A.d != B.d) throw validation_error("point sets must share a dimension");
    std::vector<double> d2;
    std::vector<uint32_t> idx;
    double worst = 0.0;
    all_nearest(A, B, d2, idx);
    for (double v : d2) worst = std::max(worst, v);
    all_nearest(B, A, d2, idx);
    for (double v : d2) worst = std::max(worst, v);
    return std::sqrt(worst);
}

double chamfer(const PointSet& A, const PointSet& B) {
    validate(A);
    validate(B);
    if (A.d != B.d) throw validation_error("point sets must share a dimension");
    std::vector<double> d2;
    std::vector<uint32_t> idx;
    double total = 0.0;
    all_nearest(A, B, d2, idx);
    for (double v : d2) total += v / double(A.n);
    all_nearest(B, A, d2, idx);
    for (double v : d2) total += v / double(B.n);
    return total;
}

double chamfer_with_grad(const PointSet& A, const PointSet& B, std::vector<double>& grad_b) {
    validate(A);
    validate(B);
    if (A.d != B.d) throw validation_error("point sets must share a dimension");
    grad_b.assign(B.n * B.d, 0.0);

    std::vector<double> d2;
    std::vector<uint32_t> idx;
    double total = 0.0;

    all_nearest(A, B, d2, idx);
    for (size_t i = 0; i < A.n; ++i) {
        total += d2[i] / double(A.n);
        uint32_t j = idx[i];
        for (size_t t = 0; t < B.d; ++t)
            grad_b[j * B.d + t] += 2.0 / double(A.n) * (B.at(j, t) - A.at(i, t));
    }
    all_nearest(B, A, d2, idx);
    for (size_t j = 0; j < B.n; ++j) {
        total += d2[j] / double(B.n);
        uint32_t i = idx[j];
        for (size_t t = 0; t < B.d; ++t)
            grad_b[j * B.d + t] += 2.0 / double(B.n) * (B.at(j, t) - A.at(i, t));
    }
    return total;
}

MaximaResult maxima_3d(const PointSet& S) {
    auto t0 = Clock::now();
    validate(S);
    if (S.d != 3) throw validation_error("maxima need d = 3");
    std::vector<size_t> all(S.n);
    for (size_t i = 0; i < S.n; ++i) all[i] = i;
    MaximaResult r = sweep_maxima(S, all);
    r.elapsed_ns = ns_since(t0);
    return r;
}

MaximaResult adaptive_maxima(const PointSet& S, const HardPartition& P) {
    auto t0 = Clock::now();
    validate(S);
    if (S.d != 3) throw validation_error("maxima need d = 3");
    require_partition(S, P);

    std::vector<std::vector<size_t>> members(P.part_sizes.size());
    for (size_t i = 0; i < S.n; ++i) members[P.labels[i]].push_back(i);

    uint64_t ops = 0;
    std::vector<size_t> candidates;
    for (const auto& part : members) {
        if (part.empty()) continue;
        MaximaResult local = sweep_maxima(S, part);
        ops += local.op_count;
        candidates.insert(candidates.end(), local.indices.begin(), local.indices.end());
    }
    MaximaResult r = sweep_maxima(S, candidates);
    r.op_count += ops;
    r.elapsed_ns = ns_since(t0);
    return r;
}

double maxima_f1(const std::vector<size_t>& predicted, const std::vector<size_t>& truth) {
    if (predicted.empty() && truth.empty()) return 1.0;
    if (predicted.empty() || truth.empty()) return 0.0;
    std::vector<size_t> p = predicted, t = truth;
    std::sort(p.begin(), p.end());
    std::sort(t.begin(), t.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    std::vector<size_t> both;
    std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(both));
    double precision = double(both.size()) / double(p.size());
    double recall = double(both.size()) / double(t.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

} // namespace rpe
