#include "rpe/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

#include "rpe/errors.hpp"

namespace rpe {

namespace {

using Pt = std::array<double, 2>;

int orient_sign(const Pt& a, const Pt& b, const Pt& c) {
    long double abx = (long double)b[0] - a[0], aby = (long double)b[1] - a[1];
    long double acx = (long double)c[0] - a[0], acy = (long double)c[1] - a[1];
    long double cross = abx * acy - aby * acx;
    long double scale = std::fabs(abx * acy) + std::fabs(aby * acx);
    if (std::fabs(cross) <= 1e-12L * scale) return 0;
    return cross > 0 ? 1 : -1;
}

// CCW hull, strict turns, collinear boundary points dropped; 1 or 2 vertices
// for degenerate inputs
std::vector<Pt> hull_of(std::vector<Pt> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<Pt> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && orient_sign(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && orient_sign(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

double seg_seg_dist2(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
    // proper intersection means distance zero
    int o1 = orient_sign(a, b, c), o2 = orient_sign(a, b, d);
    int o3 = orient_sign(c, d, a), o4 = orient_sign(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return 0.0;
    auto pt_seg = [](const Pt& p, const Pt& u, const Pt& v) {
        double vx = v[0] - u[0], vy = v[1] - u[1];
        double len2 = vx * vx + vy * vy;
        double t = 0.0;
        if (len2 > 0.0) t = std::clamp(((p[0] - u[0]) * vx + (p[1] - u[1]) * vy) / len2, 0.0, 1.0);
        double dx = p[0] - (u[0] + t * vx), dy = p[1] - (u[1] + t * vy);
        return dx * dx + dy * dy;
    };
    return std::min(std::min(pt_seg(a, c, d), pt_seg(b, c, d)),
                    std::min(pt_seg(c, a, b), pt_seg(d, a, b)));
}

bool inside_convex(const std::vector<Pt>& hull, const Pt& p) {
    if (hull.size() < 3) return false;
    for (size_t i = 0; i < hull.size(); ++i) {
        if (orient_sign(hull[i], hull[(i + 1) % hull.size()], p) < 0) return false;
    }
    return true;
}

// strict separation: positive hull-to-hull distance and no containment
bool separable(const std::vector<Pt>& A, const std::vector<Pt>& B, double tol) {
    if (inside_convex(A, B[0]) || inside_convex(B, A[0])) return false;
    auto edges = [](const std::vector<Pt>& h) {
        std::vector<std::pair<Pt, Pt>> e;
        if (h.size() == 1) e.push_back({h[0], h[0]});
        else
            for (size_t i = 0; i < h.size(); ++i)
                e.push_back({h[i], h[(i + 1) % h.size()]});
        if (h.size() == 2) e.resize(1);
        return e;
    };
    double tol2 = tol * tol;
    for (const auto& [a, b] : edges(A))
        for (const auto& [c, d] : edges(B))
            if (seg_seg_dist2(a, b, c, d) <= tol2) return false;
    return true;
}

double subset_cost(size_t part_size, size_t n) {
    return double(part_size) * std::log(double(n) / double(part_size));
}

// prefer the part holding the lowest-index item the two masks disagree on;
// this realizes the lexicographically smallest restricted growth string
bool part_tiebreak_better(uint32_t cand, uint32_t best) {
    uint32_t diff = cand ^ best;
    if (diff == 0) return false;
    uint32_t low = diff & (~diff + 1);
    return (cand & low) != 0;
}

struct CellKey {
    std::vector<uint8_t> bits;
    bool operator<(const CellKey& o) const { return bits < o.bits; }
};

} // namespace

HardPartition partition_from_labels(const std::vector<uint32_t>& labels) {
    HardPartition P;
    P.n = labels.size();
    P.labels.resize(labels.size());
    std::map<uint32_t, uint32_t> remap;
    for (size_t i = 0; i < labels.size(); ++i) {
        auto [it, fresh] = remap.emplace(labels[i], uint32_t(remap.size()));
        if (fresh) P.part_sizes.push_back(0);
        P.labels[i] = it->second;
        P.part_sizes[it->second]++;
    }
    return P;
}

OraclePartitionResult partition_entropy(const HardPartition& P, size_t expected_n) {
    if (P.n == 0) throw validation_error("empty partition");
    if (expected_n != 0 && expected_n != P.n)
        throw validation_error("partition size does not match the point set");
    size_t total = 0;
    for (size_t s : P.part_sizes) {
        if (s == 0) throw validation_error("empty part in partition");
        total += s;
    }
    if (total != P.n || P.labels.size() != P.n)
        throw validation_error("partition sizes are inconsistent");
    OraclePartitionResult r;
    for (size_t s : P.part_sizes) r.entropy_nats += subset_cost(s, P.n);
    r.entropy_normalized = r.entropy_nats / double(P.n);
    r.partition = P;
    return r;
}

RealizableSubsetIndex realizable_subsets_2d(const PointSet& S) {
    validate(S);
    if (S.d != 2) throw validation_error("realizable subset enumeration needs d = 2");
    if (S.n == 0) throw validation_error("empty point set");
    if (S.n > 20) throw size_guard_error("realizable subset enumeration is limited to n <= 20");

    RealizableSubsetIndex out;
    out.n = S.n;
    double tol = 1e-12 * std::max(diameter(S), 1.0);
    uint32_t full = S.n >= 32 ? 0xffffffffu : ((1u << S.n) - 1);

    std::vector<Pt> pts(S.n);
    for (size_t i = 0; i < S.n; ++i) pts[i] = {S.at(i, 0), S.at(i, 1)};

    std::vector<Pt> side_a, side_b;
    for (uint32_t mask = 1; mask < full; ++mask) {
        if (!(mask & 1u)) continue; // complements share the answer
        side_a.clear();
        side_b.clear();
        for (size_t i = 0; i < S.n; ++i)
            ((mask >> i) & 1u ? side_a : side_b).push_back(pts[i]);
        if (separable(hull_of(side_a), hull_of(side_b), tol)) {
            out.masks.push_back(mask);
            out.masks.push_back(full & ~mask);
        }
    }
    std::sort(out.masks.begin(), out.masks.end());
    return out;
}

OraclePartitionResult min_entropy_partition(const PointSet& S, size_t parts_min) {
    validate(S);
    if (S.d != 2) throw validation_error("min-entropy partition needs d = 2");
    if (S.n == 0) throw validation_error("empty point set");
    if (S.n > 15) throw size_guard_error("min-entropy partition is limited to n <= 15");
    if (parts_min == 0) throw validation_error("parts_min must be at least 1");
    if (parts_min > S.n) throw validation_error("parts_min exceeds the number of points");

    RealizableSubsetIndex idx = realizable_subsets_2d(S);
    uint32_t full = (1u << S.n) - 1;

    std::vector<uint32_t> parts = idx.masks;
    if (parts_min <= 1) parts.push_back(full); // the whole set is always realizable
    std::vector<std::vector<uint32_t>> by_low(S.n);
    for (uint32_t p : parts) {
        uint32_t low = p & (~p + 1);
        size_t bit = size_t(std::countr_zero(low));
        by_low[bit].push_back(p);
    }

    size_t rmax = parts_min;
    const double inf = HUGE_VAL;
    // g[mask][r]: min cost to split mask into realizable parts, needing >= r more parts
    std::vector<std::vector<double>> g(full + 1, std::vector<double>(rmax + 1, inf));
    for (size_t r = 0; r <= rmax; ++r) g[0][r] = r == 0 ? 0.0 : inf;

    for (uint32_t mask = 1; mask <= full; ++mask) {
        size_t bit = size_t(std::countr_zero(mask));
        for (uint32_t p : by_low[bit]) {
            if ((p & mask) != p) continue;
            double c = subset_cost(size_t(std::popcount(p)), S.n);
            uint32_t rest = mask & ~p;
            for (size_t r = 0; r <= rmax; ++r) {
                size_t rr = r > 0 ? r - 1 : 0;
                if (g[rest][rr] < inf) g[mask][r] = std::min(g[mask][r], c + g[rest][rr]);
            }
        }
    }
    if (!(g[full][rmax] < inf))
        throw validation_error("no realizable partition with the requested minimum parts");

    // reconstruct with the deterministic tie-break
    std::vector<uint32_t> labels(S.n, 0);
    uint32_t mask = full;
    size_t r = rmax;
    uint32_t part_id = 0;
    while (mask) {
        size_t bit = size_t(std::countr_zero(mask));
        size_t rr = r > 0 ? r - 1 : 0;
        uint32_t best_part = 0;
        bool found = false;
        for (uint32_t p : by_low[bit]) {
            if ((p & mask) != p) continue;
            double c = subset_cost(size_t(std::popcount(p)), S.n);
            uint32_t rest = mask & ~p;
            if (g[rest][rr] < inf && c + g[rest][rr] == g[mask][r]) {
                if (!found || part_tiebreak_better(p, best_part)) {
                    best_part = p;
                    found = true;
                }
            }
        }
        for (size_t i = 0; i < S.n; ++i)
            if ((best_part >> i) & 1u) labels[i] = part_id;
        ++part_id;
        mask &= ~best_part;
        r = rr;
    }
    return partition_entropy(partition_from_labels(labels));
}

ArrangementResult min_entropy_arrangement(const PointSet& S, size_t m) {
    validate(S);
    if (S.d != 2) throw validation_error("arrangement search needs d = 2");
    if (S.n == 0) throw validation_error("empty point set");
    if (S.n > 64) throw size_guard_error("arrangement search is limited to n <= 64");
    if (m > 3) throw size_guard_error("arrangement search is limited to m <= 3");

    ArrangementResult out;
    if (m == 0) {
        std::vector<uint32_t> labels(S.n, 0);
        out.result = partition_entropy(partition_from_labels(labels));
        return out;
    }

    double eps = 1e-9 * std::max(diameter(S), 1e-30);
    uint64_t full = S.n >= 64 ? ~0ULL : ((1ULL << S.n) - 1);

    // candidate lines through point pairs plus offsets, deduped by the
    // bipartition they induce
    struct Cand {
        uint64_t mask; // canonical: contains point 0
        std::vector<double> w;
        double b;
        double solo; // single-line partition entropy, for search ordering
    };
    std::map<uint64_t, size_t> seen;
    std::vector<Cand> cands;
    for (size_t i = 0; i < S.n; ++i)
        for (size_t j = i + 1; j < S.n; ++j) {
            double dx = S.at(j, 0) - S.at(i, 0), dy = S.at(j, 1) - S.at(i, 1);
            double len = std::hypot(dx, dy);
            if (len == 0.0) continue;
            double wx = -dy / len, wy = dx / len;
            double base = 0.5 * (wx * (S.at(i, 0) + S.at(j, 0)) + wy * (S.at(i, 1) + S.at(j, 1)));
            for (double b : {base, base + eps, base - eps}) {
                uint64_t mask = 0;
                for (size_t p = 0; p < S.n; ++p)
                    if (wx * S.at(p, 0) + wy * S.at(p, 1) - b >= 0.0) mask |= 1ULL << p;
                if (mask == 0 || mask == full) continue; // must split S
                uint64_t canon = (mask & 1ULL) ? mask : (full & ~mask);
                if (seen.count(canon)) continue;
                double h = subset_cost(size_t(std::popcount(mask)), S.n) +
                           subset_cost(size_t(std::popcount(full & ~mask)), S.n);
                seen[canon] = cands.size();
                cands.push_back({canon, {wx, wy}, b, h});
            }
        }
    if (cands.size() < m)
        throw validation_error("not enough distinct splitting lines for the requested m");

    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.solo < b.solo; });

    auto cell_entropy = [&](const std::vector<size_t>& chosen, std::vector<uint32_t>* labels_out) {
        std::map<uint64_t, size_t> sizes;
        std::vector<uint64_t> key(S.n, 0);
        for (size_t t = 0; t < chosen.size(); ++t) {
            uint64_t msk = cands[chosen[t]].mask;
            for (size_t p = 0; p < S.n; ++p)
                if ((msk >> p) & 1ULL) key[p] |= 1ULL << t;
        }
        for (size_t p = 0; p < S.n; ++p) sizes[key[p]]++;
        double h = 0.0;
        for (auto& [_, sz] : sizes) h += subset_cost(sz, S.n);
        if (labels_out) {
            labels_out->resize(S.n);
            for (size_t p = 0; p < S.n; ++p) (*labels_out)[p] = uint32_t(key[p]);
        }
        return h;
    };

    double best = HUGE_VAL;
    std::vector<uint32_t> best_labels;
    std::vector<size_t> best_lines, chosen;

    auto dfs = [&](auto&& self, size_t start) -> void {
        if (chosen.size() == m) {
            std::vector<uint32_t> raw;
            double h = cell_entropy(chosen, &raw);
            std::vector<uint32_t> labels = partition_from_labels(raw).labels;
            if (h < best || (h == best && labels < best_labels)) {
                best = h;
                best_labels = labels;
                best_lines = chosen;
            }
            return;
        }
        for (size_t c = start; c + (m - chosen.size()) <= cands.size(); ++c) {
            chosen.push_back(c);
            if (cell_entropy(chosen, nullptr) <= best) self(self, c + 1);
            chosen.pop_back();
        }
    };
    dfs(dfs, 0);

    std::vector<uint32_t> rgs_labels = best_labels;
    out.result = partition_entropy(partition_from_labels(rgs_labels));
    for (size_t c : best_lines) out.lines.push_back({cands[c].w, cands[c].b});
    return out;
}

OraclePartitionResult generating_partition_entropy(const std::vector<uint32_t>& labels) {
    if (labels.empty()) throw validation_error("empty label vector");
    return partition_entropy(partition_from_labels(labels));
}

} // namespace rpe
