#include "rpe/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rpe/errors.hpp"
#include "rpe/rng.hpp"

namespace rpe {

namespace {

constexpr double kMassFloor = 1e-300;
constexpr int kMaxHalvings = 20;

double softplus(double z) {
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double entropy_nats(const std::vector<double>& masses) {
    double h = 0.0;
    for (double p : masses)
        if (p > 0.0) h -= p * std::log(std::max(p, kMassFloor));
    return h;
}

void check_inputs(const PointSet& S, const HalfspaceSet& H) {
    validate(S);
    if (S.n == 0) throw validation_error("empty point set");
    if (H.m == 0) throw validation_error("halfspace set is empty");
    if (H.d != S.d) throw validation_error("halfspace dimension does not match points");
    if (H.w.size() != H.m * H.d || H.b.size() != H.m)
        throw validation_error("halfspace block size mismatch");
    if (!(H.tau > 0.0) || !std::isfinite(H.tau))
        throw validation_error("tau must be positive and finite");
    for (double v : H.w)
        if (!std::isfinite(v)) throw validation_error("non-finite halfspace normal");
    for (double v : H.b)
        if (!std::isfinite(v)) throw validation_error("non-finite halfspace offset");
}

// per-point log gate terms: ls1[t] = log sigma(z_t), ls0[t] = log(1 - sigma(z_t))
void log_sides(std::span<const double> x, const HalfspaceSet& H, std::vector<double>& ls1,
               std::vector<double>& ls0) {
    for (size_t t = 0; t < H.m; ++t) {
        double z = (dot(x, H.normal(t)) - H.b[t]) / H.tau;
        ls1[t] = -softplus(-z);
        ls0[t] = -softplus(z);
    }
}

void gates_from_log_sides(const CellGating& G, const std::vector<double>& ls1,
                          const std::vector<double>& ls0, std::vector<double>& g) {
    size_t K = G.codes.size();
    double mx = -std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < K; ++j) {
        double L = 0.0;
        const auto& bits = G.codes[j];
        for (size_t t = 0; t < G.m; ++t) L += bits[t] ? ls1[t] : ls0[t];
        g[j] = L;
        mx = std::max(mx, L);
    }
    double z = 0.0;
    for (size_t j = 0; j < K; ++j) {
        g[j] = std::exp(g[j] - mx);
        z += g[j];
    }
    for (size_t j = 0; j < K; ++j) g[j] /= z;
}

// symmetric Jacobi eigensolver, eigenvectors returned as rows, sorted by
// eigenvalue descending
void jacobi_eigen(std::vector<double> a, size_t d, std::vector<double>& evals,
                  std::vector<double>& evecs) {
    evecs.assign(d * d, 0.0);
    for (size_t i = 0; i < d; ++i) evecs[i * d + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < d; ++p)
            for (size_t q = p + 1; q < d; ++q) off += a[p * d + q] * a[p * d + q];
        if (off < 1e-28) break;
        for (size_t p = 0; p < d; ++p)
            for (size_t q = p + 1; q < d; ++q) {
                double apq = a[p * d + q];
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (size_t r = 0; r < d; ++r) {
                    double arp = a[r * d + p], arq = a[r * d + q];
                    a[r * d + p] = c * arp - s * arq;
                    a[r * d + q] = s * arp + c * arq;
                }
                for (size_t r = 0; r < d; ++r) {
                    double apr = a[p * d + r], aqr = a[q * d + r];
                    a[p * d + r] = c * apr - s * aqr;
                    a[q * d + r] = s * apr + c * aqr;
                }
                for (size_t r = 0; r < d; ++r) {
                    double vpr = evecs[p * d + r], vqr = evecs[q * d + r];
                    evecs[p * d + r] = c * vpr - s * vqr;
                    evecs[q * d + r] = s * vpr + c * vqr;
                }
            }
    }
    evals.assign(d, 0.0);
    for (size_t i = 0; i < d; ++i) evals[i] = a[i * d + i];
    std::vector<size_t> order(d);
    for (size_t i = 0; i < d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t x, size_t y) { return evals[x] > evals[y]; });
    std::vector<double> ev(d), vec(d * d);
    for (size_t i = 0; i < d; ++i) {
        ev[i] = evals[order[i]];
        for (size_t c = 0; c < d; ++c) vec[i * d + c] = evecs[order[i] * d + c];
    }
    evals = std::move(ev);
    evecs = std::move(vec);
}

// principal directions with non-negligible variance, as rows
std::vector<std::vector<double>> principal_directions(const PointSet& S) {
    size_t d = S.d;
    std::vector<double> mean(d, 0.0);
    for (size_t i = 0; i < S.n; ++i)
        for (size_t c = 0; c < d; ++c) mean[c] += S.at(i, c);
    for (double& v : mean) v /= double(S.n);
    std::vector<double> cov(d * d, 0.0);
    for (size_t i = 0; i < S.n; ++i)
        for (size_t p = 0; p < d; ++p)
            for (size_t q = 0; q < d; ++q)
                cov[p * d + q] += (S.at(i, p) - mean[p]) * (S.at(i, q) - mean[q]);
    for (double& v : cov) v /= double(S.n);
    std::vector<double> evals, evecs;
    jacobi_eigen(cov, d, evals, evecs);
    double top = evals.empty() ? 0.0 : std::max(evals[0], 0.0);
    std::vector<std::vector<double>> dirs;
    for (size_t i = 0; i < d; ++i) {
        if (evals[i] > std::max(1e-18, 1e-12 * top))
            dirs.emplace_back(evecs.begin() + i * d, evecs.begin() + (i + 1) * d);
    }
    return dirs;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * double(v.size() - 1);
    size_t lo = size_t(pos);
    size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - double(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

std::vector<std::vector<double>> direction_fan(const PointSet& S, uint64_t seed) {
    size_t d = S.d;
    std::vector<std::vector<double>> dirs;
    if (d == 1) {
        dirs.push_back({1.0});
    } else if (d == 2) {
        for (int j = 0; j < 16; ++j) {
            double a = double(j) * 3.14159265358979323846 / 16.0;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
    } else if (d == 3) {
        // Fibonacci hemisphere
        for (int j = 0; j < 32; ++j) {
            double zc = (double(j) + 0.5) / 32.0;
            double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            double a = double(j) * 2.39996322972865332;
            dirs.push_back({r * std::cos(a), r * std::sin(a), zc});
        }
    } else {
        Rng rng = derive_stream(seed, 0x646972ULL);
        for (int j = 0; j < 32; ++j) {
            std::vector<double> v(d);
            double norm = 0.0;
            do {
                norm = 0.0;
                for (size_t c = 0; c < d; ++c) {
                    v[c] = rng.normal();
                    norm += v[c] * v[c];
                }
            } while (norm < 1e-12);
            norm = std::sqrt(norm);
            for (double& x : v) x /= norm;
            dirs.push_back(v);
        }
    }
    for (auto& dir : principal_directions(S)) dirs.push_back(dir);
    return dirs;
}

} // namespace

HalfspaceInit halfspace_init_from_string(const std::string& s) {
    if (s == "principal") return HalfspaceInit::principal;
    if (s == "maxmargin") return HalfspaceInit::maxmargin;
    if (s == "random") return HalfspaceInit::random;
    throw validation_error("unknown halfspace init: " + s);
}

std::string to_string(HalfspaceInit s) {
    switch (s) {
        case HalfspaceInit::principal: return "principal";
        case HalfspaceInit::maxmargin: return "maxmargin";
        default: return "random";
    }
}

double soft_halfspace(std::span<const double> x, std::span<const double> w, double b,
                      double tau) {
    if (!(tau > 0.0)) throw validation_error("tau must be positive");
    return sigmoid((dot(x, w) - b) / tau);
}

CellGating enumerate_cells(const PointSet& S, const HalfspaceSet& H) {
    check_inputs(S, H);
    CellGating G;
    G.m = H.m;
    std::map<std::vector<uint8_t>, size_t> seen;
    for (size_t i = 0; i < S.n; ++i) {
        std::vector<uint8_t> code(H.m, 0);
        for (size_t t = 0; t < H.m; ++t) {
            double v = dot(S.point(i), H.normal(t)) - H.b[t];
            if (v == 0.0) G.on_boundary = true;
            code[t] = v >= 0.0 ? 1 : 0;
        }
        seen.emplace(std::move(code), 0);
    }
    for (auto& [code, idx] : seen) {
        idx = G.codes.size();
        G.codes.push_back(code);
    }
    // soft masses under the current gates
    G.soft_masses.assign(G.codes.size(), 0.0);
    std::vector<double> ls1(H.m), ls0(H.m), g(G.codes.size());
    for (size_t i = 0; i < S.n; ++i) {
        log_sides(S.point(i), H, ls1, ls0);
        gates_from_log_sides(G, ls1, ls0, g);
        for (size_t j = 0; j < g.size(); ++j) G.soft_masses[j] += g[j];
    }
    for (double& q : G.soft_masses) q /= double(S.n);
    return G;
}

std::vector<double> cell_gates(std::span<const double> x, const HalfspaceSet& H,
                               const CellGating& G) {
    if (G.codes.empty()) throw validation_error("cell gating is empty");
    std::vector<double> ls1(H.m), ls0(H.m), g(G.codes.size());
    log_sides(x, H, ls1, ls0);
    gates_from_log_sides(G, ls1, ls0, g);
    return g;
}

double h_soft(const PointSet& S, const HalfspaceSet& H, const CellGating& G) {
    check_inputs(S, H);
    if (G.codes.empty()) throw validation_error("cell gating is empty");
    size_t K = G.codes.size();
    std::vector<double> q(K, 0.0), ls1(H.m), ls0(H.m), g(K);
    for (size_t i = 0; i < S.n; ++i) {
        log_sides(S.point(i), H, ls1, ls0);
        gates_from_log_sides(G, ls1, ls0, g);
        for (size_t j = 0; j < K; ++j) q[j] += g[j];
    }
    for (double& v : q) v /= double(S.n);
    return entropy_nats(q);
}

double h_soft_with_grad(const PointSet& S, const HalfspaceSet& H, const CellGating& G,
                        HSoftGradient& grad) {
    check_inputs(S, H);
    if (G.codes.empty()) throw validation_error("cell gating is empty");
    size_t n = S.n, m = H.m, d = S.d, K = G.codes.size();

    std::vector<double> gates(n * K), hvals(n * m);
    std::vector<double> q(K, 0.0), ls1(m), ls0(m);
    for (size_t i = 0; i < n; ++i) {
        log_sides(S.point(i), H, ls1, ls0);
        for (size_t t = 0; t < m; ++t)
            hvals[i * m + t] = sigmoid((dot(S.point(i), H.normal(t)) - H.b[t]) / H.tau);
        std::vector<double> g(K);
        gates_from_log_sides(G, ls1, ls0, g);
        for (size_t j = 0; j < K; ++j) {
            gates[i * K + j] = g[j];
            q[j] += g[j];
        }
    }
    for (double& v : q) v /= double(n);
    double H_val = entropy_nats(q);

    std::vector<double> logq(K);
    for (size_t j = 0; j < K; ++j) logq[j] = std::log(std::max(q[j], kMassFloor));

    grad.points.assign(n * d, 0.0);
    grad.w.assign(m * d, 0.0);
    grad.b.assign(m, 0.0);

    for (size_t i = 0; i < n; ++i) {
        const double* gi = gates.data() + i * K;
        double ui = 0.0;
        for (size_t j = 0; j < K; ++j) ui += gi[j] * logq[j];
        // r_it = dH/dz_it where z = (w.x - b)/tau
        for (size_t t = 0; t < m; ++t) {
            double hit = hvals[i * m + t];
            double rit = 0.0;
            for (size_t j = 0; j < K; ++j) {
                double Gij = -(gi[j] / double(n)) * (logq[j] - ui);
                rit += Gij * (double(G.codes[j][t]) - hit);
            }
            double scaled = rit / H.tau;
            for (size_t c = 0; c < d; ++c) {
                grad.points[i * d + c] += scaled * H.wat(t, c);
                grad.w[t * d + c] += scaled * S.at(i, c);
            }
            grad.b[t] -= scaled;
        }
    }
    return H_val;
}

double empirical_margin(const PointSet& S, const HalfspaceSet& H) {
    check_inputs(S, H);
    double best = HUGE_VAL;
    for (size_t t = 0; t < H.m; ++t) {
        double norm = std::sqrt(dot(H.normal(t), H.normal(t)));
        if (!(norm > 0.0)) throw validation_error("zero-norm halfspace normal");
        for (size_t i = 0; i < S.n; ++i)
            best = std::min(best, std::fabs(dot(S.point(i), H.normal(t)) - H.b[t]) / norm);
    }
    return best;
}

HardPartition hard_masses(const PointSet& S, const HalfspaceSet& H, const CellGating& G) {
    check_inputs(S, H);
    std::map<std::vector<uint8_t>, uint32_t> index;
    for (size_t j = 0; j < G.codes.size(); ++j) index[G.codes[j]] = uint32_t(j);
    std::vector<uint32_t> labels(S.n);
    std::vector<uint8_t> code(H.m);
    for (size_t i = 0; i < S.n; ++i) {
        for (size_t t = 0; t < H.m; ++t)
            code[t] = (dot(S.point(i), H.normal(t)) - H.b[t]) >= 0.0 ? 1 : 0;
        auto it = index.find(code);
        if (it == index.end())
            throw validation_error("point sign pattern not present in the gating");
        labels[i] = it->second;
    }
    return partition_from_labels(labels);
}

HalfspaceSet init_halfspaces(const PointSet& S, size_t m, double tau, HalfspaceInit strategy,
                             uint64_t seed) {
    validate(S);
    if (S.n == 0) throw validation_error("empty point set");
    if (m == 0) throw validation_error("m must be at least 1");
    HalfspaceSet H;
    H.m = m;
    H.d = S.d;
    H.tau = tau;
    H.w.assign(m * S.d, 0.0);
    H.b.assign(m, 0.0);

    if (strategy == HalfspaceInit::random) {
        std::vector<double> median(S.d);
        for (size_t c = 0; c < S.d; ++c) {
            std::vector<double> col(S.n);
            for (size_t i = 0; i < S.n; ++i) col[i] = S.at(i, c);
            std::sort(col.begin(), col.end());
            median[c] = S.n % 2 ? col[S.n / 2]
                                : 0.5 * (col[S.n / 2 - 1] + col[S.n / 2]);
        }
        Rng rng = derive_stream(seed, 0x68616c66ULL);
        for (size_t t = 0; t < m; ++t) {
            double norm = 0.0;
            do {
                norm = 0.0;
                for (size_t c = 0; c < S.d; ++c) {
                    H.wat(t, c) = rng.normal();
                    norm += H.wat(t, c) * H.wat(t, c);
                }
            } while (norm < 1e-12);
            norm = std::sqrt(norm);
            for (size_t c = 0; c < S.d; ++c) H.wat(t, c) /= norm;
            H.b[t] = dot(H.normal(t), std::span<const double>(median));
        }
        return H;
    }

    if (strategy == HalfspaceInit::principal) {
        auto dirs = principal_directions(S);
        if (dirs.empty()) throw validation_error("degenerate covariance: no principal directions");
        std::vector<size_t> per_dir(dirs.size(), 0), slot(m);
        for (size_t t = 0; t < m; ++t) {
            size_t di = t % dirs.size();
            slot[t] = per_dir[di]++;
        }
        for (size_t t = 0; t < m; ++t) {
            size_t di = t % dirs.size();
            const auto& dir = dirs[di];
            std::vector<double> proj(S.n);
            for (size_t i = 0; i < S.n; ++i)
                proj[i] = dot(S.point(i), std::span<const double>(dir));
            double q = double(slot[t] + 1) / double(per_dir[di] + 1);
            for (size_t c = 0; c < S.d; ++c) H.wat(t, c) = dir[c];
            H.b[t] = quantile(proj, q);
        }
        return H;
    }

    // maxmargin: rank (direction, gap) candidates by gap width
    auto dirs = direction_fan(S, seed);
    struct Cand {
        double width, mid;
        size_t dir;
    };
    std::vector<Cand> cands;
    for (size_t di = 0; di < dirs.size(); ++di) {
        std::vector<double> proj(S.n);
        for (size_t i = 0; i < S.n; ++i)
            proj[i] = dot(S.point(i), std::span<const double>(dirs[di]));
        std::sort(proj.begin(), proj.end());
        for (size_t i = 0; i + 1 < S.n; ++i) {
            double gap = proj[i + 1] - proj[i];
            if (gap > 0.0) cands.push_back({gap, 0.5 * (proj[i] + proj[i + 1]), di});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.width != b.width) return a.width > b.width;
        if (a.dir != b.dir) return a.dir < b.dir;
        return a.mid < b.mid;
    });
    size_t taken = 0;
    for (const Cand& c : cands) {
        bool dup = false;
        for (size_t t = 0; t < taken; ++t) {
            if (std::fabs(H.b[t] - c.mid) < 1e-12) {
                bool same_dir = true;
                for (size_t cc = 0; cc < S.d; ++cc)
                    if (std::fabs(H.wat(t, cc) - dirs[c.dir][cc]) > 1e-12) same_dir = false;
                if (same_dir) dup = true;
            }
        }
        if (dup) continue;
        for (size_t cc = 0; cc < S.d; ++cc) H.wat(taken, cc) = dirs[c.dir][cc];
        H.b[taken] = c.mid;
        if (++taken == m) break;
    }
    if (taken < m)
        throw validation_error("maxmargin init: not enough distinct projection gaps");
    return H;
}

BoundReport evaluate_bound(const PointSet& S, const HalfspaceSet& H, const CellGating& G,
                           const BoundOptions& opt) {
    check_inputs(S, H);
    if (!(opt.delta > 0.0 && opt.delta < 1.0)) throw validation_error("delta must be in (0,1)");
    if (!(opt.constant_c > 0.0)) throw validation_error("constant C must be positive");
    BoundReport r;
    r.margin = empirical_margin(S, H);
    r.tau = H.tau;
    r.m = H.m;
    r.n = S.n;
    r.d = S.d;
    r.delta = opt.delta;
    r.constant_c = opt.constant_c;
    r.cells = G.codes.size();
    r.lipschitz = 1.0 / (4.0 * H.tau);
    r.eps_smooth = std::exp(-r.margin / (4.0 * H.tau));
    if (opt.infinite_n) {
        r.rademacher = 0.0;
        r.slack = 0.0;
    } else {
        r.rademacher = opt.constant_c * r.lipschitz *
                       std::sqrt(double(S.d) * std::log(double(H.m)) / double(S.n));
        r.slack = std::sqrt(std::log(2.0 / opt.delta) / (2.0 * double(S.n)));
    }
    r.eps_total = r.eps_smooth + 2.0 * r.rademacher + r.slack;
    double K = double(r.cells);
    if (r.eps_total >= K) {
        r.vacuous = true;
        r.bound = std::max(0.0, r.eps_total * std::log(K));
    } else {
        r.bound = r.eps_total > 0.0 ? r.eps_total * std::log(K / r.eps_total) : 0.0;
    }
    return r;
}

HalfspaceFitResult fit_halfspaces(const PointSet& S, const HalfspaceFitOptions& opt) {
    HalfspaceFitResult out;
    out.halfspaces = init_halfspaces(S, opt.m, opt.tau, opt.strategy, opt.seed);
    out.gating = enumerate_cells(S, out.halfspaces);
    double cur = h_soft(S, out.halfspaces, out.gating);
    if (!std::isfinite(cur)) throw numeric_error("non-finite loss at step 0");
    out.trace.push_back(cur);

    HSoftGradient g;
    for (size_t step = 1; step <= opt.steps; ++step) {
        h_soft_with_grad(S, out.halfspaces, out.gating, g);
        double gnorm = 0.0;
        for (double v : g.w) gnorm += v * v;
        for (double v : g.b) gnorm += v * v;
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-8) break;

        double lr = opt.lr;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            HalfspaceSet trial = out.halfspaces;
            bool ok = true;
            for (size_t t = 0; t < trial.m && ok; ++t) {
                for (size_t c = 0; c < trial.d; ++c)
                    trial.wat(t, c) -= lr * g.w[t * trial.d + c];
                trial.b[t] -= lr * g.b[t];
                double norm = 0.0;
                for (size_t c = 0; c < trial.d; ++c) norm += trial.wat(t, c) * trial.wat(t, c);
                norm = std::sqrt(norm);
                if (norm < 1e-12) {
                    ok = false;
                    break;
                }
                for (size_t c = 0; c < trial.d; ++c) trial.wat(t, c) /= norm;
                trial.b[t] /= norm;
            }
            if (ok) {
                CellGating trial_g = enumerate_cells(S, trial);
                double h_new = h_soft(S, trial, trial_g);
                if (std::isfinite(h_new) && h_new <= cur) {
                    out.halfspaces = std::move(trial);
                    out.gating = std::move(trial_g);
                    cur = h_new;
                    accepted = true;
                    break;
                }
            }
            lr *= 0.5;
        }
        if (!accepted) break;
        out.trace.push_back(cur);
        out.steps_run = step;
    }
    out.value = cur;
    return out;
}

} // namespace rpe
