#include "rpe/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rpe/errors.hpp"
#include "rpe/rng.hpp"

namespace rpe {

namespace {

constexpr double kMassFloor = 1e-300;
constexpr double kGradStop = 1e-8;
constexpr int kMaxHalvings = 20;

double plogp(double p) {
    if (p <= 0.0) return 0.0;
    return p * std::log(std::max(p, kMassFloor));
}

double entropy_nats(const std::vector<double>& masses) {
    double h = 0.0;
    for (double p : masses) h -= plogp(p);
    return h;
}

double effective_alpha(const PointSet& S, const AnchorSet& A) {
    if (A.scale_mode == ScaleMode::raw) return A.alpha;
    double msd = mean_squared_pairwise_distance(S);
    if (!(msd > 0.0))
        throw validation_error("normalized scale mode needs at least two distinct points");
    return A.alpha / msd;
}

void check_inputs(const PointSet& S, const AnchorSet& A) {
    validate(S);
    if (S.n == 0) throw validation_error("empty point set");
    if (A.k == 0) throw validation_error("anchor set is empty");
    if (A.d != S.d) throw validation_error("anchor dimension does not match points");
    if (A.centers.size() != A.k * A.d) throw validation_error("anchor block size mismatch");
    if (!(A.alpha > 0.0) || !std::isfinite(A.alpha))
        throw validation_error("alpha must be positive and finite");
    for (double v : A.centers)
        if (!std::isfinite(v)) throw validation_error("non-finite anchor coordinate");
}

} // namespace

ScaleMode scale_mode_from_string(const std::string& s) {
    if (s == "raw") return ScaleMode::raw;
    if (s == "normalized") return ScaleMode::normalized;
    throw validation_error("unknown scale_mode: " + s);
}

std::string to_string(ScaleMode m) { return m == ScaleMode::raw ? "raw" : "normalized"; }

AnchorInit anchor_init_from_string(const std::string& s) {
    if (s == "kmeanspp") return AnchorInit::kmeanspp;
    if (s == "random") return AnchorInit::random;
    throw validation_error("unknown anchor init: " + s);
}

size_t default_k(size_t n) { return std::max<size_t>(1, std::min<size_t>(16, n / 4)); }

SoftAssignment compute_soft_assignments(const PointSet& S, const AnchorSet& A) {
    check_inputs(S, A);
    SoftAssignment out;
    out.n = S.n;
    out.k = A.k;
    out.alpha_eff = effective_alpha(S, A);
    out.p.assign(S.n * A.k, 0.0);
    out.masses.assign(A.k, 0.0);

    std::vector<double> logits(A.k);
    for (size_t i = 0; i < S.n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < A.k; ++j) {
            logits[j] = -out.alpha_eff * squared_distance(S.point(i), A.center(j));
            mx = std::max(mx, logits[j]);
        }
        double z = 0.0;
        for (size_t j = 0; j < A.k; ++j) {
            logits[j] = std::exp(logits[j] - mx);
            z += logits[j];
        }
        for (size_t j = 0; j < A.k; ++j) {
            double pij = logits[j] / z;
            out.p[i * A.k + j] = pij;
            out.masses[j] += pij;
        }
    }
    for (double& m : out.masses) m /= double(S.n);
    return out;
}

EntropyReport h_diff(const PointSet& S, const AnchorSet& A) {
    SoftAssignment sa = compute_soft_assignments(S, A);
    return {entropy_nats(sa.masses), A.k};
}

double h_diff_value(const PointSet& S, const AnchorSet& A) { return h_diff(S, A).value; }

HDiffGradient grad_h_diff(const PointSet& S, const AnchorSet& A) {
    SoftAssignment sa = compute_soft_assignments(S, A);
    size_t n = S.n, k = A.k, d = S.d;
    HDiffGradient g;
    g.points.assign(n * d, 0.0);
    g.anchors.assign(k * d, 0.0);

    std::vector<double> logm(k);
    for (size_t j = 0; j < k; ++j) logm[j] = std::log(std::max(sa.masses[j], kMassFloor));

    double alpha_eff = sa.alpha_eff;
    // dH/dmsd accumulates only in normalized mode
    double w_dist = 0.0;
    bool normalized = (A.scale_mode == ScaleMode::normalized);

    for (size_t i = 0; i < n; ++i) {
        const double* pi = sa.p.data() + i * k;
        double si = 0.0;
        for (size_t j = 0; j < k; ++j) si += pi[j] * logm[j];
        for (size_t t = 0; t < k; ++t) {
            double git = -(pi[t] / double(n)) * (logm[t] - si); // dH / dlogit_it
            if (git == 0.0 && !normalized) continue;
            double coef = 2.0 * alpha_eff * git;
            for (size_t c = 0; c < d; ++c) {
                double diff = S.at(i, c) - A.at(t, c);
                g.points[i * d + c] -= coef * diff;
                g.anchors[t * d + c] += coef * diff;
            }
            if (normalized) w_dist += git * squared_distance(S.point(i), A.center(t));
        }
    }

    if (normalized) {
        // logit_it = -(alpha/msd) * d_it^2, so dH/dmsd = (alpha/msd^2) * sum git * d_it^2
        double msd = mean_squared_pairwise_distance(S);
        double dh_dmsd = (A.alpha / (msd * msd)) * w_dist;
        auto pairs = msd_pairs(n);
        double inv = 2.0 / double(pairs.size());
        for (auto [a, b] : pairs) {
            for (size_t c = 0; c < d; ++c) {
                double diff = S.at(a, c) - S.at(b, c);
                g.points[a * d + c] += dh_dmsd * inv * diff;
                g.points[b * d + c] -= dh_dmsd * inv * diff;
            }
        }
    }
    return g;
}

std::vector<double> anchor_fixed_point_residuals(const PointSet& S, const AnchorSet& A) {
    SoftAssignment sa = compute_soft_assignments(S, A);
    std::vector<double> res(A.k, 0.0);
    for (size_t j = 0; j < A.k; ++j) {
        double wsum = 0.0;
        std::vector<double> target(S.d, 0.0);
        for (size_t i = 0; i < S.n; ++i) {
            double w = sa.at(i, j) * sa.at(i, j);
            wsum += w;
            for (size_t c = 0; c < S.d; ++c) target[c] += w * S.at(i, c);
        }
        if (wsum <= 0.0) {
            res[j] = 0.0; // anchor holds no responsibility at all
            continue;
        }
        double s = 0.0;
        for (size_t c = 0; c < S.d; ++c) {
            double diff = A.at(j, c) - target[c] / wsum;
            s += diff * diff;
        }
        res[j] = std::sqrt(s);
    }
    return res;
}

AnchorSet init_anchors(const PointSet& S, size_t k, double alpha, ScaleMode mode,
                       AnchorInit init, uint64_t seed) {
    validate(S);
    if (k == 0) throw validation_error("k must be at least 1");
    if (k > S.n) throw validation_error("k exceeds the number of points");
    AnchorSet A;
    A.k = k;
    A.d = S.d;
    A.alpha = alpha;
    A.scale_mode = mode;
    A.centers.assign(k * S.d, 0.0);

    Rng rng = derive_stream(seed, 0x616e63686f72ULL);
    std::vector<size_t> chosen;
    if (init == AnchorInit::random) {
        std::vector<size_t> idx(S.n);
        std::iota(idx.begin(), idx.end(), 0);
        for (size_t j = 0; j < k; ++j) {
            size_t pick = j + size_t(rng.below(S.n - j));
            std::swap(idx[j], idx[pick]);
            chosen.push_back(idx[j]);
        }
    } else {
        chosen.push_back(size_t(rng.below(S.n)));
        std::vector<double> dist(S.n);
        while (chosen.size() < k) {
            double total = 0.0;
            for (size_t i = 0; i < S.n; ++i) {
                double best = HUGE_VAL;
                for (size_t c : chosen)
                    best = std::min(best, squared_distance(S.point(i), S.point(c)));
                dist[i] = best;
                total += best;
            }
            size_t pick;
            if (total > 0.0) {
                double r = rng.uniform() * total;
                pick = S.n - 1;
                for (size_t i = 0; i < S.n; ++i) {
                    r -= dist[i];
                    if (r <= 0.0) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = size_t(rng.below(S.n));
            }
            chosen.push_back(pick);
        }
    }
    for (size_t j = 0; j < k; ++j)
        for (size_t c = 0; c < S.d; ++c) A.at(j, c) = S.at(chosen[j], c);
    return A;
}

FitResult fit_anchors_from(const PointSet& S, AnchorSet A, size_t steps, double lr) {
    check_inputs(S, A);
    FitResult out;
    double h_cur = h_diff_value(S, A);
    if (!std::isfinite(h_cur)) throw numeric_error("non-finite loss at step 0");
    out.trace.push_back(h_cur);

    for (size_t step = 1; step <= steps; ++step) {
        HDiffGradient g = grad_h_diff(S, A);
        double gnorm = 0.0;
        for (double v : g.anchors) gnorm += v * v;
        gnorm = std::sqrt(gnorm);
        if (gnorm < kGradStop) break;

        double step_lr = lr;
        bool accepted = false;
        AnchorSet trial = A;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            for (size_t idx = 0; idx < trial.centers.size(); ++idx)
                trial.centers[idx] = A.centers[idx] - step_lr * g.anchors[idx];
            double h_new = h_diff_value(S, trial);
            if (std::isfinite(h_new) && h_new <= h_cur) {
                A = trial;
                h_cur = h_new;
                accepted = true;
                break;
            }
            step_lr *= 0.5;
        }
        if (!accepted) break; // descent exhausted at this point
        out.trace.push_back(h_cur);
        out.steps_run = step;
    }
    out.anchors = std::move(A);
    return out;
}

FitResult fit_anchors(const PointSet& S, const FitOptions& opt) {
    size_t k = opt.k == 0 ? default_k(S.n) : opt.k;
    AnchorSet A = init_anchors(S, k, opt.alpha, opt.scale_mode, opt.init, opt.seed);
    return fit_anchors_from(S, std::move(A), opt.steps, opt.lr);
}

EntropyReport discrete_limit_entropy(const PointSet& S, const AnchorSet& A) {
    check_inputs(S, A);
    std::vector<double> masses(A.k, 0.0);
    for (size_t i = 0; i < S.n; ++i) {
        size_t best = 0;
        double best_d = HUGE_VAL;
        for (size_t j = 0; j < A.k; ++j) {
            double dj = squared_distance(S.point(i), A.center(j));
            if (dj < best_d) { // ties resolve to the lowest index
                best_d = dj;
                best = j;
            }
        }
        masses[best] += 1.0;
    }
    for (double& m : masses) m /= double(S.n);
    return {entropy_nats(masses), A.k};
}

ElbowResult select_k_elbow(const PointSet& S, size_t k_min, size_t k_max, FitOptions opt) {
    if (k_min == 0 || k_max < k_min) throw validation_error("bad k range");
    k_max = std::min(k_max, S.n);
    if (k_max < k_min) throw validation_error("k range exceeds the number of points");

    ElbowResult out;
    for (size_t k = k_min; k <= k_max; ++k) {
        opt.k = k;
        FitResult fit = fit_anchors(S, opt);
        out.k_values.push_back(k);
        out.curve.push_back(fit.trace.back());
    }
    if (out.curve.size() < 3) {
        out.no_elbow = true;
        out.k = k_min;
        return out;
    }
    double lo = *std::min_element(out.curve.begin(), out.curve.end());
    double hi = *std::max_element(out.curve.begin(), out.curve.end());
    if (hi - lo < 1e-9) {
        out.no_elbow = true;
        out.k = k_min;
        return out;
    }
    // curvature against the log-k baseline: uniform data follows ~log k, so
    // structure shows up as curvature in excess of the baseline's
    double best_curv = -HUGE_VAL, best_excess = -HUGE_VAL;
    size_t best_k = out.k_values[1];
    for (size_t idx = 1; idx + 1 < out.curve.size(); ++idx) {
        double curv = std::fabs(out.curve[idx - 1] - 2.0 * out.curve[idx] + out.curve[idx + 1]);
        double kk = double(out.k_values[idx]);
        double base = std::fabs(std::log(kk - 1.0) - 2.0 * std::log(kk) + std::log(kk + 1.0));
        best_excess = std::max(best_excess, curv - base);
        if (curv > best_curv) {
            best_curv = curv;
            best_k = out.k_values[idx];
        }
    }
    out.k = best_k;
    out.weak_curvature = best_excess < 0.08;
    return out;
}

RowEntropyResult row_entropy_sum(const std::vector<double>& rows, size_t n_rows,
                                 size_t n_cols, bool with_grad) {
    if (rows.size() != n_rows * n_cols) throw validation_error("matrix block size mismatch");
    RowEntropyResult out;
    if (with_grad) out.grad.assign(rows.size(), 0.0);
    for (size_t i = 0; i < n_rows; ++i) {
        double sum = 0.0;
        for (size_t j = 0; j < n_cols; ++j) {
            double a = rows[i * n_cols + j];
            if (!(a >= 0.0)) throw validation_error("row entries must be nonnegative");
            sum += a;
            out.value -= plogp(a);
            if (with_grad && a > 0.0) out.grad[i * n_cols + j] = -(std::log(a) + 1.0);
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw validation_error("row does not sum to 1 within 1e-9");
    }
    return out;
}

} // namespace rpe
