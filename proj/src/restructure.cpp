#include "rpe/restructure.hpp"

#include <cmath>
#include <numbers>

#include "rpe/errors.hpp"
#include "rpe/geometry.hpp"

namespace rpe {

namespace {

constexpr size_t kInitFitSteps = 200;
constexpr size_t kRefitSteps = 50;
constexpr double kEstimatorLr = 0.05;
constexpr int kMaxHalvings = 20;

struct EstimatorState {
    AnchorSet anchors;
    HalfspaceSet planes;
    CellGating gating;
};

FitOptions anchor_options(const PointSet& S, const RestructureConfig& cfg) {
    FitOptions fo;
    fo.k = cfg.k ? cfg.k : default_k(S.n);
    fo.alpha = cfg.alpha;
    fo.scale_mode = cfg.scale_mode;
    fo.init = cfg.anchor_init;
    fo.steps = kInitFitSteps;
    fo.lr = kEstimatorLr;
    fo.seed = cfg.seed;
    return fo;
}

HalfspaceFitOptions plane_options(const RestructureConfig& cfg, size_t steps) {
    HalfspaceFitOptions ho;
    ho.m = cfg.m;
    ho.tau = cfg.tau;
    ho.strategy = HalfspaceInit::maxmargin;
    ho.steps = steps;
    ho.lr = kEstimatorLr;
    ho.seed = cfg.seed;
    return ho;
}

EstimatorState fit_estimator(const PointSet& S, const RestructureConfig& cfg) {
    EstimatorState st;
    if (cfg.estimator == EstimatorKind::ball) {
        st.anchors = fit_anchors(S, anchor_options(S, cfg)).anchors;
    } else {
        HalfspaceFitResult fr = fit_halfspaces(S, plane_options(cfg, 0));
        st.planes = fr.halfspaces;
        st.gating = fr.gating;
    }
    return st;
}

double estimator_entropy(const PointSet& S2, const RestructureConfig& cfg, EstimatorState& st) {
    if (cfg.estimator == EstimatorKind::ball) return h_diff_value(S2, st.anchors);
    st.gating = enumerate_cells(S2, st.planes);
    return h_soft(S2, st.planes, st.gating);
}

double estimator_entropy_grad(const PointSet& S2, const RestructureConfig& cfg,
                              EstimatorState& st, std::vector<double>& grad_points) {
    if (cfg.estimator == EstimatorKind::ball) {
        HDiffGradient g = grad_h_diff(S2, st.anchors);
        grad_points = std::move(g.points);
        return h_diff_value(S2, st.anchors);
    }
    st.gating = enumerate_cells(S2, st.planes);
    HSoftGradient g;
    double h = h_soft_with_grad(S2, st.planes, st.gating, g);
    grad_points = std::move(g.points);
    return h;
}

LossTerms combine(const PointSet& S, const PointSet& S2, const RestructureConfig& cfg,
                  EstimatorState& st) {
    LossTerms t;
    t.chamfer = chamfer(S, S2);
    t.entropy = estimator_entropy(S2, cfg, st);
    double sq = 0.0;
    for (size_t i = 0; i < S.coords.size(); ++i) {
        double di = S2.coords[i] - S.coords[i];
        sq += di * di;
    }
    t.stability = sq / double(S.n);
    t.total = t.chamfer + cfg.lambda * t.entropy + cfg.mu * t.stability;
    return t;
}

void check_config(const RestructureConfig& cfg) {
    if (!(cfg.lambda >= 0.0)) throw validation_error("lambda must be >= 0");
    if (!(cfg.mu >= 0.0)) throw validation_error("mu must be >= 0");
    if (!(cfg.lr > 0.0)) throw validation_error("lr must be positive");
    if (cfg.refit_every == 0) throw validation_error("refit_every must be positive");
}

} // namespace

EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "ball") return EstimatorKind::ball;
    if (s == "halfspace") return EstimatorKind::halfspace;
    throw validation_error("unknown estimator: " + s);
}

std::string to_string(EstimatorKind e) {
    return e == EstimatorKind::ball ? "ball" : "halfspace";
}

LossTerms loss_eval(const PointSet& S, const PointSet& S2, const RestructureConfig& cfg) {
    validate(S);
    validate(S2);
    if (S.n != S2.n || S.d != S2.d)
        throw validation_error("loss_eval needs matching shapes");
    check_config(cfg);
    EstimatorState st = fit_estimator(S2, cfg);
    return combine(S, S2, cfg, st);
}

RestructureResult restructure(const PointSet& S, const RestructureConfig& cfg) {
    validate(S);
    check_config(cfg);

    RestructureResult res;
    res.output = S;
    res.displacement.assign(S.n * S.d, 0.0);

    EstimatorState st = fit_estimator(S, cfg);
    LossTerms cur = combine(S, res.output, cfg, st);
    res.trace.push_back({0, cur.chamfer, cur.entropy, cur.stability, cur.total, cfg.lr});
    if (!std::isfinite(cur.total)) throw numeric_error("non-finite loss at step 0");
    if (S.n < 2) return res;

    std::vector<double> grad(S.n * S.d), egrad, cgrad;
    std::vector<double> delta_try(S.n * S.d);
    PointSet trial = S;
    size_t failed_streak = 0;

    for (size_t step = 1; step <= cfg.steps; ++step) {
        double lr_t = 0.5 * cfg.lr *
                      (1.0 + std::cos(std::numbers::pi * double(step - 1) / double(cfg.steps)));

        if (step % cfg.refit_every == 0) {
            if (cfg.estimator == EstimatorKind::ball) {
                st.anchors = fit_anchors_from(res.output, st.anchors, kRefitSteps, kEstimatorLr).anchors;
            } else {
                HalfspaceFitResult cand = fit_halfspaces(res.output, plane_options(cfg, 25));
                EstimatorState cand_st{AnchorSet{}, cand.halfspaces, cand.gating};
                if (estimator_entropy(res.output, cfg, cand_st) <=
                    estimator_entropy(res.output, cfg, st))
                    st = cand_st;
            }
            cur = combine(S, res.output, cfg, st); // refits never raise the entropy term
        }

        double ch = chamfer_with_grad(S, res.output, cgrad);
        (void)ch;
        estimator_entropy_grad(res.output, cfg, st, egrad);
        double gnorm = 0.0;
        for (size_t i = 0; i < grad.size(); ++i) {
            grad[i] = cgrad[i] + cfg.lambda * egrad[i] +
                      cfg.mu * 2.0 / double(S.n) * res.displacement[i];
            gnorm += grad[i] * grad[i];
        }
        if (gnorm == 0.0) {
            res.iterations_run = step;
            res.trace.push_back({step, cur.chamfer, cur.entropy, cur.stability, cur.total, lr_t});
            break;
        }

        double eta = lr_t;
        bool accepted = false;
        LossTerms best{};
        for (int h = 0; h <= kMaxHalvings; ++h) {
            for (size_t i = 0; i < grad.size(); ++i) {
                delta_try[i] = res.displacement[i] - eta * grad[i];
                trial.coords[i] = S.coords[i] + delta_try[i];
            }
            LossTerms t = combine(S, trial, cfg, st);
            if (!std::isfinite(t.total))
                throw numeric_error("non-finite loss at step " + std::to_string(step));
            if (t.total <= cur.total) {
                accepted = true;
                best = t;
                break;
            }
            eta *= 0.5;
        }
        if (accepted) {
            res.displacement = delta_try;
            res.output.coords = trial.coords;
            cur = best;
            failed_streak = 0;
        } else {
            ++failed_streak;
        }
        res.trace.push_back({step, cur.chamfer, cur.entropy, cur.stability, cur.total,
                             accepted ? eta : lr_t});
        res.iterations_run = step;
        if (failed_streak > cfg.refit_every) break; // a refit came and went with no progress
    }
    return res;
}

} // namespace rpe
