#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rpe/entropy.hpp"
#include "rpe/errors.hpp"
#include "rpe/geometry.hpp"
#include "rpe/restructure.hpp"

#include "support.hpp"

using namespace rpe;
using testsupport::random_points;

namespace {

// mirrors loss_eval's own estimator fit: defaults steps=200, lr=0.05
double ball_entropy_of(const PointSet& S, const RestructureConfig& cfg) {
    FitOptions fo;
    fo.k = cfg.k ? cfg.k : default_k(S.n);
    fo.alpha = cfg.alpha;
    fo.scale_mode = cfg.scale_mode;
    fo.init = cfg.anchor_init;
    fo.seed = cfg.seed;
    return h_diff_value(S, fit_anchors(S, fo).anchors);
}

} // namespace

TEST_CASE("loss on the identity candidate is pure weighted entropy") {
    PointSet S = random_points(48, 2, 0.0, 1.0, 301);
    RestructureConfig cfg;
    cfg.k = 8;
    LossTerms t = loss_eval(S, S, cfg);
    CHECK(t.chamfer == 0.0);
    CHECK(t.stability == 0.0);
    CHECK(t.total == doctest::Approx(cfg.lambda * t.entropy).epsilon(1e-15));
    CHECK(t.entropy == doctest::Approx(ball_entropy_of(S, cfg)).epsilon(1e-12));
}

TEST_CASE("zero weights reduce the loss to chamfer alone") {
    PointSet S = random_points(32, 2, 0.0, 1.0, 310);
    PointSet S2 = random_points(32, 2, 0.0, 1.0, 311);
    RestructureConfig cfg;
    cfg.lambda = 0.0;
    cfg.mu = 0.0;
    cfg.k = 4;
    LossTerms t = loss_eval(S, S2, cfg);
    CHECK(t.total == doctest::Approx(t.chamfer).epsilon(1e-15));
    CHECK(t.chamfer == doctest::Approx(chamfer(S, S2)).epsilon(1e-13));
}

TEST_CASE("loss terms match independent recomputation by each module") {
    PointSet S = random_points(40, 2, 0.0, 1.0, 320);
    PointSet S2 = S;
    Rng rng(321);
    for (double& c : S2.coords) c += rng.uniform(-0.05, 0.05);
    RestructureConfig cfg;
    cfg.k = 6;
    cfg.seed = 9;
    LossTerms t = loss_eval(S, S2, cfg);
    CHECK(t.chamfer == doctest::Approx(chamfer(S, S2)).epsilon(1e-13));
    CHECK(t.entropy == doctest::Approx(ball_entropy_of(S2, cfg)).epsilon(1e-12));
    double msd = 0.0;
    for (size_t i = 0; i < S.n; ++i) msd += squared_distance(S.point(i), S2.point(i));
    msd /= double(S.n);
    CHECK(t.stability == doctest::Approx(msd).epsilon(1e-13));
    CHECK(t.total ==
          doctest::Approx(t.chamfer + cfg.lambda * t.entropy + cfg.mu * t.stability).epsilon(1e-12));
}

TEST_CASE("with all weights off the identity is already optimal") {
    PointSet S = random_points(24, 2, 0.0, 1.0, 330);
    RestructureConfig cfg;
    cfg.lambda = 0.0;
    cfg.mu = 0.0;
    cfg.steps = 50;
    cfg.k = 4;
    RestructureResult r = restructure(S, cfg);
    CHECK(r.output.coords == S.coords);
    for (double d : r.displacement) CHECK(d == 0.0);
}

TEST_CASE("a huge stability weight pins every point in place") {
    PointSet S = random_points(64, 2, 0.0, 1.0, 340);
    double diam = diameter(S);
    RestructureConfig cfg;
    cfg.lambda = 0.1;
    cfg.mu = 1e6;
    cfg.steps = 120;
    cfg.lr = 0.05;
    cfg.k = 8;
    RestructureResult r = restructure(S, cfg);
    double worst = 0.0;
    for (size_t i = 0; i < S.n; ++i) {
        double dx = r.displacement[i * 2], dy = r.displacement[i * 2 + 1];
        worst = std::max(worst, std::sqrt(dx * dx + dy * dy));
    }
    CHECK(worst < 1e-3 * diam);
}

TEST_CASE("trace starts at the identity and never increases") {
    PointSet S = random_points(128, 2, 0.0, 1.0, 350);
    RestructureConfig cfg;
    cfg.steps = 80;
    cfg.lr = 0.05;
    cfg.k = 8;
    RestructureResult r = restructure(S, cfg);
    REQUIRE(!r.trace.empty());
    const TraceRow& first = r.trace.front();
    CHECK(first.chamfer == 0.0);
    CHECK(first.stability == 0.0);
    CHECK(first.total == doctest::Approx(cfg.lambda * first.entropy).epsilon(1e-15));
    for (size_t i = 1; i < r.trace.size(); ++i)
        CHECK(r.trace[i].total <= r.trace[i - 1].total + 1e-12);
}

TEST_CASE("every trace row satisfies the loss decomposition identity") {
    PointSet S = random_points(96, 2, 0.0, 1.0, 360);
    RestructureConfig cfg;
    cfg.steps = 60;
    cfg.lr = 0.05;
    cfg.k = 8;
    cfg.mu = 0.01;
    RestructureResult r = restructure(S, cfg);
    for (const TraceRow& row : r.trace) {
        double expect = row.chamfer + cfg.lambda * row.entropy + cfg.mu * row.stability;
        CHECK(std::fabs(row.total - expect) <= 1e-9);
    }
    // reported output is exactly input plus displacement
    REQUIRE(r.displacement.size() == S.coords.size());
    for (size_t i = 0; i < S.coords.size(); ++i)
        CHECK(r.output.coords[i] == S.coords[i] + r.displacement[i]);
}

TEST_CASE("restructuring uniform points strictly lowers their entropy") {
    PointSet S = random_points(256, 2, 0.0, 1.0, 370);
    RestructureConfig cfg;
    cfg.steps = 120;
    cfg.lr = 0.05;
    cfg.k = 16;
    RestructureResult r = restructure(S, cfg);
    CHECK(r.trace.back().entropy < 0.99 * r.trace.front().entropy);
    CHECK(r.output.coords != S.coords);
}

TEST_CASE("fewer than two points returns the identity result") {
    PointSet S = random_points(1, 2, 0.0, 1.0, 380);
    RestructureConfig cfg;
    cfg.steps = 10;
    RestructureResult r = restructure(S, cfg);
    CHECK(r.output.coords == S.coords);
    CHECK(r.iterations_run == 0);
    for (double d : r.displacement) CHECK(d == 0.0);
}

TEST_CASE("non-finite coordinates are rejected") {
    PointSet S = random_points(16, 2, 0.0, 1.0, 390);
    S.coords[5] = std::numeric_limits<double>::quiet_NaN();
    RestructureConfig cfg;
    cfg.steps = 5;
    CHECK_THROWS_AS(restructure(S, cfg), validation_error);
}

TEST_CASE("halfspace estimator descends with a clean decomposition") {
    PointSet S = random_points(96, 2, 0.0, 1.0, 400);
    RestructureConfig cfg;
    cfg.estimator = EstimatorKind::halfspace;
    cfg.m = 2;
    cfg.tau = 0.25;
    cfg.steps = 40;
    cfg.lr = 0.05;
    RestructureResult r = restructure(S, cfg);
    REQUIRE(r.trace.size() >= 2);
    for (size_t i = 1; i < r.trace.size(); ++i)
        CHECK(r.trace[i].total <= r.trace[i - 1].total + 1e-12);
    for (const TraceRow& row : r.trace) {
        double expect = row.chamfer + cfg.lambda * row.entropy + cfg.mu * row.stability;
        CHECK(std::fabs(row.total - expect) <= 1e-9);
    }
    CHECK(r.trace.back().total < r.trace.front().total);
}

TEST_CASE("restructure is deterministic per seed") {
    PointSet S = random_points(80, 2, 0.0, 1.0, 410);
    RestructureConfig cfg;
    cfg.steps = 30;
    cfg.lr = 0.05;
    cfg.k = 8;
    cfg.seed = 17;
    RestructureResult a = restructure(S, cfg);
    RestructureResult b = restructure(S, cfg);
    CHECK(a.output.coords == b.output.coords);
    CHECK(a.displacement == b.displacement);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i)
        CHECK(a.trace[i].total == b.trace[i].total);
}
