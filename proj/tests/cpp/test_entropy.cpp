#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rpe/entropy.hpp"
#include "rpe/errors.hpp"
#include "rpe/point_set.hpp"

#include "support.hpp"

using namespace rpe;
using testsupport::central_diff;
using testsupport::gauss_blobs;
using testsupport::random_points;
using testsupport::rel_err;

namespace {

AnchorSet make_anchors(std::vector<double> centers, size_t d, double alpha,
                       ScaleMode mode = ScaleMode::raw) {
    AnchorSet A;
    A.d = d;
    A.k = centers.size() / d;
    A.centers = std::move(centers);
    A.alpha = alpha;
    A.scale_mode = mode;
    return A;
}

PointSet make_points(std::vector<double> coords, size_t d) {
    PointSet S;
    S.d = d;
    S.n = coords.size() / d;
    S.coords = std::move(coords);
    return S;
}

} // namespace

TEST_CASE("single anchor absorbs all mass and has zero entropy") {
    PointSet S = random_points(9, 2, -3.0, 3.0, 1);
    AnchorSet A = make_anchors({0.4, -0.7}, 2, 10.0);
    SoftAssignment sa = compute_soft_assignments(S, A);
    for (double v : sa.p) CHECK(v == 1.0);
    CHECK(sa.masses[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h_diff_value(S, A) == 0.0);
}

TEST_CASE("midpoint between two anchors splits evenly") {
    PointSet S = make_points({0.5, 0.0}, 2);
    AnchorSet A = make_anchors({0.0, 0.0, 1.0, 0.0}, 2, 7.0);
    SoftAssignment sa = compute_soft_assignments(S, A);
    CHECK(sa.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sa.at(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h_diff_value(S, A) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("two-point two-anchor assignment matches the closed form") {
    PointSet S = make_points({0.0, 0.0, 1.0, 0.0}, 2);
    AnchorSet A = make_anchors({0.0, 0.0, 2.0, 0.0}, 2, 1.0);
    SoftAssignment sa = compute_soft_assignments(S, A);

    double p11 = 1.0 / (1.0 + std::exp(-4.0)); // exp(-0) vs exp(-4)
    CHECK(sa.at(0, 0) == doctest::Approx(p11).epsilon(1e-14));
    CHECK(sa.at(1, 0) == doctest::Approx(0.5).epsilon(1e-14));

    double p1 = 0.5 * (p11 + 0.5);
    CHECK(sa.masses[0] == doctest::Approx(p1).epsilon(1e-14));

    double expected = -(p1 * std::log(p1) + (1.0 - p1) * std::log(1.0 - p1));
    CHECK(h_diff_value(S, A) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(std::fabs(expected - 0.5720) < 1e-3);
}

TEST_CASE("assignment rows are stochastic and masses sum to one") {
    PointSet S = random_points(40, 3, -2.0, 2.0, 5);
    AnchorSet A = make_anchors(random_points(4 * 3, 1, -2.0, 2.0, 6).coords, 3, 25.0);
    SoftAssignment sa = compute_soft_assignments(S, A);
    for (size_t i = 0; i < sa.n; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < sa.k; ++j) {
            CHECK(sa.at(i, j) >= 0.0);
            row += sa.at(i, j);
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
    double total = 0.0;
    for (double m : sa.masses) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy stays within [0, log k]") {
    for (uint64_t seed = 0; seed < 8; ++seed) {
        PointSet S = random_points(30, 2, 0.0, 1.0, seed);
        size_t k = 2 + seed % 5;
        AnchorSet A = init_anchors(S, k, 5.0 + double(seed), ScaleMode::raw,
                                   AnchorInit::kmeanspp, seed);
        EntropyReport r = h_diff(S, A);
        CHECK(r.k == k);
        CHECK(r.value >= 0.0);
        CHECK(r.value <= std::log(double(k)) + 1e-12);
    }
}

TEST_CASE("gradients match central differences in both scale modes") {
    size_t cfg = 0;
    for (ScaleMode mode : {ScaleMode::raw, ScaleMode::normalized}) {
        for (double alpha : {1.0, 10.0, 100.0}) {
            if (mode == ScaleMode::normalized && alpha > 10.0) continue;
            for (size_t d : {size_t(1), size_t(2), size_t(3)}) {
                ++cfg;
                // data at scale 1/sqrt(alpha) keeps the softmax soft, so no
                // coordinate gradient degenerates below what the step resolves
                double L = 1.0 / std::sqrt(alpha);
                for (uint64_t attempt = 0;; ++attempt) {
                    uint64_t salt = cfg * 131 + attempt;
                    PointSet S = random_points(8, d, 0.0, L, salt);
                    AnchorSet A =
                        init_anchors(S, 3, alpha, mode, AnchorInit::kmeanspp, salt + 7000);
                    Rng jit(salt + 9000);
                    for (auto& c : A.centers) c += jit.uniform(-0.1 * L, 0.1 * L);
                    auto f = [&] { return h_diff_value(S, A); };

                    size_t nc = S.coords.size(), na = A.centers.size();
                    std::vector<double> fd(nc + na);
                    bool usable = true;
                    for (size_t i = 0; i < nc + na && usable; ++i) {
                        double* slot = i < nc ? &S.coords[i] : &A.centers[i - nc];
                        usable = testsupport::stencil_converged(f, slot, &fd[i]);
                    }
                    if (!usable) continue;

                    HDiffGradient g = grad_h_diff(S, A);
                    double worst = 0.0;
                    for (size_t i = 0; i < nc + na; ++i) {
                        double a = i < nc ? g.points[i] : g.anchors[i - nc];
                        worst = std::max(worst, rel_err(a, fd[i]));
                    }
                    CAPTURE(cfg);
                    CHECK(worst < 1e-5);
                    break;
                }
            }
        }
    }
}

TEST_CASE("single-anchor gradient vanishes") {
    PointSet S = random_points(12, 2, -1.0, 1.0, 3);
    AnchorSet A = make_anchors({0.1, 0.2}, 2, 10.0);
    HDiffGradient g = grad_h_diff(S, A);
    for (double v : g.points) CHECK(v == 0.0);
    for (double v : g.anchors) CHECK(v == 0.0);
}

TEST_CASE("joint translation leaves the entropy unchanged") {
    PointSet S = random_points(25, 2, 0.0, 1.0, 9);
    AnchorSet A = init_anchors(S, 4, 15.0, ScaleMode::raw, AnchorInit::kmeanspp, 10);
    double before = h_diff_value(S, A);
    std::vector<double> t = {13.25, -7.5};
    for (size_t i = 0; i < S.n; ++i)
        for (size_t c = 0; c < 2; ++c) S.at(i, c) += t[c];
    for (size_t j = 0; j < A.k; ++j)
        for (size_t c = 0; c < 2; ++c) A.at(j, c) += t[c];
    CHECK(std::fabs(h_diff_value(S, A) - before) < 1e-8);
}

TEST_CASE("point order does not change the entropy beyond summation noise") {
    PointSet S = random_points(31, 2, 0.0, 1.0, 12);
    AnchorSet A = init_anchors(S, 5, 20.0, ScaleMode::raw, AnchorInit::kmeanspp, 13);
    double before = h_diff_value(S, A);
    PointSet P(S.n, S.d);
    for (size_t i = 0; i < S.n; ++i) {
        size_t src = (i * 7 + 3) % S.n; // 7 coprime with 31
        for (size_t c = 0; c < S.d; ++c) P.at(i, c) = S.at(src, c);
    }
    CHECK(rel_err(h_diff_value(P, A), before) < 1e-12);
}

TEST_CASE("rigid rotation leaves the entropy unchanged") {
    PointSet S = random_points(20, 2, -1.0, 1.0, 14);
    AnchorSet A = init_anchors(S, 3, 12.0, ScaleMode::raw, AnchorInit::kmeanspp, 15);
    double before = h_diff_value(S, A);
    double th = 0.83, c = std::cos(th), s = std::sin(th);
    auto rotate = [&](double* x, double* y) {
        double nx = c * *x - s * *y, ny = s * *x + c * *y;
        *x = nx;
        *y = ny;
    };
    for (size_t i = 0; i < S.n; ++i) rotate(&S.at(i, 0), &S.at(i, 1));
    for (size_t j = 0; j < A.k; ++j) rotate(&A.at(j, 0), &A.at(j, 1));
    CHECK(std::fabs(h_diff_value(S, A) - before) < 1e-10);
}

TEST_CASE("normalized mode is invariant to global rescaling") {
    PointSet S = random_points(24, 2, 0.0, 1.0, 21);
    AnchorSet A = init_anchors(S, 4, 8.0, ScaleMode::normalized, AnchorInit::kmeanspp, 22);
    double base = h_diff_value(S, A);
    for (double lam : {0.01, 1.0, 100.0}) {
        PointSet Ss = S;
        AnchorSet As = A;
        for (auto& v : Ss.coords) v *= lam;
        for (auto& v : As.centers) v *= lam;
        CHECK(std::fabs(h_diff_value(Ss, As) - base) < 1e-10);
    }
}

TEST_CASE("normalized mode rejects a degenerate point set") {
    PointSet S(5, 2);
    for (size_t i = 0; i < 5; ++i) {
        S.at(i, 0) = 0.5;
        S.at(i, 1) = -1.0;
    }
    AnchorSet A = make_anchors({0.5, -1.0}, 2, 10.0, ScaleMode::normalized);
    CHECK_THROWS_AS(h_diff_value(S, A), validation_error);
}

TEST_CASE("fixed-point residual vanishes at the weighted centroid") {
    PointSet S = random_points(15, 2, 0.0, 1.0, 31);
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < S.n; ++i) {
        mx += S.at(i, 0);
        my += S.at(i, 1);
    }
    AnchorSet A = make_anchors({mx / 15.0, my / 15.0}, 2, 10.0);
    std::vector<double> r = anchor_fixed_point_residuals(S, A);
    REQUIRE(r.size() == 1);
    CHECK(r[0] < 1e-12);
}

TEST_CASE("fixed-point residual matches a direct recomputation") {
    PointSet S = random_points(18, 2, -1.0, 1.0, 33);
    AnchorSet A = init_anchors(S, 3, 6.0, ScaleMode::raw, AnchorInit::random, 34);
    SoftAssignment sa = compute_soft_assignments(S, A);
    std::vector<double> r = anchor_fixed_point_residuals(S, A);
    for (size_t j = 0; j < 3; ++j) {
        double wx = 0.0, wy = 0.0, wsum = 0.0;
        for (size_t i = 0; i < S.n; ++i) {
            double w = sa.at(i, j) * sa.at(i, j);
            wx += w * S.at(i, 0);
            wy += w * S.at(i, 1);
            wsum += w;
        }
        double dx = A.at(j, 0) - wx / wsum;
        double dy = A.at(j, 1) - wy / wsum;
        CHECK(r[j] == doctest::Approx(std::sqrt(dx * dx + dy * dy)).epsilon(1e-12));
    }
}

TEST_CASE("anchor initialization picks distinct data points deterministically") {
    PointSet S = random_points(30, 2, 0.0, 1.0, 41);
    for (AnchorInit init : {AnchorInit::kmeanspp, AnchorInit::random}) {
        AnchorSet A = init_anchors(S, 6, 10.0, ScaleMode::raw, init, 7);
        AnchorSet B = init_anchors(S, 6, 10.0, ScaleMode::raw, init, 7);
        CHECK(A.centers == B.centers);
        // every anchor is one of the input points, and no two coincide
        for (size_t j = 0; j < A.k; ++j) {
            bool found = false;
            for (size_t i = 0; i < S.n && !found; ++i)
                found = S.at(i, 0) == A.at(j, 0) && S.at(i, 1) == A.at(j, 1);
            CHECK(found);
            for (size_t j2 = j + 1; j2 < A.k; ++j2) {
                bool same = A.at(j, 0) == A.at(j2, 0) && A.at(j, 1) == A.at(j2, 1);
                CHECK(!same);
            }
        }
    }
    CHECK_THROWS_AS(init_anchors(S, 31, 10.0, ScaleMode::raw, AnchorInit::random, 0),
                    validation_error);
}

TEST_CASE("zero-step fit returns the initialization unchanged") {
    PointSet S = random_points(20, 2, 0.0, 1.0, 50);
    FitOptions opt;
    opt.k = 4;
    opt.steps = 0;
    opt.seed = 51;
    FitResult r = fit_anchors(S, opt);
    AnchorSet init = init_anchors(S, 4, opt.alpha, opt.scale_mode, opt.init, 51);
    CHECK(r.anchors.centers == init.centers);
    CHECK(r.steps_run == 0);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0] == h_diff_value(S, init));
}

TEST_CASE("fit settles at the ground-truth three-way split entropy") {
    PointSet S = gauss_blobs({{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}}, 20, 0.05, 60);
    FitOptions opt;
    opt.k = 3;
    opt.alpha = 10.0;
    opt.steps = 300;
    opt.lr = 0.1;
    opt.seed = 61;
    FitResult r = fit_anchors(S, opt);
    // balanced blobs: the label assignment carries exactly log 3 nats
    CHECK(std::fabs(r.trace.back() - std::log(3.0)) < 0.05);
    CHECK(r.trace.back() <= r.trace.front() + 1e-15);
    for (size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-15);
}

TEST_CASE("early convergence implies a tiny gradient") {
    PointSet S = gauss_blobs({{0.0, 0.0}, {50.0, 0.0}}, 10, 0.01, 70);
    FitOptions opt;
    opt.k = 2;
    opt.alpha = 10.0;
    opt.steps = 5000;
    opt.seed = 71;
    FitResult r = fit_anchors(S, opt);
    REQUIRE(r.steps_run < opt.steps);
    HDiffGradient g = grad_h_diff(S, r.anchors);
    double gnorm = 0.0;
    for (double v : g.anchors) gnorm += v * v;
    CHECK(std::sqrt(gnorm) < 1e-8);
}

TEST_CASE("zero-step continuation is a no-op") {
    PointSet S = random_points(16, 2, 0.0, 1.0, 80);
    AnchorSet A = init_anchors(S, 3, 10.0, ScaleMode::raw, AnchorInit::kmeanspp, 81);
    FitResult r = fit_anchors_from(S, A, 0, 0.05);
    CHECK(r.anchors.centers == A.centers);
    CHECK(r.steps_run == 0);
}

TEST_CASE("hard assignment entropy handles the boundary conventions") {
    AnchorSet single = make_anchors({0.0, 0.0}, 2, 10.0);
    PointSet S = random_points(10, 2, -1.0, 1.0, 90);
    CHECK(discrete_limit_entropy(S, single).value == 0.0);

    // two points per side, anchors on each side: exact two-way split
    PointSet T = make_points({-1.0, 0.0, -1.1, 0.0, 1.0, 0.0, 1.1, 0.0}, 2);
    AnchorSet two = make_anchors({-1.0, 0.0, 1.0, 0.0}, 2, 10.0);
    CHECK(discrete_limit_entropy(T, two).value ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));

    // equidistant point counts toward the lower anchor index
    PointSet mid = make_points({0.0, 0.0}, 2);
    EntropyReport tie = discrete_limit_entropy(mid, two);
    CHECK(tie.value == 0.0);

    // empty clusters contribute nothing
    AnchorSet three = make_anchors({-1.0, 0.0, 1.0, 0.0, 50.0, 0.0}, 2, 10.0);
    CHECK(discrete_limit_entropy(T, three).value ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("soft entropy approaches the hard limit as alpha grows") {
    PointSet S = gauss_blobs({{0.0, 0.0}, {6.0, 0.0}, {0.0, 6.0}}, 15, 0.05, 100);
    AnchorSet A = make_anchors({0.0, 0.0, 6.0, 0.0, 0.0, 6.0}, 2, 1.0);
    double hard = discrete_limit_entropy(S, A).value;
    double prev_gap = -1.0;
    for (double alpha : {10.0, 100.0, 1000.0, 10000.0}) {
        A.alpha = alpha;
        double gap = std::fabs(h_diff_value(S, A) - hard);
        if (prev_gap >= 0.0) CHECK(gap <= prev_gap + 1e-15);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("elbow selection on a single candidate k flags the lack of an elbow") {
    PointSet S = random_points(32, 2, 0.0, 1.0, 110);
    FitOptions opt;
    opt.steps = 50;
    ElbowResult r = select_k_elbow(S, 4, 4, opt);
    CHECK(r.k == 4);
    CHECK(r.no_elbow);
}

TEST_CASE("elbow selection recovers the blob count") {
    PointSet S = gauss_blobs({{0.0, 0.0}, {8.0, 0.0}, {0.0, 8.0}}, 20, 0.05, 120);
    FitOptions opt;
    opt.alpha = 10.0;
    opt.scale_mode = ScaleMode::normalized;
    opt.steps = 150;
    opt.lr = 0.1;
    opt.seed = 121;
    ElbowResult r = select_k_elbow(S, 1, 8, opt);
    CHECK(r.k == 3);
    CHECK_FALSE(r.no_elbow);
}

TEST_CASE("elbow selection flags structureless data") {
    PointSet S = random_points(64, 2, 0.0, 1.0, 130);
    FitOptions opt;
    opt.alpha = 10.0;
    opt.scale_mode = ScaleMode::normalized;
    opt.steps = 100;
    opt.seed = 131;
    ElbowResult r = select_k_elbow(S, 1, 8, opt);
    CHECK((r.no_elbow || r.weak_curvature));
}

TEST_CASE("row entropy sums the per-row Shannon entropies") {
    std::vector<double> uniform(8, 0.25);
    CHECK(row_entropy_sum(uniform, 2, 4).value ==
          doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-14));

    std::vector<double> onehot = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
    CHECK(row_entropy_sum(onehot, 2, 3).value == 0.0);

    std::vector<double> skew = {0.5, 0.25, 0.25};
    CHECK(row_entropy_sum(skew, 1, 3).value ==
          doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-14));
    CHECK(row_entropy_sum(skew, 1, 3).value == doctest::Approx(1.03972).epsilon(1e-5));
}

TEST_CASE("row entropy gradient is -(log a + 1) and zero on zeros") {
    std::vector<double> rows = {0.5, 0.3, 0.2, 0.0, 0.9, 0.1};
    RowEntropyResult r = row_entropy_sum(rows, 2, 3, true);
    REQUIRE(r.grad.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] == 0.0)
            CHECK(r.grad[i] == 0.0);
        else
            CHECK(r.grad[i] == doctest::Approx(-(std::log(rows[i]) + 1.0)).epsilon(1e-14));
    }
}

TEST_CASE("default anchor count follows n/4 capped at 16") {
    CHECK(default_k(1) == 1);
    CHECK(default_k(8) == 2);
    CHECK(default_k(64) == 16);
    CHECK(default_k(1000) == 16);
}
