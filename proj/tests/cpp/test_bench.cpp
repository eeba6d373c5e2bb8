#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "rpe/bench.hpp"
#include "rpe/errors.hpp"
#include "rpe/geometry.hpp"
#include "rpe/io.hpp"
#include "rpe/stats.hpp"

using namespace rpe;

TEST_CASE("dataset generation is byte-reproducible") {
    DatasetSpec spec;
    spec.kind = DatasetKind::blobs2d;
    spec.n = 200;
    spec.seed = 12;
    Dataset a = gen_dataset(spec);
    Dataset b = gen_dataset(spec);
    CHECK(points_to_csv(a.points, &a.labels) == points_to_csv(b.points, &b.labels));
}

TEST_CASE("uniform squares stay inside the unit box") {
    DatasetSpec spec;
    spec.kind = DatasetKind::uniform2d;
    spec.n = 500;
    spec.seed = 3;
    Dataset ds = gen_dataset(spec);
    CHECK(ds.points.d == 2);
    CHECK(ds.labels.empty());
    for (double c : ds.points.coords) {
        CHECK(c >= 0.0);
        CHECK(c < 1.0);
    }
}

TEST_CASE("noiseless parabola is exact") {
    DatasetSpec spec;
    spec.kind = DatasetKind::parabolic2d;
    spec.n = 100;
    spec.sigma = 0.0;
    spec.seed = 8;
    Dataset ds = gen_dataset(spec);
    for (size_t i = 0; i < ds.points.n; ++i) {
        double x = ds.points.at(i, 0);
        CHECK(ds.points.at(i, 1) == x * x);
    }
}

TEST_CASE("blob datasets carry a full set of ground-truth labels") {
    DatasetSpec spec;
    spec.kind = DatasetKind::blobs2d;
    spec.n = 64;
    spec.blobs = 5;
    spec.seed = 4;
    Dataset ds = gen_dataset(spec);
    REQUIRE(ds.labels.size() == 64);
    std::set<uint32_t> seen(ds.labels.begin(), ds.labels.end());
    CHECK(seen.size() == 5);
    CHECK(*std::max_element(ds.labels.begin(), ds.labels.end()) == 4);
}

TEST_CASE("pareto surface points live in three dimensions") {
    DatasetSpec spec;
    spec.kind = DatasetKind::pareto3d;
    spec.n = 128;
    spec.seed = 6;
    Dataset ds = gen_dataset(spec);
    CHECK(ds.points.d == 3);
    CHECK(ds.points.n == 128);
}

TEST_CASE("invalid dataset specs are rejected") {
    DatasetSpec spec;
    spec.n = 0;
    CHECK_THROWS_AS(gen_dataset(spec), validation_error);
    spec.n = 10;
    spec.kind = DatasetKind::blobs2d;
    spec.blobs = 0;
    CHECK_THROWS_AS(gen_dataset(spec), validation_error);
}

TEST_CASE("a method benchmarked against itself reports speedup one") {
    DatasetSpec spec;
    spec.kind = DatasetKind::uniform2d;
    spec.n = 512;
    BenchOptions opt;
    opt.trials = 3;
    opt.seed = 5;
    auto recs = run_speedup_bench({spec}, {BenchMethod::raw}, opt);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].speedup == 1.0);
    CHECK(recs[0].hull_error_pct == 0.0);
    CHECK(recs[0].op_counts.size() == 3);
}

TEST_CASE("raw versus raw differences are statistically silent") {
    DatasetSpec spec;
    spec.kind = DatasetKind::uniform2d;
    spec.n = 256;
    BenchOptions opt;
    opt.trials = 4;
    opt.seed = 9;
    auto recs = run_speedup_bench({spec}, {BenchMethod::raw, BenchMethod::raw}, opt);
    REQUIRE(recs.size() == 2);
    TTestResult t = paired_ttest(recs[0].op_counts, recs[1].op_counts);
    CHECK(t.t == 0.0);
    CHECK(t.p == 1.0);
    CHECK(t.degenerate);
}

TEST_CASE("fewer than two trials is an error") {
    DatasetSpec spec;
    BenchOptions opt;
    opt.trials = 1;
    CHECK_THROWS_AS(run_speedup_bench({spec}, {BenchMethod::raw}, opt), validation_error);
}

TEST_CASE("sorting by x never changes the hull") {
    DatasetSpec spec;
    spec.kind = DatasetKind::blobs2d;
    spec.n = 400;
    BenchOptions opt;
    opt.trials = 3;
    opt.seed = 21;
    auto recs = run_speedup_bench({spec}, {BenchMethod::raw, BenchMethod::heuristic_sort,
                                           BenchMethod::random_permutation},
                                  opt);
    REQUIRE(recs.size() == 3);
    CHECK(recs[1].method == "heuristic_sort");
    CHECK(recs[1].hull_error_pct == 0.0);
    CHECK(recs[2].method == "random_permutation");
    CHECK(recs[2].hull_error_pct == 0.0);
}

TEST_CASE("emitted CSV headers are pinned") {
    DatasetSpec spec;
    spec.kind = DatasetKind::uniform2d;
    spec.n = 64;
    BenchOptions opt;
    opt.trials = 2;
    auto recs = run_speedup_bench({spec}, {BenchMethod::raw}, opt);
    std::string bench_csv = bench_records_to_csv(recs);
    CHECK(bench_csv.rfind("dataset,method,n,seed,op_count_mean,op_count_std,runtime_ns_mean,"
                          "runtime_ns_std,speedup,hull_error_pct,hausdorff,entropy_before,"
                          "entropy_after,preprocess_ns\n",
                          0) == 0);

    CorrelationOptions co;
    co.instances = 10;
    CorrelationResult cr = run_correlation(co);
    CHECK(correlation_to_csv(cr).rfind("instance,blobs,h_diff,oracle_entropy\n", 0) == 0);

    AblationOptions ao;
    ao.alphas = {10.0};
    ao.trials = 2;
    ao.base.n = 128;
    ao.restructure.steps = 20;
    std::string abl_csv = ablation_to_csv(run_ablation(ao));
    CHECK(abl_csv.rfind("factor,value,speedup_mean,speedup_ci_lo,speedup_ci_hi,"
                        "hull_error_pct_mean,entropy_ratio_mean\n",
                        0) == 0);
}

TEST_CASE("benchmark runs are byte-reproducible with timing off") {
    DatasetSpec spec;
    spec.kind = DatasetKind::blobs2d;
    spec.n = 256;
    BenchOptions opt;
    opt.trials = 2;
    opt.seed = 33;
    opt.restructure.steps = 25;
    auto methods = {BenchMethod::raw, BenchMethod::restructure_adaptive};
    std::string a = bench_records_to_csv(run_speedup_bench({spec}, methods, opt));
    std::string b = bench_records_to_csv(run_speedup_bench({spec}, methods, opt));
    CHECK(a == b);
}

TEST_CASE("paired t-test conventions and tabulated critical values") {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    TTestResult same = paired_ttest(a, a);
    CHECK(same.t == 0.0);
    CHECK(same.p == 1.0);
    CHECK(same.degenerate);
    CHECK(same.df == 3);

    std::vector<double> b{0.0, 1.0, 2.0, 3.0};
    TTestResult shifted = paired_ttest(a, b);
    CHECK(shifted.degenerate);
    CHECK(shifted.p == 0.0);

    CHECK_THROWS_AS(paired_ttest({1.0}, {2.0}), validation_error);
    CHECK_THROWS_AS(paired_ttest({1.0, 2.0}, {1.0}), validation_error);

    // differences d_i = m +/- c (n even) have mean m, sd c*sqrt(n/(n-1)),
    // so t = m*sqrt(n-1)/c; at n=10 that is 3m/c -- pick c to hit table rows
    auto t_of = [](double m, double c, size_t n) {
        std::vector<double> d(n), zero(n, 0.0);
        for (size_t i = 0; i < n; ++i) d[i] = m + ((i % 2) ? c : -c);
        return paired_ttest(d, zero);
    };
    TTestResult crit = t_of(1.0, 3.0 / 2.262, 10);
    CHECK(crit.df == 9);
    CHECK(crit.t == doctest::Approx(2.262).epsilon(1e-12));
    CHECK(std::fabs(crit.p - 0.05) < 1e-3);

    TTestResult one = t_of(1.0, 3.0 / 3.250, 10);
    CHECK(std::fabs(one.p - 0.01) < 1e-3);

    // df=1 at t=1 is the Cauchy quartile: two-sided p = 0.5
    TTestResult cauchy = t_of(1.0, 1.0, 2);
    CHECK(cauchy.df == 1);
    CHECK(cauchy.t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(cauchy.p - 0.5) < 1e-3);

    CHECK(std::fabs(student_t_two_sided_p(4.303, 2) - 0.05) < 1e-3);
    CHECK(std::fabs(student_t_two_sided_p(2.776, 4) - 0.05) < 1e-3);
}

TEST_CASE("least squares R2 edge cases") {
    R2Result perfect = linear_r2({0.0, 0.0, 1.0, 1.0}, {2.0, 2.0, 5.0, 5.0});
    CHECK(perfect.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(perfect.slope == doctest::Approx(3.0).epsilon(1e-12));

    R2Result flat = linear_r2({0.0, 1.0, 2.0}, {4.0, 4.0, 4.0});
    CHECK(flat.slope == 0.0);
    CHECK(flat.r2 == 0.0);

    R2Result anti = linear_r2({0.0, 1.0, 2.0, 3.0}, {3.0, 2.0, 1.0, 0.0});
    CHECK(anti.slope < 0.0);
    CHECK(anti.r2 == 0.0);
    CHECK(anti.r2_raw == doctest::Approx(1.0).epsilon(1e-12));

    R2Result degenerate_x = linear_r2({1.0, 1.0, 1.0}, {0.0, 1.0, 2.0});
    CHECK(degenerate_x.slope == 0.0);
}

TEST_CASE("fitted entropy tracks the generating-label oracle") {
    CorrelationOptions co;
    co.instances = 20;
    co.max_blobs = 8;
    co.seed = 3;
    CorrelationResult r = run_correlation(co);
    CHECK(r.fit.r2 >= 0.85);
    REQUIRE(r.rows.size() == 20);
    for (const CorrelationRow& row : r.rows) {
        CHECK(row.oracle >= 0.0);
        CHECK(row.oracle <= std::log(12.0) + 1e-12); // per-point nats, n=12
        CHECK(row.h_fitted >= 0.0);
    }

    CorrelationOptions shuffled = co;
    shuffled.shuffled_control = true;
    CHECK(run_correlation(shuffled).fit.r2 < 0.2);
}

TEST_CASE("too few correlation instances are rejected") {
    CorrelationOptions co;
    co.instances = 9;
    CHECK_THROWS_AS(run_correlation(co), validation_error);
}

TEST_CASE("a single ablation cell delegates to the speedup bench") {
    AblationOptions ao;
    ao.alphas = {10.0};
    ao.trials = 2;
    ao.seed = 42;
    ao.base.n = 256;
    ao.restructure.steps = 60;
    auto abl = run_ablation(ao);
    REQUIRE(abl.size() == 1);
    CHECK(abl[0].factor == "alpha");
    CHECK(abl[0].value == "10");

    BenchOptions bo;
    bo.trials = ao.trials;
    bo.seed = ao.seed;
    bo.restructure = ao.restructure;
    bo.partition_k = ao.partition_k;
    auto recs = run_speedup_bench({ao.base},
                                  {BenchMethod::raw, BenchMethod::restructure_adaptive}, bo);
    REQUIRE(recs.size() == 2);
    REQUIRE(abl[0].speedups.size() == 2);
    for (size_t t = 0; t < 2; ++t)
        CHECK(abl[0].speedups[t] == recs[0].op_counts[t] / recs[1].op_counts[t]);
    CHECK(abl[0].speedup_mean == mean_of(abl[0].speedups));
    CHECK(abl[0].speedup_ci_lo <= abl[0].speedup_mean);
    CHECK(abl[0].speedup_ci_hi >= abl[0].speedup_mean);
}

TEST_CASE("empty ablation grids are rejected") {
    AblationOptions ao;
    CHECK_THROWS_AS(run_ablation(ao), validation_error);
    ao.alphas = {10.0};
    ao.trials = 1;
    CHECK_THROWS_AS(run_ablation(ao), validation_error);
}

TEST_CASE("cluster partitions cover every point exactly once") {
    DatasetSpec spec;
    spec.kind = DatasetKind::blobs2d;
    spec.n = 300;
    spec.seed = 14;
    Dataset ds = gen_dataset(spec);
    HardPartition P = cluster_partition(ds.points, 8, 1);
    CHECK(P.n == 300);
    REQUIRE(P.labels.size() == 300);
    CHECK(P.part_sizes.size() <= 8);
    std::vector<size_t> histogram(P.part_sizes.size(), 0);
    for (uint32_t l : P.labels) {
        REQUIRE(l < P.part_sizes.size());
        histogram[l]++;
    }
    CHECK(histogram == P.part_sizes);
}
