#include "rpe/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rpe/errors.hpp"
#include "rpe/geometry.hpp"
#include "rpe/io.hpp"
#include "rpe/oracle.hpp"
#include "rpe/rng.hpp"

namespace rpe {

namespace {

using Clock = std::chrono::steady_clock;

uint64_t ns_since(Clock::time_point t0) {
    return uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

double default_sigma(DatasetKind k) {
    switch (k) {
        case DatasetKind::parabolic2d: return 0.01;
        case DatasetKind::blobs2d:
        case DatasetKind::blobs3d: return 0.02;
        case DatasetKind::pareto3d: return 0.05;
        default: return 0.0;
    }
}

// blob centers in [0.1, 0.9]^d, resampled a few times to keep them apart
// Centers sit on a shuffled, lightly jittered lattice so the smallest
// inter-blob gap stays close to the lattice spacing for every blob count.
std::vector<double> blob_centers(Rng& rng, size_t k, size_t d) {
    size_t side = 1;
    while (side * side < k) ++side; // side^d >= side^2 >= k for d >= 2
    double spacing = 0.8 / double(side);
    size_t total = 1;
    for (size_t t = 0; t < d; ++t) total *= side;
    std::vector<size_t> order(total);
    for (size_t i = 0; i < total; ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<double> centers;
    for (size_t b = 0; b < k; ++b) {
        size_t cell = order[b];
        for (size_t t = 0; t < d; ++t) {
            size_t coord = cell % side;
            cell /= side;
            double base = 0.1 + (double(coord) + 0.5) * spacing;
            centers.push_back(base + rng.uniform(-0.05, 0.05) * spacing);
        }
    }
    return centers;
}

Dataset gen_blobs(const DatasetSpec& spec, size_t d, Rng& rng, double sigma) {
    if (spec.blobs == 0) throw validation_error("blob count must be positive");
    Dataset ds;
    ds.points.n = spec.n;
    ds.points.d = d;
    ds.points.coords.resize(spec.n * d);
    ds.labels.resize(spec.n);
    std::vector<double> centers = blob_centers(rng, spec.blobs, d);
    for (size_t i = 0; i < spec.n; ++i) {
        size_t b = i % spec.blobs;
        ds.labels[i] = uint32_t(b);
        for (size_t t = 0; t < d; ++t)
            ds.points.coords[i * d + t] = centers[b * d + t] + sigma * rng.normal();
    }
    return ds;
}

double fitted_entropy(const PointSet& S, uint64_t seed) {
    FitOptions fo;
    fo.seed = seed;
    return fit_anchors(S, fo).trace.back();
}

struct MethodRun {
    double ops = 0;
    double runtime_ns = 0;
    double hull_error = 0;
    double hausdorff_d = 0;
    double entropy_after = 0;
    double preprocess_ns = 0;
};

PointSet reorder(const PointSet& S, const std::vector<size_t>& idx) {
    PointSet out;
    out.n = S.n;
    out.d = S.d;
    out.coords.resize(S.coords.size());
    for (size_t i = 0; i < S.n; ++i)
        for (size_t c = 0; c < S.d; ++c) out.coords[i * S.d + c] = S.at(idx[i], c);
    return out;
}

HullResult timed_hull(const PointSet& S, const HardPartition* P, bool timing) {
    if (timing)
        for (int w = 0; w < 3; ++w) (void)(P ? partition_merge_hull(S, *P) : monotone_chain_hull(S));
    return P ? partition_merge_hull(S, *P) : monotone_chain_hull(S);
}

std::string ci_csv(const AblationRecord& r) {
    return r.factor + ',' + r.value + ',' + format_g17(r.speedup_mean) + ',' +
           format_g17(r.speedup_ci_lo) + ',' + format_g17(r.speedup_ci_hi) + ',' +
           format_g17(r.hull_error_pct_mean) + ',' + format_g17(r.entropy_ratio_mean) + '\n';
}

} // namespace

DatasetKind dataset_kind_from_string(const std::string& s) {
    if (s == "uniform2d") return DatasetKind::uniform2d;
    if (s == "parabolic2d") return DatasetKind::parabolic2d;
    if (s == "blobs2d") return DatasetKind::blobs2d;
    if (s == "blobs3d") return DatasetKind::blobs3d;
    if (s == "pareto3d") return DatasetKind::pareto3d;
    throw validation_error("unknown dataset kind: " + s);
}

std::string to_string(DatasetKind k) {
    switch (k) {
        case DatasetKind::uniform2d: return "uniform2d";
        case DatasetKind::parabolic2d: return "parabolic2d";
        case DatasetKind::blobs2d: return "blobs2d";
        case DatasetKind::blobs3d: return "blobs3d";
        case DatasetKind::pareto3d: return "pareto3d";
    }
    return "?";
}

BenchMethod bench_method_from_string(const std::string& s) {
    if (s == "raw") return BenchMethod::raw;
    if (s == "random_permutation") return BenchMethod::random_permutation;
    if (s == "heuristic_sort") return BenchMethod::heuristic_sort;
    if (s == "restructure+adaptive" || s == "restructure_adaptive")
        return BenchMethod::restructure_adaptive;
    throw validation_error("unknown bench method: " + s);
}

std::string to_string(BenchMethod m) {
    switch (m) {
        case BenchMethod::raw: return "raw";
        case BenchMethod::random_permutation: return "random_permutation";
        case BenchMethod::heuristic_sort: return "heuristic_sort";
        case BenchMethod::restructure_adaptive: return "restructure+adaptive";
    }
    return "?";
}

OracleMode oracle_mode_from_string(const std::string& s) {
    if (s == "generating") return OracleMode::generating;
    if (s == "arrangement" || s == "arrangement_m") return OracleMode::arrangement;
    throw validation_error("unknown oracle mode: " + s);
}

Dataset gen_dataset(const DatasetSpec& spec) {
    if (spec.n == 0) throw validation_error("dataset needs n >= 1");
    double sigma = spec.sigma < 0 ? default_sigma(spec.kind) : spec.sigma;
    Rng rng(derive_stream(spec.seed, uint64_t(spec.kind) + 1));

    Dataset ds;
    switch (spec.kind) {
        case DatasetKind::uniform2d: {
            ds.points.n = spec.n;
            ds.points.d = 2;
            ds.points.coords.resize(spec.n * 2);
            for (double& c : ds.points.coords) c = rng.uniform();
            break;
        }
        case DatasetKind::parabolic2d: {
            ds.points.n = spec.n;
            ds.points.d = 2;
            ds.points.coords.resize(spec.n * 2);
            for (size_t i = 0; i < spec.n; ++i) {
                double x = rng.uniform();
                ds.points.coords[i * 2] = x;
                ds.points.coords[i * 2 + 1] = x * x + sigma * rng.normal();
            }
            break;
        }
        case DatasetKind::blobs2d: return gen_blobs(spec, 2, rng, sigma);
        case DatasetKind::blobs3d: return gen_blobs(spec, 3, rng, sigma);
        case DatasetKind::pareto3d: {
            ds.points.n = spec.n;
            ds.points.d = 3;
            ds.points.coords.resize(spec.n * 3);
            double a = rng.uniform(0.5, 1.5), b = rng.uniform(0.5, 1.5);
            for (size_t i = 0; i < spec.n; ++i) {
                double x = rng.uniform(), y = rng.uniform();
                double noise = -sigma * std::log(1.0 - rng.uniform());
                ds.points.coords[i * 3] = x;
                ds.points.coords[i * 3 + 1] = y;
                ds.points.coords[i * 3 + 2] = 1.0 - a * x * x - b * y * y - noise;
            }
            break;
        }
    }
    validate(ds.points);
    return ds;
}

HardPartition cluster_partition(const PointSet& S, size_t k, uint64_t seed) {
    validate(S);
    size_t k_eff = std::max<size_t>(1, std::min(k, S.n));
    AnchorSet A = init_anchors(S, k_eff, 10.0, ScaleMode::raw, AnchorInit::kmeanspp, seed);

    std::vector<uint32_t> labels(S.n, 0);
    for (int iter = 0; iter < 10; ++iter) {
        for (size_t i = 0; i < S.n; ++i) {
            double best = squared_distance(S.point(i), A.center(0));
            uint32_t arg = 0;
            for (size_t j = 1; j < k_eff; ++j) {
                double d2 = squared_distance(S.point(i), A.center(j));
                if (d2 < best) {
                    best = d2;
                    arg = uint32_t(j);
                }
            }
            labels[i] = arg;
        }
        std::vector<double> sums(k_eff * S.d, 0.0);
        std::vector<size_t> counts(k_eff, 0);
        for (size_t i = 0; i < S.n; ++i) {
            counts[labels[i]]++;
            for (size_t c = 0; c < S.d; ++c) sums[labels[i] * S.d + c] += S.at(i, c);
        }
        for (size_t j = 0; j < k_eff; ++j)
            if (counts[j])
                for (size_t c = 0; c < S.d; ++c) A.at(j, c) = sums[j * S.d + c] / double(counts[j]);
    }
    return partition_from_labels(labels);
}

std::vector<BenchRecord> run_speedup_bench(const std::vector<DatasetSpec>& datasets,
                                           const std::vector<BenchMethod>& methods,
                                           const BenchOptions& opt) {
    if (opt.trials < 2) throw validation_error("bench needs at least 2 trials");
    if (datasets.empty() || methods.empty())
        throw validation_error("bench needs datasets and methods");

    std::vector<BenchRecord> records;
    for (const DatasetSpec& spec : datasets) {
        std::vector<Dataset> data(opt.trials);
        std::vector<HullResult> raw_hull(opt.trials);
        std::vector<double> e_before(opt.trials);
        std::vector<uint64_t> trial_seed(opt.trials);
        for (size_t t = 0; t < opt.trials; ++t) {
            trial_seed[t] = derive_seed(opt.seed, t);
            DatasetSpec s = spec;
            s.seed = trial_seed[t];
            data[t] = gen_dataset(s);
            if (data[t].points.d != 2)
                throw validation_error("the hull benchmark needs 2-d datasets");
            raw_hull[t] = timed_hull(data[t].points, nullptr, opt.timing);
            e_before[t] = fitted_entropy(data[t].points, derive_seed(trial_seed[t], 1));
        }
        double raw_ops_mean = 0;
        for (size_t t = 0; t < opt.trials; ++t) raw_ops_mean += double(raw_hull[t].op_count);
        raw_ops_mean /= double(opt.trials);

        for (BenchMethod method : methods) {
            std::vector<MethodRun> runs(opt.trials);
            for (size_t t = 0; t < opt.trials; ++t) {
                const PointSet& S = data[t].points;
                MethodRun& r = runs[t];
                switch (method) {
                    case BenchMethod::raw: {
                        r.ops = double(raw_hull[t].op_count);
                        r.runtime_ns = opt.timing ? double(raw_hull[t].elapsed_ns) : 0.0;
                        r.entropy_after = e_before[t];
                        break;
                    }
                    case BenchMethod::random_permutation: {
                        Rng rng(derive_stream(trial_seed[t], 5));
                        std::vector<size_t> idx(S.n);
                        for (size_t i = 0; i < S.n; ++i) idx[i] = i;
                        rng.shuffle(idx);
                        PointSet Sp = reorder(S, idx);
                        HullResult h = timed_hull(Sp, nullptr, opt.timing);
                        r.ops = double(h.op_count);
                        r.runtime_ns = opt.timing ? double(h.elapsed_ns) : 0.0;
                        r.hull_error = hull_error_pct(raw_hull[t], h);
                        r.hausdorff_d = hausdorff(S, Sp);
                        r.entropy_after = e_before[t];
                        break;
                    }
                    case BenchMethod::heuristic_sort: {
                        std::vector<size_t> idx(S.n);
                        for (size_t i = 0; i < S.n; ++i) idx[i] = i;
                        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
                            for (size_t c = 0; c < S.d; ++c) {
                                if (S.at(a, c) != S.at(b, c)) return S.at(a, c) < S.at(b, c);
                            }
                            return a < b;
                        });
                        PointSet Ss = reorder(S, idx);
                        HullResult h = timed_hull(Ss, nullptr, opt.timing);
                        r.ops = double(h.op_count);
                        r.runtime_ns = opt.timing ? double(h.elapsed_ns) : 0.0;
                        r.hull_error = hull_error_pct(raw_hull[t], h);
                        r.hausdorff_d = hausdorff(S, Ss);
                        r.entropy_after = e_before[t];
                        break;
                    }
                    case BenchMethod::restructure_adaptive: {
                        RestructureConfig cfg = opt.restructure;
                        cfg.seed = derive_seed(trial_seed[t], 2);
                        auto t0 = Clock::now();
                        RestructureResult rr = restructure(S, cfg);
                        HardPartition P =
                            cluster_partition(rr.output, opt.partition_k, derive_seed(trial_seed[t], 3));
                        if (opt.timing) r.preprocess_ns = double(ns_since(t0));
                        HullResult h = timed_hull(rr.output, &P, opt.timing);
                        r.ops = double(h.op_count);
                        r.runtime_ns = opt.timing ? double(h.elapsed_ns) : 0.0;
                        r.hull_error = hull_error_pct(raw_hull[t], h);
                        r.hausdorff_d = hausdorff(S, rr.output);
                        r.entropy_after =
                            fitted_entropy(rr.output, derive_seed(trial_seed[t], 4));
                        break;
                    }
                }
            }
            BenchRecord rec;
            rec.dataset = to_string(spec.kind);
            rec.method = to_string(method);
            rec.n = spec.n;
            rec.seed = opt.seed;
            std::vector<double> ops, rts;
            for (const MethodRun& r : runs) {
                ops.push_back(r.ops);
                rts.push_back(r.runtime_ns);
                rec.hull_error_pct += r.hull_error / double(opt.trials);
                rec.hausdorff += r.hausdorff_d / double(opt.trials);
                rec.entropy_after += r.entropy_after / double(opt.trials);
                rec.preprocess_ns += r.preprocess_ns / double(opt.trials);
            }
            for (double e : e_before) rec.entropy_before += e / double(opt.trials);
            rec.op_count_mean = mean_of(ops);
            rec.op_count_std = sample_std(ops);
            rec.runtime_ns_mean = mean_of(rts);
            rec.runtime_ns_std = sample_std(rts);
            rec.speedup = raw_ops_mean / rec.op_count_mean;
            rec.op_counts = std::move(ops);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::string bench_records_to_csv(const std::vector<BenchRecord>& records) {
    std::string out =
        "dataset,method,n,seed,op_count_mean,op_count_std,runtime_ns_mean,runtime_ns_std,"
        "speedup,hull_error_pct,hausdorff,entropy_before,entropy_after,preprocess_ns\n";
    for (const BenchRecord& r : records) {
        out += r.dataset + ',' + r.method + ',' + std::to_string(r.n) + ',' +
               std::to_string(r.seed) + ',' + format_g17(r.op_count_mean) + ',' +
               format_g17(r.op_count_std) + ',' + format_g17(r.runtime_ns_mean) + ',' +
               format_g17(r.runtime_ns_std) + ',' + format_g17(r.speedup) + ',' +
               format_g17(r.hull_error_pct) + ',' + format_g17(r.hausdorff) + ',' +
               format_g17(r.entropy_before) + ',' + format_g17(r.entropy_after) + ',' +
               format_g17(r.preprocess_ns) + '\n';
    }
    return out;
}

CorrelationResult run_correlation(const CorrelationOptions& opt) {
    if (opt.instances < 10) throw validation_error("correlation needs at least 10 instances");
    if (opt.max_blobs == 0) throw validation_error("max_blobs must be positive");

    CorrelationResult res;
    for (size_t i = 0; i < opt.instances; ++i) {
        uint64_t seed_i = derive_seed(opt.seed, i);
        DatasetSpec spec;
        spec.kind = DatasetKind::blobs2d;
        spec.n = opt.points_per_instance;
        spec.seed = seed_i;
        spec.sigma = opt.blob_sigma;
        spec.blobs = 1 + (i % opt.max_blobs);
        Dataset ds = gen_dataset(spec);

        FitOptions fo;
        fo.k = opt.fit_k;
        fo.alpha = opt.alpha;
        fo.scale_mode = opt.scale_mode;
        fo.steps = opt.fit_steps;
        fo.lr = opt.fit_lr;
        fo.seed = derive_seed(seed_i, 1);
        double h = fit_anchors(ds.points, fo).trace.back();

        double oracle = 0.0;
        if (opt.mode == OracleMode::generating) {
            oracle = generating_partition_entropy(ds.labels).entropy_normalized;
        } else {
            oracle = min_entropy_arrangement(ds.points, opt.arrangement_m)
                         .result.entropy_normalized;
        }
        res.rows.push_back({i, spec.blobs, h, oracle});
    }
    if (opt.shuffled_control) {
        Rng rng(derive_stream(opt.seed, 0xCAFEULL));
        std::vector<size_t> idx(res.rows.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        rng.shuffle(idx);
        std::vector<double> shuffled(res.rows.size());
        for (size_t i = 0; i < idx.size(); ++i) shuffled[i] = res.rows[idx[i]].oracle;
        for (size_t i = 0; i < idx.size(); ++i) res.rows[i].oracle = shuffled[i];
    }
    std::vector<double> x, y;
    for (const CorrelationRow& r : res.rows) {
        x.push_back(r.oracle);
        y.push_back(r.h_fitted);
    }
    res.fit = linear_r2(x, y);
    return res;
}

std::string correlation_to_csv(const CorrelationResult& r) {
    std::string out = "instance,blobs,h_diff,oracle_entropy\n";
    for (const CorrelationRow& row : r.rows)
        out += std::to_string(row.instance) + ',' + std::to_string(row.blobs) + ',' +
               format_g17(row.h_fitted) + ',' + format_g17(row.oracle) + '\n';
    return out;
}

std::vector<AblationRecord> run_ablation(const AblationOptions& opt) {
    if (opt.alphas.empty() && opt.ks.empty() && opt.inits.empty())
        throw validation_error("ablation needs a nonempty grid");
    if (opt.trials < 2) throw validation_error("ablation needs at least 2 trials");

    struct Cell {
        std::string factor, value;
        RestructureConfig cfg;
    };
    std::vector<Cell> cells;
    for (double a : opt.alphas) {
        RestructureConfig c = opt.restructure;
        c.alpha = a;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", a);
        cells.push_back({"alpha", buf, c});
    }
    for (size_t k : opt.ks) {
        RestructureConfig c = opt.restructure;
        c.k = k;
        cells.push_back({"k", std::to_string(k), c});
    }
    for (AnchorInit init : opt.inits) {
        RestructureConfig c = opt.restructure;
        c.anchor_init = init;
        cells.push_back({"anchor_init", init == AnchorInit::kmeanspp ? "kmeanspp" : "random", c});
    }

    std::vector<AblationRecord> records;
    for (const Cell& cell : cells) {
        AblationRecord rec;
        rec.factor = cell.factor;
        rec.value = cell.value;
        for (size_t t = 0; t < opt.trials; ++t) {
            uint64_t seed_t = derive_seed(opt.seed, t);
            DatasetSpec spec = opt.base;
            spec.seed = seed_t;
            Dataset ds = gen_dataset(spec);
            if (ds.points.d != 2) throw validation_error("the ablation needs 2-d datasets");
            HullResult raw = monotone_chain_hull(ds.points);

            RestructureConfig cfg = cell.cfg;
            cfg.seed = derive_seed(seed_t, 2);
            RestructureResult rr = restructure(ds.points, cfg);
            HardPartition P =
                cluster_partition(rr.output, opt.partition_k, derive_seed(seed_t, 3));
            HullResult h = partition_merge_hull(rr.output, P);

            rec.speedups.push_back(double(raw.op_count) / double(h.op_count));
            rec.hull_error_pct_mean += hull_error_pct(raw, h) / double(opt.trials);
            double eb = fitted_entropy(ds.points, derive_seed(seed_t, 1));
            double ea = fitted_entropy(rr.output, derive_seed(seed_t, 4));
            rec.entropy_ratio_mean += (eb > 0 ? ea / eb : 1.0) / double(opt.trials);
        }
        rec.speedup_mean = mean_of(rec.speedups);
        double half = 1.96 * sample_std(rec.speedups) / std::sqrt(double(opt.trials));
        rec.speedup_ci_lo = rec.speedup_mean - half;
        rec.speedup_ci_hi = rec.speedup_mean + half;
        records.push_back(std::move(rec));
    }
    return records;
}

std::string ablation_to_csv(const std::vector<AblationRecord>& records) {
    std::string out =
        "factor,value,speedup_mean,speedup_ci_lo,speedup_ci_hi,hull_error_pct_mean,"
        "entropy_ratio_mean\n";
    for (const AblationRecord& r : records) out += ci_csv(r);
    return out;
}

} // namespace rpe
