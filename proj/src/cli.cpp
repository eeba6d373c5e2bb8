#include "rpe/cli.hpp"

#include <CLI11.hpp>

#include "rpe/bench.hpp"
#include "rpe/entropy.hpp"
#include "rpe/errors.hpp"
#include "rpe/geometry.hpp"
#include "rpe/halfspace.hpp"
#include "rpe/io.hpp"
#include "rpe/oracle.hpp"
#include "rpe/restructure.hpp"
#include "rpe/rng.hpp"
#include "rpe/svg.hpp"

namespace rpe {

namespace {

struct CliConfig {
    double alpha = -1.0;       // negative -> per-command default
    size_t k = 0;
    double tau = 0.25;
    size_t m = 3;
    double lambda = 0.1;
    double mu = 0.01;
    double lr = -1.0;          // negative -> per-command default
    long long steps = -1;      // negative -> per-command default
    size_t trials = 5;
    std::string estimator = "ball";
    std::string scale_mode; // empty -> per-command default
    size_t parts_min = 2;
    double delta = 0.05;
    double constant_C = 1.0;
};

CliConfig load_config(const std::string& path) {
    CliConfig c;
    if (path.empty()) return c;
    nlohmann::json j = parse_json(read_text_file(path));
    try {
        if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
        if (j.contains("k")) c.k = j["k"].get<size_t>();
        if (j.contains("tau")) c.tau = j["tau"].get<double>();
        if (j.contains("m")) c.m = j["m"].get<size_t>();
        if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
        if (j.contains("mu")) c.mu = j["mu"].get<double>();
        if (j.contains("lr")) c.lr = j["lr"].get<double>();
        if (j.contains("steps")) c.steps = j["steps"].get<long long>();
        if (j.contains("trials")) c.trials = j["trials"].get<size_t>();
        if (j.contains("estimator")) c.estimator = j["estimator"].get<std::string>();
        if (j.contains("scale_mode")) c.scale_mode = j["scale_mode"].get<std::string>();
        if (j.contains("parts_min")) c.parts_min = j["parts_min"].get<size_t>();
        if (j.contains("delta")) c.delta = j["delta"].get<double>();
        if (j.contains("constant_C")) c.constant_C = j["constant_C"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad config JSON: ") + e.what());
    }
    return c;
}

PointSet load_points(const std::string& path, std::vector<uint32_t>* labels = nullptr) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return points_from_json(parse_json(read_text_file(path)));
    return points_from_csv(read_text_file(path), labels);
}

struct Ctx {
    uint64_t seed = 0;
    CliConfig cfg;
    std::string out_path;
    std::string format = "csv";
    std::ostream* out;

    void emit(const std::string& content) const {
        if (out_path.empty()) *out << content;
        else write_text_file(out_path, content);
    }
    void emit_json(const nlohmann::json& j) const { emit(j.dump(2) + "\n"); }
    bool json() const { return format == "json"; }
};

RestructureConfig restructure_config(const Ctx& ctx) {
    RestructureConfig rc;
    rc.lambda = ctx.cfg.lambda;
    rc.mu = ctx.cfg.mu;
    rc.estimator = estimator_from_string(ctx.cfg.estimator);
    rc.k = ctx.cfg.k;
    if (ctx.cfg.alpha > 0) rc.alpha = ctx.cfg.alpha;
    if (!ctx.cfg.scale_mode.empty()) rc.scale_mode = scale_mode_from_string(ctx.cfg.scale_mode);
    rc.m = ctx.cfg.m;
    rc.tau = ctx.cfg.tau;
    if (ctx.cfg.steps >= 0) rc.steps = size_t(ctx.cfg.steps);
    if (ctx.cfg.lr > 0) rc.lr = ctx.cfg.lr;
    rc.seed = ctx.seed;
    return rc;
}

FitOptions fit_options(const Ctx& ctx) {
    FitOptions fo;
    fo.k = ctx.cfg.k;
    if (ctx.cfg.alpha > 0) fo.alpha = ctx.cfg.alpha;
    if (!ctx.cfg.scale_mode.empty()) fo.scale_mode = scale_mode_from_string(ctx.cfg.scale_mode);
    if (ctx.cfg.steps >= 0) fo.steps = size_t(ctx.cfg.steps);
    if (ctx.cfg.lr > 0) fo.lr = ctx.cfg.lr;
    fo.seed = ctx.seed;
    return fo;
}

nlohmann::json hull_to_json(const HullResult& h, const std::string& algo) {
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& v : h.vertices) verts.push_back({v[0], v[1]});
    return {{"algo", algo}, {"vertices", verts}, {"area", h.area}, {"op_count", h.op_count}};
}

std::string vertices_to_csv(const std::vector<std::array<double, 2>>& verts) {
    std::string s = "x0,x1\n";
    for (const auto& v : verts) s += format_g17(v[0]) + ',' + format_g17(v[1]) + '\n';
    return s;
}

void cmd_gen(const Ctx& ctx, const std::string& kind, size_t n, double sigma, size_t blobs,
             const std::string& svg_path) {
    DatasetSpec spec;
    spec.kind = dataset_kind_from_string(kind);
    spec.n = n;
    spec.seed = ctx.seed;
    spec.sigma = sigma;
    spec.blobs = blobs;
    Dataset ds = gen_dataset(spec);
    if (!svg_path.empty()) {
        std::vector<std::array<double, 2>> pts(ds.points.n);
        for (size_t i = 0; i < ds.points.n; ++i)
            pts[i] = {ds.points.at(i, 0), ds.points.d > 1 ? ds.points.at(i, 1) : 0.0};
        ScatterAxes axes;
        axes.title = to_string(spec.kind);
        write_text_file(svg_path, emit_svg_scatter(pts, ds.labels, axes));
    }
    if (ctx.json()) {
        nlohmann::json j = points_to_json(ds.points);
        if (!ds.labels.empty()) j["labels"] = ds.labels;
        ctx.emit_json(j);
    } else {
        ctx.emit(points_to_csv(ds.points, ds.labels.empty() ? nullptr : &ds.labels));
    }
}

void cmd_entropy(const Ctx& ctx, const std::string& in, const std::string& anchors_path,
                 const std::string& halfspaces_path) {
    PointSet S = load_points(in);
    nlohmann::json j;
    if (ctx.cfg.estimator == "ball") {
        AnchorSet A;
        if (!anchors_path.empty()) {
            A = anchors_from_json(parse_json(read_text_file(anchors_path)));
        } else {
            size_t k = ctx.cfg.k ? ctx.cfg.k : default_k(S.n);
            ScaleMode sm = ctx.cfg.scale_mode.empty() ? ScaleMode::raw
                                                        : scale_mode_from_string(ctx.cfg.scale_mode);
            A = init_anchors(S, k, ctx.cfg.alpha > 0 ? ctx.cfg.alpha : 10.0, sm,
                             AnchorInit::kmeanspp, ctx.seed);
        }
        j = {{"estimator", "ball"},
             {"k", A.k},
             {"alpha", A.alpha},
             {"scale_mode", to_string(A.scale_mode)},
             {"h_diff", h_diff_value(S, A)}};
    } else if (ctx.cfg.estimator == "halfspace") {
        HalfspaceSet H;
        if (!halfspaces_path.empty()) {
            H = halfspaces_from_json(parse_json(read_text_file(halfspaces_path)));
        } else {
            H = init_halfspaces(S, ctx.cfg.m, ctx.cfg.tau, HalfspaceInit::maxmargin, ctx.seed);
        }
        CellGating G = enumerate_cells(S, H);
        j = {{"estimator", "halfspace"},
             {"m", H.m},
             {"tau", H.tau},
             {"cells", G.codes.size()},
             {"h_soft", h_soft(S, H, G)}};
    } else {
        throw validation_error("unknown estimator: " + ctx.cfg.estimator);
    }
    if (ctx.json()) {
        ctx.emit_json(j);
    } else {
        std::string key = j.contains("h_diff") ? "h_diff" : "h_soft";
        ctx.emit("metric,value\n" + key + "," + format_g17(j[key].get<double>()) + "\n");
    }
}

void cmd_fit_anchors(const Ctx& ctx, const std::string& in, const std::string& init) {
    PointSet S = load_points(in);
    FitOptions fo = fit_options(ctx);
    fo.init = anchor_init_from_string(init);
    FitResult fr = fit_anchors(S, fo);
    nlohmann::json summary = {{"k", fr.anchors.k},
                              {"h_initial", fr.trace.front()},
                              {"h_final", fr.trace.back()},
                              {"steps_run", fr.steps_run}};
    if (!ctx.out_path.empty()) {
        write_text_file(ctx.out_path, anchors_to_json(fr.anchors).dump(2) + "\n");
        *ctx.out << summary.dump(2) << "\n";
    } else {
        summary["anchors"] = anchors_to_json(fr.anchors);
        *ctx.out << summary.dump(2) << "\n";
    }
}

void cmd_restructure(const Ctx& ctx, const std::string& in, const std::string& trace_path) {
    PointSet S = load_points(in);
    RestructureResult r = restructure(S, restructure_config(ctx));
    if (!trace_path.empty()) write_text_file(trace_path, trace_to_csv(r.trace));
    const TraceRow& last = r.trace.back();
    nlohmann::json summary = {{"iterations_run", r.iterations_run},
                              {"chamfer", last.chamfer},
                              {"entropy", last.entropy},
                              {"stability", last.stability},
                              {"total", last.total}};
    if (!ctx.out_path.empty()) {
        write_text_file(ctx.out_path,
                        ctx.json() ? points_to_json(r.output).dump(2) + "\n"
                                   : points_to_csv(r.output));
        *ctx.out << summary.dump(2) << "\n";
    } else {
        summary["points"] = points_to_json(r.output);
        *ctx.out << summary.dump(2) << "\n";
    }
}

void cmd_hull(const Ctx& ctx, const std::string& in, const std::string& algo, size_t partition_k,
              bool use_labels) {
    std::vector<uint32_t> labels;
    PointSet S = load_points(in, &labels);
    HullResult h;
    if (algo == "monotone") {
        h = monotone_chain_hull(S);
    } else if (algo == "chan") {
        h = chans_hull(S);
    } else if (algo == "merge") {
        HardPartition P;
        if (use_labels) {
            if (labels.size() != S.n)
                throw validation_error("--use-labels needs a label column in the input");
            P = partition_from_labels(labels);
        } else {
            P = cluster_partition(S, partition_k, derive_seed(ctx.seed, 3));
        }
        h = partition_merge_hull(S, P);
    } else {
        throw validation_error("unknown hull algorithm: " + algo);
    }
    if (ctx.json()) ctx.emit_json(hull_to_json(h, algo));
    else ctx.emit(vertices_to_csv(h.vertices));
}

void cmd_maxima(const Ctx& ctx, const std::string& in, bool adaptive, size_t partition_k,
                bool use_labels) {
    std::vector<uint32_t> labels;
    PointSet S = load_points(in, &labels);
    MaximaResult r;
    std::string algo = adaptive ? "adaptive" : "sweep";
    if (adaptive) {
        HardPartition P;
        if (use_labels) {
            if (labels.size() != S.n)
                throw validation_error("--use-labels needs a label column in the input");
            P = partition_from_labels(labels);
        } else {
            P = cluster_partition(S, partition_k, derive_seed(ctx.seed, 3));
        }
        r = adaptive_maxima(S, P);
    } else {
        r = maxima_3d(S);
    }
    if (ctx.json()) {
        ctx.emit_json({{"algo", algo}, {"indices", r.indices}, {"op_count", r.op_count}});
    } else {
        std::string s = "index\n";
        for (size_t i : r.indices) s += std::to_string(i) + '\n';
        ctx.emit(s);
    }
}

void cmd_oracle(const Ctx& ctx, const std::string& in, const std::string& mode) {
    std::vector<uint32_t> labels;
    PointSet S = load_points(in, &labels);
    if (mode == "subsets") {
        RealizableSubsetIndex idx = realizable_subsets_2d(S);
        if (ctx.json()) {
            ctx.emit_json({{"n", idx.n}, {"masks", idx.masks}});
        } else {
            std::string s = "mask\n";
            for (uint32_t m : idx.masks) s += std::to_string(m) + '\n';
            ctx.emit(s);
        }
        return;
    }
    OraclePartitionResult r;
    std::vector<ArrangementLine> lines;
    const std::vector<ArrangementLine>* lines_ptr = nullptr;
    if (mode == "partition") {
        r = min_entropy_partition(S, ctx.cfg.parts_min);
    } else if (mode == "arrangement") {
        ArrangementResult a = min_entropy_arrangement(S, ctx.cfg.m);
        r = a.result;
        lines = a.lines;
        lines_ptr = &lines;
    } else if (mode == "generating") {
        if (labels.size() != S.n)
            throw validation_error("generating mode needs a label column in the input");
        r = generating_partition_entropy(labels);
    } else {
        throw validation_error("unknown oracle mode: " + mode);
    }
    if (ctx.json()) {
        ctx.emit_json(oracle_result_to_json(r, lines_ptr));
    } else {
        ctx.emit("entropy_nats,entropy_normalized,n_parts\n" + format_g17(r.entropy_nats) + ',' +
                 format_g17(r.entropy_normalized) + ',' +
                 std::to_string(r.partition.part_sizes.size()) + '\n');
    }
}

void cmd_bound(const Ctx& ctx, const std::string& in, const std::string& halfspaces_path,
               bool infinite_n) {
    PointSet S = load_points(in);
    HalfspaceSet H;
    if (!halfspaces_path.empty())
        H = halfspaces_from_json(parse_json(read_text_file(halfspaces_path)));
    else H = init_halfspaces(S, ctx.cfg.m, ctx.cfg.tau, HalfspaceInit::maxmargin, ctx.seed);
    CellGating G = enumerate_cells(S, H);
    BoundOptions bo;
    bo.delta = ctx.cfg.delta;
    bo.constant_c = ctx.cfg.constant_C;
    bo.infinite_n = infinite_n;
    BoundReport b = evaluate_bound(S, H, G, bo);
    nlohmann::json j = {{"margin", b.margin},
                        {"eps_smooth", b.eps_smooth},
                        {"lipschitz", b.lipschitz},
                        {"rademacher", b.rademacher},
                        {"slack", b.slack},
                        {"delta", b.delta},
                        {"constant_c", b.constant_c},
                        {"eps_total", b.eps_total},
                        {"bound", b.bound},
                        {"vacuous", b.vacuous},
                        {"cells", b.cells},
                        {"m", b.m},
                        {"n", b.n},
                        {"d", b.d},
                        {"tau", b.tau}};
    if (ctx.json()) {
        ctx.emit_json(j);
    } else {
        ctx.emit("metric,value\nmargin," + format_g17(b.margin) + "\neps_smooth," +
                 format_g17(b.eps_smooth) + "\nrademacher," + format_g17(b.rademacher) +
                 "\nslack," + format_g17(b.slack) + "\neps_total," + format_g17(b.eps_total) +
                 "\nbound," + format_g17(b.bound) + "\nvacuous," +
                 (b.vacuous ? std::string("1") : std::string("0")) + "\n");
    }
}

void cmd_bench(const Ctx& ctx, const std::vector<std::string>& dataset_names, size_t n,
               const std::vector<std::string>& method_names, bool timing, size_t partition_k) {
    std::vector<DatasetSpec> specs;
    for (const std::string& name : dataset_names) {
        DatasetSpec s;
        s.kind = dataset_kind_from_string(name);
        s.n = n;
        specs.push_back(s);
    }
    std::vector<BenchMethod> methods;
    for (const std::string& name : method_names) methods.push_back(bench_method_from_string(name));

    BenchOptions opt;
    opt.trials = ctx.cfg.trials;
    opt.timing = timing;
    opt.seed = ctx.seed;
    opt.partition_k = partition_k;
    opt.restructure = restructure_config(ctx);
    if (ctx.cfg.lr <= 0) opt.restructure.lr = 0.05; // bench preprocessing default

    std::vector<BenchRecord> records = run_speedup_bench(specs, methods, opt);
    if (ctx.json()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const BenchRecord& r : records)
            arr.push_back({{"dataset", r.dataset},
                           {"method", r.method},
                           {"n", r.n},
                           {"seed", r.seed},
                           {"op_count_mean", r.op_count_mean},
                           {"op_count_std", r.op_count_std},
                           {"runtime_ns_mean", r.runtime_ns_mean},
                           {"runtime_ns_std", r.runtime_ns_std},
                           {"speedup", r.speedup},
                           {"hull_error_pct", r.hull_error_pct},
                           {"hausdorff", r.hausdorff},
                           {"entropy_before", r.entropy_before},
                           {"entropy_after", r.entropy_after},
                           {"preprocess_ns", r.preprocess_ns}});
        ctx.emit_json(arr);
    } else {
        ctx.emit(bench_records_to_csv(records));
    }
}

void cmd_correlate(const Ctx& ctx, size_t instances, size_t points_n, size_t max_blobs,
                   const std::string& mode, bool shuffled, const std::string& svg_path) {
    CorrelationOptions opt;
    opt.instances = instances;
    opt.points_per_instance = points_n;
    opt.max_blobs = max_blobs;
    opt.mode = oracle_mode_from_string(mode);
    opt.arrangement_m = ctx.cfg.m;
    opt.seed = ctx.seed;
    opt.fit_k = ctx.cfg.k ? ctx.cfg.k : 8;
    if (ctx.cfg.alpha > 0) opt.alpha = ctx.cfg.alpha;
    if (!ctx.cfg.scale_mode.empty()) opt.scale_mode = scale_mode_from_string(ctx.cfg.scale_mode);
    if (ctx.cfg.steps >= 0) opt.fit_steps = size_t(ctx.cfg.steps);
    if (ctx.cfg.lr > 0) opt.fit_lr = ctx.cfg.lr;
    opt.shuffled_control = shuffled;

    CorrelationResult r = run_correlation(opt);
    if (!svg_path.empty()) {
        std::vector<std::array<double, 2>> pts;
        std::vector<uint32_t> classes;
        for (const CorrelationRow& row : r.rows) {
            pts.push_back({row.oracle, row.h_fitted});
            classes.push_back(uint32_t(row.blobs));
        }
        ScatterAxes axes;
        axes.x_label = "oracle entropy (normalized)";
        axes.y_label = "fitted soft entropy";
        axes.title = "entropy correlation";
        write_text_file(svg_path, emit_svg_scatter(pts, classes, axes));
    }
    nlohmann::json summary = {{"r2", r.fit.r2},
                              {"r2_raw", r.fit.r2_raw},
                              {"slope", r.fit.slope},
                              {"intercept", r.fit.intercept},
                              {"instances", r.rows.size()}};
    if (!ctx.out_path.empty()) {
        write_text_file(ctx.out_path, correlation_to_csv(r));
        *ctx.out << summary.dump(2) << "\n";
    } else if (ctx.json()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const CorrelationRow& row : r.rows)
            rows.push_back({{"instance", row.instance},
                            {"blobs", row.blobs},
                            {"h_diff", row.h_fitted},
                            {"oracle_entropy", row.oracle}});
        summary["rows"] = rows;
        *ctx.out << summary.dump(2) << "\n";
    } else {
        *ctx.out << correlation_to_csv(r);
    }
}

void cmd_ablate(const Ctx& ctx, const std::vector<double>& alphas, const std::vector<size_t>& ks,
                const std::vector<std::string>& inits, size_t n, size_t partition_k) {
    AblationOptions opt;
    opt.alphas = alphas;
    opt.ks = ks;
    for (const std::string& s : inits) opt.inits.push_back(anchor_init_from_string(s));
    opt.base.n = n;
    opt.trials = ctx.cfg.trials;
    opt.seed = ctx.seed;
    opt.partition_k = partition_k;
    RestructureConfig defaults = opt.restructure;
    opt.restructure = restructure_config(ctx);
    if (ctx.cfg.k == 0) opt.restructure.k = defaults.k;
    if (ctx.cfg.lr <= 0) opt.restructure.lr = 0.05;

    std::vector<AblationRecord> records = run_ablation(opt);
    if (ctx.json()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const AblationRecord& r : records)
            arr.push_back({{"factor", r.factor},
                           {"value", r.value},
                           {"speedup_mean", r.speedup_mean},
                           {"speedup_ci_lo", r.speedup_ci_lo},
                           {"speedup_ci_hi", r.speedup_ci_hi},
                           {"hull_error_pct_mean", r.hull_error_pct_mean},
                           {"entropy_ratio_mean", r.entropy_ratio_mean}});
        ctx.emit_json(arr);
    } else {
        ctx.emit(ablation_to_csv(records));
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"range-partition entropy toolkit"};
    app.fallthrough(true);
    app.require_subcommand(1);

    Ctx ctx;
    ctx.out = &out;
    std::string config_path;
    app.add_option("--seed", ctx.seed, "master seed");
    app.add_option("--config", config_path, "config JSON path");
    app.add_option("--out", ctx.out_path, "output file (default stdout)");
    app.add_option("--format", ctx.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* gen = app.add_subcommand("gen", "generate a dataset");
    std::string gen_kind, gen_svg;
    size_t gen_n = 256, gen_blobs = 8;
    double gen_sigma = -1.0;
    gen->add_option("--kind", gen_kind, "dataset kind")->required();
    gen->add_option("--n", gen_n, "point count");
    gen->add_option("--sigma", gen_sigma, "noise / blob spread");
    gen->add_option("--blobs", gen_blobs, "blob count");
    gen->add_option("--svg", gen_svg, "scatter plot path");

    auto* entropy = app.add_subcommand("entropy", "evaluate the soft entropy of a point set");
    std::string ent_in, ent_anchors, ent_halfspaces;
    entropy->add_option("--in", ent_in, "points file")->required();
    entropy->add_option("--anchors", ent_anchors, "anchors JSON");
    entropy->add_option("--halfspaces", ent_halfspaces, "halfspaces JSON");

    auto* fit = app.add_subcommand("fit-anchors", "fit anchors by entropy descent");
    std::string fit_in, fit_init = "kmeanspp";
    fit->add_option("--in", fit_in, "points file")->required();
    fit->add_option("--init", fit_init, "kmeanspp or random");

    auto* rest = app.add_subcommand("restructure", "gradient-descend a point set to low entropy");
    std::string rest_in, rest_trace;
    rest->add_option("--in", rest_in, "points file")->required();
    rest->add_option("--trace", rest_trace, "trace CSV path");

    auto* hull = app.add_subcommand("hull", "2-d convex hull");
    std::string hull_in, hull_algo = "monotone";
    size_t hull_pk = 32;
    bool hull_labels = false;
    hull->add_option("--in", hull_in, "points file")->required();
    hull->add_option("--algo", hull_algo, "monotone, chan or merge");
    hull->add_option("--partition-k", hull_pk, "clusters for merge partition");
    hull->add_flag("--use-labels", hull_labels, "partition by the label column");

    auto* maxima = app.add_subcommand("maxima", "3-d maxima set");
    std::string max_in;
    size_t max_pk = 32;
    bool max_adaptive = false, max_labels = false;
    maxima->add_option("--in", max_in, "points file")->required();
    maxima->add_flag("--adaptive", max_adaptive, "partition-based variant");
    maxima->add_option("--partition-k", max_pk, "clusters for the partition");
    maxima->add_flag("--use-labels", max_labels, "partition by the label column");

    auto* oracle = app.add_subcommand("oracle", "exact small-instance entropy oracle");
    std::string oracle_in, oracle_mode = "partition";
    oracle->add_option("--in", oracle_in, "points file")->required();
    oracle->add_option("--mode", oracle_mode, "partition, arrangement, subsets or generating");

    auto* bound = app.add_subcommand("bound", "halfspace consistency bound");
    std::string bound_in, bound_halfspaces;
    bool bound_inf = false;
    bound->add_option("--in", bound_in, "points file")->required();
    bound->add_option("--halfspaces", bound_halfspaces, "halfspaces JSON");
    bound->add_flag("--infinite-n", bound_inf, "drop the finite-sample terms");

    auto* bench = app.add_subcommand("bench", "hull speedup benchmark");
    std::vector<std::string> bench_datasets{"uniform2d"};
    std::vector<std::string> bench_methods{"raw", "random_permutation", "heuristic_sort",
                                           "restructure+adaptive"};
    size_t bench_n = 1024, bench_pk = 32;
    bool bench_timing = false;
    bench->add_option("--datasets", bench_datasets, "dataset kinds")->delimiter(',');
    bench->add_option("--methods", bench_methods, "methods")->delimiter(',');
    bench->add_option("--n", bench_n, "points per dataset");
    bench->add_option("--partition-k", bench_pk, "clusters for merge partition");
    bench->add_flag("--timing", bench_timing, "measure wall clock");

    auto* corr = app.add_subcommand("correlate", "fitted entropy vs oracle entropy");
    size_t corr_instances = 50, corr_n = 12, corr_blobs = 8;
    std::string corr_mode = "generating", corr_svg;
    bool corr_shuffled = false;
    corr->add_option("--instances", corr_instances, "instance count");
    corr->add_option("--points-n", corr_n, "points per instance");
    corr->add_option("--max-blobs", corr_blobs, "blob counts cycle 1..max");
    corr->add_option("--mode", corr_mode, "generating or arrangement");
    corr->add_flag("--shuffled", corr_shuffled, "permutation control");
    corr->add_option("--svg", corr_svg, "scatter plot path");

    auto* ablate = app.add_subcommand("ablate", "one-factor ablation grid");
    std::vector<double> ab_alphas;
    std::vector<size_t> ab_ks;
    std::vector<std::string> ab_inits;
    size_t ab_n = 1024, ab_pk = 32;
    ablate->add_option("--alphas", ab_alphas, "alpha grid")->delimiter(',');
    ablate->add_option("--ks", ab_ks, "k grid")->delimiter(',');
    ablate->add_option("--inits", ab_inits, "anchor init grid")->delimiter(',');
    ablate->add_option("--n", ab_n, "points per dataset");
    ablate->add_option("--partition-k", ab_pk, "clusters for merge partition");

    std::vector<const char*> argv;
    argv.push_back("rpe");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(int(argv.size()), argv.data());
        ctx.cfg = load_config(config_path);

        if (*gen) cmd_gen(ctx, gen_kind, gen_n, gen_sigma, gen_blobs, gen_svg);
        else if (*entropy) cmd_entropy(ctx, ent_in, ent_anchors, ent_halfspaces);
        else if (*fit) cmd_fit_anchors(ctx, fit_in, fit_init);
        else if (*rest) cmd_restructure(ctx, rest_in, rest_trace);
        else if (*hull) cmd_hull(ctx, hull_in, hull_algo, hull_pk, hull_labels);
        else if (*maxima) cmd_maxima(ctx, max_in, max_adaptive, max_pk, max_labels);
        else if (*oracle) cmd_oracle(ctx, oracle_in, oracle_mode);
        else if (*bound) cmd_bound(ctx, bound_in, bound_halfspaces, bound_inf);
        else if (*bench) cmd_bench(ctx, bench_datasets, bench_n, bench_methods, bench_timing, bench_pk);
        else if (*corr) cmd_correlate(ctx, corr_instances, corr_n, corr_blobs, corr_mode, corr_shuffled, corr_svg);
        else if (*ablate) cmd_ablate(ctx, ab_alphas, ab_ks, ab_inits, ab_n, ab_pk);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const size_guard_error& e) {
        err << "size guard: " << e.what() << "\n";
        return 4;
    } catch (const numeric_error& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const validation_error& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    }
}

} // namespace rpe
