#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rpe/bench.hpp"
#include "rpe/entropy.hpp"
#include "rpe/errors.hpp"
#include "rpe/geometry.hpp"
#include "rpe/halfspace.hpp"
#include "rpe/oracle.hpp"
#include "rpe/restructure.hpp"
#include "rpe/stats.hpp"

namespace py = pybind11;

namespace {

rpe::PointSet to_points(const std::vector<std::vector<double>>& rows) {
    rpe::PointSet S;
    if (rows.empty()) throw rpe::validation_error("empty point list");
    S.n = rows.size();
    S.d = rows[0].size();
    for (const auto& row : rows) {
        if (row.size() != S.d) throw rpe::validation_error("ragged point list");
        S.coords.insert(S.coords.end(), row.begin(), row.end());
    }
    rpe::validate(S);
    return S;
}

std::vector<std::vector<double>> from_points(const rpe::PointSet& S) {
    std::vector<std::vector<double>> rows(S.n, std::vector<double>(S.d));
    for (size_t i = 0; i < S.n; ++i)
        for (size_t c = 0; c < S.d; ++c) rows[i][c] = S.at(i, c);
    return rows;
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "differentiable range-partition entropy toolkit";

    mod.def(
        "gen_dataset",
        [](const std::string& kind, size_t n, uint64_t seed, double sigma, size_t blobs) {
            rpe::DatasetSpec spec;
            spec.kind = rpe::dataset_kind_from_string(kind);
            spec.n = n;
            spec.seed = seed;
            spec.sigma = sigma;
            spec.blobs = blobs;
            rpe::Dataset ds = rpe::gen_dataset(spec);
            py::dict out;
            out["points"] = from_points(ds.points);
            out["labels"] = ds.labels;
            return out;
        },
        py::arg("kind"), py::arg("n"), py::arg("seed") = 0, py::arg("sigma") = -1.0,
        py::arg("blobs") = 8);

    mod.def(
        "h_diff",
        [](const std::vector<std::vector<double>>& pts, size_t k, double alpha,
           const std::string& scale_mode, uint64_t seed) {
            rpe::PointSet S = to_points(pts);
            rpe::AnchorSet A =
                rpe::init_anchors(S, k ? k : rpe::default_k(S.n), alpha,
                                  rpe::scale_mode_from_string(scale_mode),
                                  rpe::AnchorInit::kmeanspp, seed);
            return rpe::h_diff_value(S, A);
        },
        py::arg("points"), py::arg("k") = 0, py::arg("alpha") = 10.0,
        py::arg("scale_mode") = "raw", py::arg("seed") = 0);

    mod.def(
        "fit_anchors",
        [](const std::vector<std::vector<double>>& pts, size_t k, double alpha,
           const std::string& scale_mode, size_t steps, double lr, uint64_t seed) {
            rpe::FitOptions fo;
            fo.k = k;
            fo.alpha = alpha;
            fo.scale_mode = rpe::scale_mode_from_string(scale_mode);
            fo.steps = steps;
            fo.lr = lr;
            fo.seed = seed;
            rpe::PointSet S = to_points(pts);
            rpe::FitResult fr = rpe::fit_anchors(S, fo);
            py::dict out;
            std::vector<std::vector<double>> centers(fr.anchors.k,
                                                     std::vector<double>(fr.anchors.d));
            for (size_t j = 0; j < fr.anchors.k; ++j)
                for (size_t c = 0; c < fr.anchors.d; ++c) centers[j][c] = fr.anchors.at(j, c);
            out["centers"] = centers;
            out["h_initial"] = fr.trace.front();
            out["h_final"] = fr.trace.back();
            out["steps_run"] = fr.steps_run;
            return out;
        },
        py::arg("points"), py::arg("k") = 0, py::arg("alpha") = 10.0,
        py::arg("scale_mode") = "raw", py::arg("steps") = 200, py::arg("lr") = 0.05,
        py::arg("seed") = 0);

    mod.def(
        "restructure",
        [](const std::vector<std::vector<double>>& pts, double lambda_, double mu, size_t steps,
           double lr, size_t k, double alpha, uint64_t seed) {
            rpe::RestructureConfig cfg;
            cfg.lambda = lambda_;
            cfg.mu = mu;
            cfg.steps = steps;
            cfg.lr = lr;
            cfg.k = k;
            cfg.alpha = alpha;
            cfg.seed = seed;
            rpe::RestructureResult r = rpe::restructure(to_points(pts), cfg);
            py::dict out;
            out["points"] = from_points(r.output);
            out["iterations_run"] = r.iterations_run;
            std::vector<double> totals, entropies;
            for (const rpe::TraceRow& row : r.trace) {
                totals.push_back(row.total);
                entropies.push_back(row.entropy);
            }
            out["trace_total"] = totals;
            out["trace_entropy"] = entropies;
            return out;
        },
        py::arg("points"), py::arg("lambda_") = 0.1, py::arg("mu") = 0.01, py::arg("steps") = 500,
        py::arg("lr") = 1e-3, py::arg("k") = 0, py::arg("alpha") = 10.0, py::arg("seed") = 0);

    mod.def(
        "hull",
        [](const std::vector<std::vector<double>>& pts, const std::string& algo) {
            rpe::PointSet S = to_points(pts);
            rpe::HullResult h;
            if (algo == "monotone") h = rpe::monotone_chain_hull(S);
            else if (algo == "chan") h = rpe::chans_hull(S);
            else throw rpe::validation_error("unknown hull algorithm: " + algo);
            py::dict out;
            std::vector<std::vector<double>> verts;
            for (const auto& v : h.vertices) verts.push_back({v[0], v[1]});
            out["vertices"] = verts;
            out["area"] = h.area;
            out["op_count"] = h.op_count;
            return out;
        },
        py::arg("points"), py::arg("algo") = "monotone");

    mod.def(
        "maxima",
        [](const std::vector<std::vector<double>>& pts) {
            rpe::MaximaResult r = rpe::maxima_3d(to_points(pts));
            py::dict out;
            out["indices"] = r.indices;
            out["op_count"] = r.op_count;
            return out;
        },
        py::arg("points"));

    mod.def(
        "oracle_partition",
        [](const std::vector<std::vector<double>>& pts, size_t parts_min) {
            rpe::OraclePartitionResult r =
                rpe::min_entropy_partition(to_points(pts), parts_min);
            py::dict out;
            out["entropy_nats"] = r.entropy_nats;
            out["entropy_normalized"] = r.entropy_normalized;
            out["labels"] = r.partition.labels;
            return out;
        },
        py::arg("points"), py::arg("parts_min") = 2);

    mod.def(
        "bound",
        [](const std::vector<std::vector<double>>& pts, size_t m, double tau, uint64_t seed,
           bool infinite_n) {
            rpe::PointSet S = to_points(pts);
            rpe::HalfspaceSet H =
                rpe::init_halfspaces(S, m, tau, rpe::HalfspaceInit::maxmargin, seed);
            rpe::CellGating G = rpe::enumerate_cells(S, H);
            rpe::BoundOptions bo;
            bo.infinite_n = infinite_n;
            rpe::BoundReport b = rpe::evaluate_bound(S, H, G, bo);
            py::dict out;
            out["margin"] = b.margin;
            out["eps_total"] = b.eps_total;
            out["bound"] = b.bound;
            out["vacuous"] = b.vacuous;
            out["h_soft"] = rpe::h_soft(S, H, G);
            return out;
        },
        py::arg("points"), py::arg("m") = 3, py::arg("tau") = 0.25, py::arg("seed") = 0,
        py::arg("infinite_n") = false);

    mod.def(
        "chamfer",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
            return rpe::chamfer(to_points(a), to_points(b));
        },
        py::arg("a"), py::arg("b"));

    mod.def(
        "hausdorff",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
            return rpe::hausdorff(to_points(a), to_points(b));
        },
        py::arg("a"), py::arg("b"));

    mod.def(
        "paired_ttest",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            rpe::TTestResult r = rpe::paired_ttest(a, b);
            py::dict out;
            out["t"] = r.t;
            out["df"] = r.df;
            out["p"] = r.p;
            out["degenerate"] = r.degenerate;
            return out;
        },
        py::arg("a"), py::arg("b"));

    py::register_exception<rpe::validation_error>(mod, "ValidationError");
    py::register_exception<rpe::size_guard_error>(mod, "SizeGuardError");
    py::register_exception<rpe::numeric_error>(mod, "NumericError");
}
