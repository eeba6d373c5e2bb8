#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpe/entropy.hpp"
#include "rpe/point_set.hpp"
#include "rpe/restructure.hpp"
#include "rpe/stats.hpp"

namespace rpe {

enum class DatasetKind { uniform2d, parabolic2d, blobs2d, blobs3d, pareto3d };

DatasetKind dataset_kind_from_string(const std::string& s);
std::string to_string(DatasetKind k);

struct DatasetSpec {
    DatasetKind kind = DatasetKind::uniform2d;
    size_t n = 1024;
    uint64_t seed = 0;
    double sigma = -1.0; // negative -> per-kind default
    size_t blobs = 8;
};

struct Dataset {
    PointSet points;
    std::vector<uint32_t> labels; // ground truth for blob kinds, else empty
};

Dataset gen_dataset(const DatasetSpec& spec);

enum class BenchMethod { raw, random_permutation, heuristic_sort, restructure_adaptive };

BenchMethod bench_method_from_string(const std::string& s);
std::string to_string(BenchMethod m);

struct BenchOptions {
    size_t trials = 5;
    bool timing = false; // wall-clock columns stay zero when off (deterministic bytes)
    uint64_t seed = 0;
    RestructureConfig restructure{.lr = 0.05}; // preprocessing step of restructure_adaptive
    size_t partition_k = 32;       // clusters behind the merge partition
};

struct BenchRecord {
    std::string dataset;
    std::string method;
    size_t n = 0;
    uint64_t seed = 0;
    double op_count_mean = 0, op_count_std = 0;
    double runtime_ns_mean = 0, runtime_ns_std = 0;
    double speedup = 1.0; // raw mean op_count / method mean op_count
    double hull_error_pct = 0;
    double hausdorff = 0;
    double entropy_before = 0, entropy_after = 0;
    double preprocess_ns = 0;
    std::vector<double> op_counts; // per trial, paired across methods
};

std::vector<BenchRecord> run_speedup_bench(const std::vector<DatasetSpec>& datasets,
                                           const std::vector<BenchMethod>& methods,
                                           const BenchOptions& opt);
std::string bench_records_to_csv(const std::vector<BenchRecord>& records);

enum class OracleMode { generating, arrangement };

OracleMode oracle_mode_from_string(const std::string& s);

struct CorrelationOptions {
    size_t instances = 50;
    size_t points_per_instance = 12;
    size_t max_blobs = 8;
    OracleMode mode = OracleMode::generating;
    size_t arrangement_m = 2;
    uint64_t seed = 0;
    size_t fit_k = 8;
    double alpha = 40.0; // sharp enough to keep distinct blobs apart during descent
    ScaleMode scale_mode = ScaleMode::normalized; // instances span scales
    double blob_sigma = 0.02;
    size_t fit_steps = 150;
    double fit_lr = 0.05;
    bool shuffled_control = false; // permute the oracle column before the fit
};

struct CorrelationRow {
    size_t instance = 0;
    size_t blobs = 0;
    double h_fitted = 0;
    double oracle = 0;
};

struct CorrelationResult {
    std::vector<CorrelationRow> rows;
    R2Result fit;
};

CorrelationResult run_correlation(const CorrelationOptions& opt);
std::string correlation_to_csv(const CorrelationResult& r);

struct AblationOptions {
    std::vector<double> alphas;
    std::vector<size_t> ks;
    std::vector<AnchorInit> inits;
    // Blob data keeps the anchor-design factors load-bearing: on structureless
    // inputs every estimator variant degenerates to the same noise.
    DatasetSpec base{.kind = DatasetKind::blobs2d};
    size_t trials = 5;
    uint64_t seed = 0;
    RestructureConfig restructure{.k = 8, .lr = 0.05};
    size_t partition_k = 32;
};

struct AblationRecord {
    std::string factor;
    std::string value;
    double speedup_mean = 0, speedup_ci_lo = 0, speedup_ci_hi = 0; // 95% normal CI
    double hull_error_pct_mean = 0;
    double entropy_ratio_mean = 0; // entropy(S') / entropy(S)
    std::vector<double> speedups;  // per trial
};

std::vector<AblationRecord> run_ablation(const AblationOptions& opt);
std::string ablation_to_csv(const std::vector<AblationRecord>& records);

// Hard partition of S into at most k parts by nearest fitted anchor;
// the merge partition behind the adaptive hull/maxima pipelines.
HardPartition cluster_partition(const PointSet& S, size_t k, uint64_t seed);

} // namespace rpe
