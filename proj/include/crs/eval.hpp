#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crs/baselines.hpp"
#include "crs/crs_select.hpp"
#include "crs/dataset.hpp"
#include "crs/similarity.hpp"
#include "crs/types.hpp"

namespace crs {

struct ClassMetrics {
    std::string label;
    std::optional<double> precision;  // nullopt when the class was never predicted
    std::optional<double> recall;     // nullopt when the class has no test support
    std::size_t support = 0;
};

struct ClusterBuildInfo {
    std::string label;
    std::size_t train_size = 0;
    std::size_t rep_count = 0;
    double tau = 0.0;  // threshold echo (delta for delta-medoids, NaN if unused)
};

struct MetricsReport {
    std::vector<ClassMetrics> per_class;
    // unweighted means over classes whose metric is defined
    double macro_precision = 0.0;
    double macro_recall = 0.0;

    double prototype_fraction = 0.0;  // selected representatives / training items
    std::uint64_t calls_build = 0;
    std::uint64_t calls_classify = 0;
    double s_ratio_build = 0.0;     // calls_build / (n_train (n_train - 1) / 2)
    double s_ratio_classify = 0.0;  // calls_classify / (n_test * n_train), plain 1-NN cost

    std::vector<std::string> label_order;
    std::vector<std::vector<std::size_t>> confusion;  // rows true, cols predicted

    std::vector<ClusterBuildInfo> clusters;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double wall_seconds = 0.0;
};

enum class Method { Crs, DeltaMedoids, Random, Full };

const char* to_string(Method m);

struct MethodSpec {
    Method method = Method::Crs;
    CrsParams crs;
    // delta-medoids: nullopt resolves delta per cluster to the seeded 5%
    // sample homogeneity estimate
    std::optional<double> dm_delta;
    int dm_max_refine_iters = 20;
    double random_fraction = 0.05;
};

struct EvalOptions {
    double test_fraction = 0.3;
    std::uint64_t seed = 42;
};

// End-to-end experiment: stratified split, per-cluster prototype build with
// a fresh counter per cluster, NPC over the held-out items, metric assembly.
// Build and classification counters are kept separate.
MetricsReport run_eval(const LabeledDataset& ds, const SimilarityMeasure& measure, const MethodSpec& spec,
                       const EvalOptions& opts);

// run_eval per k (ascending) over one shared split; spec.method must be Crs.
std::vector<std::pair<int, MetricsReport>> sweep_k(const LabeledDataset& ds, const SimilarityMeasure& measure,
                                                   const MethodSpec& spec, const std::vector<int>& ks,
                                                   const EvalOptions& opts);

struct ClusterDescriptor {
    std::string label;
    std::size_t size = 0;
    double homogeneity = 0.0;
};

// Size and homogeneity per cluster, using the same exact/sampled rule as the
// tau default.
std::vector<ClusterDescriptor> describe_clusters(const LabeledDataset& ds, const SimilarityMeasure& measure,
                                                 std::uint64_t seed);

// Per-cluster CSV across methods: one row per (cluster, method) with size,
// homogeneity, prototype fraction, and that class's precision/recall.
std::string per_cluster_table_csv(const std::vector<std::pair<std::string, MetricsReport>>& method_reports,
                                  const std::vector<ClusterDescriptor>& meta);

std::string per_class_csv(const MetricsReport& report);
std::string confusion_csv(const MetricsReport& report);

// Single JSON document with every report field plus the caller's parameter
// echo. Wall-clock is included only when requested so that default outputs
// stay byte-reproducible.
std::string report_json(const MetricsReport& report, const std::vector<std::pair<std::string, std::string>>& config,
                        bool include_timing);
std::string sweep_json(const std::vector<std::pair<int, MetricsReport>>& reports,
                       const std::vector<std::pair<std::string, std::string>>& config, bool include_timing);

}  // namespace crs
