#include "crs/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "crs/io_util.hpp"
#include "crs/npc.hpp"
#include "crs/reverse_graph.hpp"
#include "crs/rng.hpp"
#include "omp_error.hpp"

namespace crs {

namespace {

struct ClusterBuild {
    Prototype prototype;
    std::uint64_t calls = 0;
    double tau = 0.0;
};

ClusterBuild build_cluster_prototype(const Cluster& cluster, const LabeledDataset& train,
                                     const SimilarityMeasure& measure, const MethodSpec& spec,
                                     std::uint64_t run_seed) {
    CountingSimilarity cs(measure, train);
    const std::uint64_t cluster_seed = mix_seed(run_seed, fnv1a(cluster.label));
    ClusterBuild out;
    switch (spec.method) {
        case Method::Crs: {
            CrsParams params = spec.crs;
            params.nn.seed = cluster_seed;
            out.prototype = select_representatives(cluster, cs, params);
            out.tau = out.prototype.tau;
            break;
        }
        case Method::DeltaMedoids: {
            DeltaMedoidsParams params;
            params.max_refine_iters = spec.dm_max_refine_iters;
            if (spec.dm_delta) {
                params.delta = *spec.dm_delta;
            } else if (cluster.size() >= 2) {
                params.delta = approx_homogeneity(cluster, cs, 0.05, cluster_seed);
            } else {
                params.delta = 1.0;
            }
            out.prototype = delta_medoids(cluster, cs, params);
            out.tau = params.delta;
            break;
        }
        case Method::Random:
            out.prototype = random_fraction(cluster, spec.random_fraction, cluster_seed);
            out.tau = std::numeric_limits<double>::quiet_NaN();
            break;
        case Method::Full:
            out.prototype = full_cluster(cluster);
            out.tau = std::numeric_limits<double>::quiet_NaN();
            break;
    }
    out.calls = cs.count();
    return out;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json metrics_to_json(const MetricsReport& r, bool include_timing) {
    nlohmann::json j;
    j["train_size"] = r.train_size;
    j["test_size"] = r.test_size;
    j["macro_precision"] = r.macro_precision;
    j["macro_recall"] = r.macro_recall;
    j["prototype_fraction"] = r.prototype_fraction;
    j["calls_build"] = r.calls_build;
    j["calls_classify"] = r.calls_classify;
    j["s_ratio_build"] = r.s_ratio_build;
    j["s_ratio_classify"] = r.s_ratio_classify;
    if (include_timing) j["wall_seconds"] = r.wall_seconds;
    nlohmann::json per_class = nlohmann::json::array();
    for (const auto& c : r.per_class) {
        nlohmann::json jc;
        jc["label"] = c.label;
        jc["support"] = c.support;
        if (c.precision) jc["precision"] = *c.precision; else jc["precision"] = nullptr;
        if (c.recall) jc["recall"] = *c.recall; else jc["recall"] = nullptr;
        per_class.push_back(std::move(jc));
    }
    j["per_class"] = std::move(per_class);
    j["labels"] = r.label_order;
    j["confusion"] = r.confusion;
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : r.clusters) {
        nlohmann::json jc;
        jc["label"] = c.label;
        jc["train_size"] = c.train_size;
        jc["rep_count"] = c.rep_count;
        if (std::isfinite(c.tau)) jc["tau"] = c.tau; else jc["tau"] = nullptr;
        clusters.push_back(std::move(jc));
    }
    j["clusters"] = std::move(clusters);
    return j;
}

nlohmann::json config_to_json(const std::vector<std::pair<std::string, std::string>>& config) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : config) j[key] = value;
    return j;
}

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::Crs: return "crs";
        case Method::DeltaMedoids: return "delta-medoids";
        case Method::Random: return "random";
        case Method::Full: return "full";
    }
    return "?";
}

MetricsReport run_eval(const LabeledDataset& ds, const SimilarityMeasure& measure, const MethodSpec& spec,
                       const EvalOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();

    auto [train, test] = split_train_test(ds, opts.test_fraction, opts.seed);
    const std::vector<Cluster> clusters = clusters_of(train);
    if (clusters.size() < 2) throw ConfigError("run_eval: need at least 2 clusters");

    // prototype build, one fresh counter per cluster
    std::vector<ClusterBuild> builds(clusters.size());
    detail::OmpErrorCollector errors;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(clusters.size()); ++c)
        errors.run([&] { builds[c] = build_cluster_prototype(clusters[c], train, measure, spec, opts.seed); });
    errors.rethrow_if_failed();

    MetricsReport report;
    report.train_size = train.size();
    report.test_size = test.size();

    std::vector<Prototype> protos;
    protos.reserve(builds.size());
    std::size_t total_reps = 0;
    for (std::size_t c = 0; c < builds.size(); ++c) {
        report.calls_build += builds[c].calls;
        total_reps += builds[c].prototype.size();
        report.clusters.push_back(ClusterBuildInfo{clusters[c].label, clusters[c].size(),
                                                   builds[c].prototype.size(), builds[c].tau});
        protos.push_back(std::move(builds[c].prototype));
    }
    PrototypeSet ps = PrototypeSet::build(train, std::move(protos));

    // classification phase, separate counter
    CountingSimilarity cs_classify(measure, train);
    std::vector<Classification> predictions = batch_classify(test.items, ps, cs_classify);
    report.calls_classify = cs_classify.count();

    // confusion over the train label set (test labels are a subset by construction)
    std::map<std::string, std::size_t> label_index;
    for (const Cluster& c : clusters) {
        label_index.emplace(c.label, report.label_order.size());
        report.label_order.push_back(c.label);
    }
    const std::size_t m = report.label_order.size();
    report.confusion.assign(m, std::vector<std::size_t>(m, 0));
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto true_it = label_index.find(test.labels[i]);
        const auto pred_it = label_index.find(predictions[i].label);
        if (true_it == label_index.end() || pred_it == label_index.end())
            throw DomainError("run_eval: prediction outside the training label set");
        ++report.confusion[true_it->second][pred_it->second];
    }

    double prec_sum = 0.0, rec_sum = 0.0;
    std::size_t prec_n = 0, rec_n = 0;
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t support = 0, predicted = 0;
        for (std::size_t j = 0; j < m; ++j) {
            support += report.confusion[c][j];
            predicted += report.confusion[j][c];
        }
        const std::size_t tp = report.confusion[c][c];
        ClassMetrics cm;
        cm.label = report.label_order[c];
        cm.support = support;
        cm.precision = ratio(tp, predicted);
        cm.recall = ratio(tp, support);
        if (cm.precision) {
            prec_sum += *cm.precision;
            ++prec_n;
        }
        if (cm.recall) {
            rec_sum += *cm.recall;
            ++rec_n;
        }
        report.per_class.push_back(std::move(cm));
    }
    report.macro_precision = prec_n ? prec_sum / static_cast<double>(prec_n) : 0.0;
    report.macro_recall = rec_n ? rec_sum / static_cast<double>(rec_n) : 0.0;

    report.prototype_fraction = static_cast<double>(total_reps) / static_cast<double>(train.size());
    const double full_pairs = 0.5 * static_cast<double>(train.size()) * static_cast<double>(train.size() - 1);
    report.s_ratio_build = full_pairs > 0.0 ? static_cast<double>(report.calls_build) / full_pairs : 0.0;
    const double nn_cost = static_cast<double>(test.size()) * static_cast<double>(train.size());
    report.s_ratio_classify = nn_cost > 0.0 ? static_cast<double>(report.calls_classify) / nn_cost : 0.0;

    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::vector<std::pair<int, MetricsReport>> sweep_k(const LabeledDataset& ds, const SimilarityMeasure& measure,
                                                   const MethodSpec& spec, const std::vector<int>& ks,
                                                   const EvalOptions& opts) {
    if (spec.method != Method::Crs) throw ConfigError("sweep_k: method must be crs");
    if (ks.empty()) throw ConfigError("sweep_k: no k values");
    std::vector<int> sorted = ks;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<int, MetricsReport>> out;
    out.reserve(sorted.size());
    for (int k : sorted) {
        if (k < 1) throw ConfigError("sweep_k: k must be >= 1");
        MethodSpec per_k = spec;
        per_k.crs.k = k;
        // the split depends only on (ds, fraction, seed), so every k sees the
        // same partition
        out.emplace_back(k, run_eval(ds, measure, per_k, opts));
    }
    return out;
}

std::vector<ClusterDescriptor> describe_clusters(const LabeledDataset& ds, const SimilarityMeasure& measure,
                                                 std::uint64_t seed) {
    std::vector<ClusterDescriptor> out;
    for (const Cluster& c : clusters_of(ds)) {
        ClusterDescriptor d;
        d.label = c.label;
        d.size = c.size();
        if (c.size() < 2) {
            d.homogeneity = std::numeric_limits<double>::quiet_NaN();
        } else {
            CountingSimilarity cs(measure, ds);
            d.homogeneity = c.size() <= CrsParams::kExactTauLimit
                                ? homogeneity(c, cs)
                                : approx_homogeneity(c, cs, CrsParams::kTauSampleFraction,
                                                     mix_seed(seed, fnv1a(c.label)));
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::string per_cluster_table_csv(const std::vector<std::pair<std::string, MetricsReport>>& method_reports,
                                  const std::vector<ClusterDescriptor>& meta) {
    std::ostringstream out;
    out << "cluster,size,homogeneity,method,prototype_fraction,precision,recall\n";
    for (const ClusterDescriptor& d : meta) {
        for (const auto& [method, report] : method_reports) {
            const ClusterBuildInfo* info = nullptr;
            for (const auto& c : report.clusters)
                if (c.label == d.label) info = &c;
            const ClassMetrics* cm = nullptr;
            for (const auto& c : report.per_class)
                if (c.label == d.label) cm = &c;
            if (!info) continue;
            out << d.label << "," << d.size << "," << format_double(d.homogeneity) << "," << method << ",";
            out << format_double(info->train_size ? static_cast<double>(info->rep_count) /
                                                        static_cast<double>(info->train_size)
                                                  : 0.0);
            out << ",";
            if (cm && cm->precision) out << format_double(*cm->precision);
            else out << "NA";
            out << ",";
            if (cm && cm->recall) out << format_double(*cm->recall);
            else out << "NA";
            out << "\n";
        }
    }
    return out.str();
}

std::string per_class_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << "label,support,precision,recall\n";
    for (const auto& c : report.per_class) {
        out << c.label << "," << c.support << ",";
        if (c.precision) out << format_double(*c.precision);
        else out << "NA";
        out << ",";
        if (c.recall) out << format_double(*c.recall);
        else out << "NA";
        out << "\n";
    }
    return out.str();
}

std::string confusion_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << "true\\predicted";
    for (const auto& l : report.label_order) out << "," << l;
    out << "\n";
    for (std::size_t r = 0; r < report.confusion.size(); ++r) {
        out << report.label_order[r];
        for (std::size_t c = 0; c < report.confusion[r].size(); ++c) out << "," << report.confusion[r][c];
        out << "\n";
    }
    return out.str();
}

std::string report_json(const MetricsReport& report, const std::vector<std::pair<std::string, std::string>>& config,
                        bool include_timing) {
    nlohmann::json j;
    j["config"] = config_to_json(config);
    j["report"] = metrics_to_json(report, include_timing);
    return j.dump(2) + "\n";
}

std::string sweep_json(const std::vector<std::pair<int, MetricsReport>>& reports,
                       const std::vector<std::pair<std::string, std::string>>& config, bool include_timing) {
    nlohmann::json j;
    j["config"] = config_to_json(config);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, report] : reports) {
        nlohmann::json jk;
        jk["k"] = k;
        jk["report"] = metrics_to_json(report, include_timing);
        arr.push_back(std::move(jk));
    }
    j["sweep"] = std::move(arr);
    return j.dump(2) + "\n";
}

}  // namespace crs
