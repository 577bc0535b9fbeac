// Benchmark of the OpenMP kernels against their serial reference
// implementations: exact k-NN construction, NN-Descent, homogeneity, and
// batch classification. Where the result is unique (exact graph, homogeneity,
// classification) the two paths are also checked for equality.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "crs/baselines.hpp"
#include "crs/crs_select.hpp"
#include "crs/dataset.hpp"
#include "crs/knn_graph.hpp"
#include "crs/npc.hpp"
#include "crs/reverse_graph.hpp"
#include "crs/rng.hpp"

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

template <typename F>
double timed(F&& f) {
    const double t0 = now_seconds();
    f();
    return now_seconds() - t0;
}

crs::LabeledDataset make_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
    crs::LabeledDataset ds;
    ds.name = "bench-cloud";
    crs::Rng rng(seed);
    const std::size_t blobs = 4;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t b = i % blobs;
        crs::DenseVector v(d);
        for (std::size_t j = 0; j < d; ++j) v[j] = (b == j % blobs ? 3.0 : 0.0) + rng.normal(0.0, 1.0);
        ds.items.emplace_back(std::move(v));
        ds.labels.push_back("c" + std::to_string(b));
        ds.source_ids.push_back(static_cast<crs::ItemId>(i));
    }
    return ds;
}

void set_threads(int t) {
#ifdef _OPENMP
    omp_set_num_threads(t);
#endif
    (void)t;
}

void report(const char* name, double serial, double parallel, const char* check) {
    std::printf("%-24s %10.3fs %12.3fs %8.2fx   %s\n", name, serial, parallel,
                parallel > 0 ? serial / parallel : 0.0, check);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    std::size_t n = 4000, d = 16;
    int k = 10, threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--n", n, "points")->capture_default_str();
    app.add_option("--d", d, "dimensions")->capture_default_str();
    app.add_option("--k", k, "neighbors")->capture_default_str();
    app.add_option("--threads", threads, "parallel thread count (0 = hardware)")->capture_default_str();
    app.add_option("--seed", seed, "seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#else
    threads = 1;
#endif

    const crs::LabeledDataset ds = make_cloud(n, d, seed);
    crs::Cluster all{"all", {}};
    all.member_ids.resize(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) all.member_ids[i] = static_cast<crs::ItemId>(i);
    const crs::SimilarityMeasure measure = crs::SimilarityMeasure::rbf_dense(2.0);

    std::printf("n=%zu d=%zu k=%d threads=%d\n", n, d, k, threads);
    std::printf("%-24s %11s %13s %9s   %s\n", "kernel", "serial", "parallel", "speedup", "result");

    // exact k-NN
    crs::KnnGraph exact_s, exact_p;
    set_threads(1);
    crs::CountingSimilarity cs1(measure, ds);
    const double t_exact_s = timed([&] { exact_s = crs::exact_knn_serial(all, cs1, k); });
    set_threads(threads);
    crs::CountingSimilarity cs2(measure, ds);
    const double t_exact_p = timed([&] { exact_p = crs::exact_knn(all, cs2, k); });
    bool same = exact_s.neighbors == exact_p.neighbors;
    report("exact-knn", t_exact_s, t_exact_p, same ? "identical" : "MISMATCH");

    // nn-descent (results differ across thread counts; recall is the check)
    crs::NnDescentParams nn;
    nn.k = k;
    nn.seed = seed;
    crs::KnnGraph approx_s, approx_p;
    set_threads(1);
    crs::CountingSimilarity cs3(measure, ds);
    const double t_nnd_s = timed([&] { approx_s = crs::nn_descent(all, cs3, nn); });
    set_threads(threads);
    crs::CountingSimilarity cs4(measure, ds);
    const double t_nnd_p = timed([&] { approx_p = crs::nn_descent(all, cs4, nn); });
    char recall_buf[64];
    std::snprintf(recall_buf, sizeof(recall_buf), "recall %.3f / %.3f", crs::graph_recall(approx_s, exact_s),
                  crs::graph_recall(approx_p, exact_s));
    report("nn-descent", t_nnd_s, t_nnd_p, recall_buf);

    // homogeneity
    double h_s = 0.0, h_p = 0.0;
    set_threads(1);
    crs::CountingSimilarity cs5(measure, ds);
    const double t_h_s = timed([&] { h_s = crs::homogeneity_serial(all, cs5); });
    set_threads(threads);
    crs::CountingSimilarity cs6(measure, ds);
    const double t_h_p = timed([&] { h_p = crs::homogeneity(all, cs6); });
    report("homogeneity", t_h_s, t_h_p, h_s == h_p ? "identical" : "MISMATCH");

    // batch classification against a full prototype set
    std::vector<crs::Prototype> protos;
    for (const auto& c : crs::clusters_of(ds)) protos.push_back(crs::full_cluster(c));
    const crs::PrototypeSet ps = crs::PrototypeSet::build(ds, std::move(protos));
    std::vector<crs::Classification> out_s, out_p;
    set_threads(1);
    crs::CountingSimilarity cs7(measure, ds);
    const double t_c_s = timed([&] { out_s = crs::batch_classify_serial(ds.items, ps, cs7); });
    set_threads(threads);
    crs::CountingSimilarity cs8(measure, ds);
    const double t_c_p = timed([&] { out_p = crs::batch_classify(ds.items, ps, cs8); });
    same = true;
    for (std::size_t i = 0; i < out_s.size(); ++i)
        if (out_s[i].label != out_p[i].label || out_s[i].best_rep != out_p[i].best_rep) same = false;
    report("batch-classify", t_c_s, t_c_p, same ? "identical" : "MISMATCH");

    return 0;
}
