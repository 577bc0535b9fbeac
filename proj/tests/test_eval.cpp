#include <doctest.h>

#include <sstream>

#include "crs/eval.hpp"
#include "test_util.hpp"

using namespace crs;

namespace {

LabeledDataset separable_blobs(std::size_t per_blob = 40) {
    GaussianBlobsParams p;
    p.centers = {{0, 0}, {6, 6}};
    p.per_blob = per_blob;
    p.sigma = 0.2;
    return gen_gaussian_blobs(p, 14);
}

}  // namespace

TEST_CASE("separable blobs evaluate perfectly under every method") {
    const LabeledDataset ds = separable_blobs();
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);
    EvalOptions opts;
    opts.test_fraction = 0.3;
    opts.seed = 2;

    for (Method method : {Method::Crs, Method::DeltaMedoids, Method::Random, Method::Full}) {
        MethodSpec spec;
        spec.method = method;
        spec.crs.k = 5;
        const MetricsReport r = run_eval(ds, m, spec, opts);
        CAPTURE(to_string(method));
        CHECK(r.macro_precision == 1.0);
        CHECK(r.macro_recall == 1.0);
        for (std::size_t i = 0; i < r.confusion.size(); ++i)
            for (std::size_t j = 0; j < r.confusion[i].size(); ++j)
                if (i != j) CHECK(r.confusion[i][j] == 0);
    }
}

TEST_CASE("full method: fraction 1, no build-phase similarity calls") {
    const LabeledDataset ds = separable_blobs();
    MethodSpec spec;
    spec.method = Method::Full;
    const MetricsReport r = run_eval(ds, SimilarityMeasure::rbf_dense(1.0), spec, EvalOptions{});
    CHECK(r.prototype_fraction == 1.0);
    CHECK(r.calls_build == 0);
    CHECK(r.s_ratio_build == 0.0);
}

TEST_CASE("report bookkeeping invariants") {
    const LabeledDataset ds = separable_blobs(30);
    MethodSpec spec;
    spec.method = Method::Crs;
    spec.crs.k = 4;
    const MetricsReport r = run_eval(ds, SimilarityMeasure::rbf_dense(1.0), spec, EvalOptions{});

    SUBCASE("confusion mass equals the test size") {
        std::size_t mass = 0;
        for (const auto& row : r.confusion)
            for (std::size_t v : row) mass += v;
        CHECK(mass == r.test_size);
    }
    SUBCASE("per-class supports equal confusion row sums") {
        for (std::size_t c = 0; c < r.per_class.size(); ++c) {
            std::size_t row = 0;
            for (std::size_t v : r.confusion[c]) row += v;
            CHECK(r.per_class[c].support == row);
        }
    }
    SUBCASE("classification cost is test size times representative count") {
        std::size_t reps = 0;
        for (const auto& c : r.clusters) reps += c.rep_count;
        CHECK(r.calls_classify == r.test_size * reps);
        CHECK(r.prototype_fraction == doctest::Approx(static_cast<double>(reps) / r.train_size));
    }
}

TEST_CASE("never-predicted classes are excluded from macro precision") {
    // two identical clusters; the one with lower ids wins every tie, so the
    // other is never predicted: its precision is undefined, recall is 0
    const LabeledDataset ds = testutil::dataset_from_dense(
        {{1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}},
        {"a", "a", "a", "a", "z", "z", "z", "z"});
    MethodSpec spec;
    spec.method = Method::Full;
    EvalOptions opts;
    opts.test_fraction = 0.25;
    opts.seed = 3;
    const MetricsReport r = run_eval(ds, SimilarityMeasure::rbf_dense(1.0), spec, opts);

    REQUIRE(r.per_class.size() == 2);
    CHECK(r.per_class[0].label == "a");
    CHECK(r.per_class[0].precision == 0.5);
    CHECK(!r.per_class[1].precision.has_value());
    CHECK(r.per_class[1].recall == 0.0);
    CHECK(r.macro_precision == 0.5);  // only class a counts
    CHECK(r.macro_recall == 0.5);     // (1 + 0) / 2
}

TEST_CASE("run_eval needs two clusters") {
    const LabeledDataset ds = testutil::dataset_from_dense({{1, 0}, {2, 0}, {0, 1}}, {"a", "a", "a"});
    MethodSpec spec;
    CHECK_THROWS_AS(run_eval(ds, SimilarityMeasure::rbf_dense(1.0), spec, EvalOptions{}), ConfigError);
}

TEST_CASE("sweep over one k equals run_eval") {
    const LabeledDataset ds = separable_blobs(30);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);
    MethodSpec spec;
    spec.method = Method::Crs;
    spec.crs.k = 7;
    const auto swept = sweep_k(ds, m, spec, {7}, EvalOptions{});
    REQUIRE(swept.size() == 1);
    CHECK(swept[0].first == 7);
    const MetricsReport direct = run_eval(ds, m, spec, EvalOptions{});
    CHECK(swept[0].second.prototype_fraction == direct.prototype_fraction);
    CHECK(swept[0].second.calls_build == direct.calls_build);
    CHECK(swept[0].second.confusion == direct.confusion);
}

TEST_CASE("sweep emits ascending k over one shared split") {
    const LabeledDataset ds = gen_two_spirals(TwoSpiralsParams{200, 0.05, 1.75}, 21);
    MethodSpec spec;
    spec.method = Method::Crs;
    const auto swept = sweep_k(ds, SimilarityMeasure::rbf_dense(1.0), spec, {15, 5, 10}, EvalOptions{});
    REQUIRE(swept.size() == 3);
    CHECK(swept[0].first == 5);
    CHECK(swept[2].first == 15);
    CHECK(swept[0].second.test_size == swept[2].second.test_size);
    CHECK(swept[0].second.prototype_fraction > swept[1].second.prototype_fraction);
    CHECK(swept[1].second.prototype_fraction > swept[2].second.prototype_fraction);
    CHECK(swept[0].second.calls_build <= swept[1].second.calls_build);
    CHECK(swept[1].second.calls_build <= swept[2].second.calls_build);

    SUBCASE("method must be crs") {
        MethodSpec full;
        full.method = Method::Full;
        CHECK_THROWS_AS(sweep_k(ds, SimilarityMeasure::rbf_dense(1.0), full, {5}, EvalOptions{}), ConfigError);
    }
    SUBCASE("ks must be valid") {
        CHECK_THROWS_AS(sweep_k(ds, SimilarityMeasure::rbf_dense(1.0), spec, {}, EvalOptions{}), ConfigError);
        CHECK_THROWS_AS(sweep_k(ds, SimilarityMeasure::rbf_dense(1.0), spec, {0}, EvalOptions{}), ConfigError);
    }
}

TEST_CASE("per-cluster table") {
    SUBCASE("no reports yields just the header") {
        const std::string csv = per_cluster_table_csv({}, {});
        CHECK(csv == "cluster,size,homogeneity,method,prototype_fraction,precision,recall\n");
    }
    SUBCASE("one cluster, one method") {
        MetricsReport r;
        r.clusters = {ClusterBuildInfo{"a", 10, 3, 0.5}};
        r.per_class = {ClassMetrics{"a", 0.9, 0.8, 5}};
        const std::string csv = per_cluster_table_csv({{"crs", r}}, {ClusterDescriptor{"a", 10, 0.62}});
        CHECK(csv.find("a,10,0.62,crs,0.3,0.9,0.8\n") != std::string::npos);
    }
}

TEST_CASE("homogeneity column reproduces construction targets on a matrix dataset") {
    // synthetic network-style input: 14 clusters with prescribed homogeneity
    const std::vector<double> target_h = {0.58, 0.14, 0.84, 0.64, 0.60, 0.92, 0.34,
                                          0.84, 0.69, 0.35, 0.78, 0.35, 0.79, 1.0};
    const std::vector<std::size_t> sizes = {108, 241, 8, 222, 35, 6, 25, 5, 5, 11, 22, 4, 4, 4};
    std::size_t n = 0;
    for (std::size_t s : sizes) n += s;

    auto matrix = std::make_shared<SimilarityMatrix>();
    matrix->n = n;
    matrix->values.assign(n * n, 0.05);
    LabeledDataset ds;
    ds.name = "network-like";
    std::size_t offset = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        for (std::size_t i = 0; i < sizes[c]; ++i) {
            for (std::size_t j = 0; j < sizes[c]; ++j)
                matrix->values[(offset + i) * n + (offset + j)] = i == j ? 1.0 : target_h[c];
            ds.items.emplace_back(MatrixHandle{static_cast<std::uint32_t>(offset + i)});
            ds.labels.push_back(std::string(1, static_cast<char>('A' + c)));
            ds.source_ids.push_back(static_cast<ItemId>(offset + i));
        }
        offset += sizes[c];
    }
    const SimilarityMeasure lookup = SimilarityMeasure::matrix_lookup(matrix);
    const auto meta = describe_clusters(ds, lookup, 1);
    REQUIRE(meta.size() == 14);
    for (std::size_t c = 0; c < meta.size(); ++c) {
        CHECK(meta[c].size == sizes[c]);
        CHECK(meta[c].homogeneity == doctest::Approx(target_h[c]).epsilon(0.02));
    }
}

TEST_CASE("report json embeds config and all metric fields") {
    const LabeledDataset ds = separable_blobs(20);
    MethodSpec spec;
    spec.method = Method::Random;
    spec.random_fraction = 0.2;
    const MetricsReport r = run_eval(ds, SimilarityMeasure::rbf_dense(1.0), spec, EvalOptions{});
    const std::string with_timing = report_json(r, {{"method", "random"}}, true);
    const std::string without = report_json(r, {{"method", "random"}}, false);
    CHECK(with_timing.find("wall_seconds") != std::string::npos);
    CHECK(without.find("wall_seconds") == std::string::npos);
    CHECK(without.find("\"method\": \"random\"") != std::string::npos);
    CHECK(without.find("prototype_fraction") != std::string::npos);
    CHECK(without.find("confusion") != std::string::npos);
}
