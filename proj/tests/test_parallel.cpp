#include <doctest.h>

#include <map>

#include "crs/eval.hpp"
#include "crs/knn_graph.hpp"
#include "crs/npc.hpp"
#include "crs/reverse_graph.hpp"
#include "test_util.hpp"

using namespace crs;

namespace {

LabeledDataset cloud(std::size_t n, std::uint64_t seed) {
    GaussianBlobsParams p;
    p.centers = {{0, 0}, {3, 0}, {0, 3}};
    p.per_blob = n / 3;
    p.sigma = 0.8;
    return gen_gaussian_blobs(p, seed);
}

}  // namespace

TEST_CASE("parallel exact knn equals the serial reference") {
    const LabeledDataset ds = cloud(240, 61);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);

    CountingSimilarity cs_serial(m, ds);
    const KnnGraph serial = exact_knn_serial(all, cs_serial, 8);

    testutil::ThreadGuard guard(4);
    CountingSimilarity cs_parallel(m, ds);
    const KnnGraph parallel = exact_knn(all, cs_parallel, 8);

    CHECK(serial.neighbors == parallel.neighbors);
    CHECK(cs_serial.count() == cs_parallel.count());
    CHECK(cs_parallel.count() == 240 * 239 / 2);
}

TEST_CASE("parallel homogeneity is bitwise identical to serial") {
    const LabeledDataset ds = cloud(150, 62);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);

    CountingSimilarity cs1(m, ds);
    const double serial = homogeneity_serial(all, cs1);
    testutil::ThreadGuard guard(4);
    CountingSimilarity cs2(m, ds);
    CHECK(homogeneity(all, cs2) == serial);
}

TEST_CASE("parallel batch classification equals the serial reference") {
    const LabeledDataset ds = cloud(120, 63);
    auto [train, test] = split_train_test(ds, 0.4, 7);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);
    std::vector<Prototype> protos;
    for (const Cluster& c : clusters_of(train)) protos.push_back(full_cluster(c));
    const PrototypeSet ps = PrototypeSet::build(train, std::move(protos));

    CountingSimilarity cs1(m, train);
    const auto serial = batch_classify_serial(test.items, ps, cs1);
    testutil::ThreadGuard guard(4);
    CountingSimilarity cs2(m, train);
    const auto parallel = batch_classify(test.items, ps, cs2);

    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].label == parallel[i].label);
        CHECK(serial[i].best_rep == parallel[i].best_rep);
        CHECK(serial[i].best_sim == parallel[i].best_sim);
    }
    CHECK(cs1.count() == cs2.count());
}

TEST_CASE("nn-descent under parallel workers keeps all graph invariants") {
    const LabeledDataset ds = cloud(300, 64);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);

    testutil::ThreadGuard guard(4);
    NnDescentParams params;
    params.k = 8;
    params.seed = 3;
    CountingSimilarity cs(m, ds);
    const KnnGraph g = nn_descent(all, cs, params);

    CountingSimilarity cs_exact(m, ds);
    const KnnGraph exact = exact_knn_serial(all, cs_exact, 8);
    CHECK(graph_recall(g, exact) >= 0.8);

    for (std::size_t v = 0; v < g.node_count(); ++v) {
        REQUIRE(g.neighbors[v].size() == 8);
        std::map<ItemId, int> seen;
        double prev = 2.0;
        for (const Neighbor& nb : g.neighbors[v]) {
            CHECK(nb.id != g.ids[v]);
            CHECK(++seen[nb.id] == 1);
            CHECK(nb.weight <= prev);
            prev = nb.weight;
            CHECK(nb.weight == cs.evaluate(g.ids[v], nb.id));
        }
    }
}

TEST_CASE("parallel eval produces the same report as serial eval") {
    const LabeledDataset ds = cloud(180, 65);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);
    MethodSpec spec;
    spec.method = Method::Crs;
    spec.crs.k = 5;
    spec.crs.graph_mode = GraphMode::Exact;  // unique graph, so workers cannot matter
    EvalOptions opts;
    opts.seed = 11;

    const MetricsReport serial = run_eval(ds, m, spec, opts);
    testutil::ThreadGuard guard(4);
    const MetricsReport parallel = run_eval(ds, m, spec, opts);
    CHECK(serial.confusion == parallel.confusion);
    CHECK(serial.prototype_fraction == parallel.prototype_fraction);
    CHECK(serial.calls_build == parallel.calls_build);
    CHECK(serial.calls_classify == parallel.calls_classify);
}
