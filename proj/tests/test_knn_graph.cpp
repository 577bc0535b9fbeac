#include <doctest.h>

#include <map>

#include "crs/knn_graph.hpp"
#include "test_util.hpp"

using namespace crs;

TEST_CASE("exact knn picks true top neighbors") {
    // s(0,1)=0.9, s(0,2)=0.1, s(1,2)=0.5
    auto fx = testutil::matrix_fixture({{1, 0.9, 0.1}, {0.9, 1, 0.5}, {0.1, 0.5, 1}}, {"a", "a", "a"});
    const Cluster all = testutil::whole_dataset_cluster(fx.ds);
    CountingSimilarity cs(fx.measure, fx.ds);
    const KnnGraph g = exact_knn_serial(all, cs, 1);
    REQUIRE(g.node_count() == 3);
    CHECK(g.neighbors[0] == std::vector<Neighbor>{{1, 0.9}});
    CHECK(g.neighbors[1] == std::vector<Neighbor>{{0, 0.9}});
    CHECK(g.neighbors[2] == std::vector<Neighbor>{{1, 0.5}});
}

TEST_CASE("exact knn saturates at k >= n-1") {
    auto fx = testutil::matrix_fixture({{1, 0.9, 0.1}, {0.9, 1, 0.5}, {0.1, 0.5, 1}}, {"a", "a", "a"});
    const Cluster all = testutil::whole_dataset_cluster(fx.ds);
    CountingSimilarity cs(fx.measure, fx.ds);
    const KnnGraph g = exact_knn_serial(all, cs, 10);
    for (const auto& list : g.neighbors) CHECK(list.size() == 2);
}

TEST_CASE("exact knn breaks similarity ties by lowest id") {
    auto fx = testutil::matrix_fixture({{1, 0.5, 0.5}, {0.5, 1, 0.2}, {0.5, 0.2, 1}}, {"a", "a", "a"});
    const Cluster all = testutil::whole_dataset_cluster(fx.ds);
    CountingSimilarity cs(fx.measure, fx.ds);
    const KnnGraph g = exact_knn_serial(all, cs, 1);
    CHECK(g.neighbors[0] == std::vector<Neighbor>{{1, 0.5}});
}

TEST_CASE("exact knn rejects degenerate input") {
    auto fx = testutil::matrix_fixture({{1.0}}, {"a"});
    const Cluster all = testutil::whole_dataset_cluster(fx.ds);
    CountingSimilarity cs(fx.measure, fx.ds);
    CHECK_THROWS_AS(exact_knn_serial(all, cs, 1), DomainError);
    auto fx2 = testutil::matrix_fixture({{1, 0.5}, {0.5, 1}}, {"a", "a"});
    const Cluster all2 = testutil::whole_dataset_cluster(fx2.ds);
    CountingSimilarity cs2(fx2.measure, fx2.ds);
    CHECK_THROWS_AS(exact_knn_serial(all2, cs2, 0), ConfigError);
}

namespace {

LabeledDataset blob_cloud(std::size_t n, std::uint64_t seed) {
    GaussianBlobsParams p;
    p.centers = {{0, 0}, {4, 0}, {0, 4}, {4, 4}};
    p.per_blob = n / 4;
    p.sigma = 0.6;
    return gen_gaussian_blobs(p, seed);
}

}  // namespace

TEST_CASE("nn-descent delegates to exact when the graph saturates") {
    const LabeledDataset ds = blob_cloud(12, 3);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);

    NnDescentParams params;
    params.k = 11;
    params.seed = 5;
    CountingSimilarity cs1(m, ds);
    const KnnGraph approx = nn_descent(all, cs1, params);
    CountingSimilarity cs2(m, ds);
    const KnnGraph exact = exact_knn_serial(all, cs2, 11);
    CHECK(approx.neighbors == exact.neighbors);
    CHECK(graph_recall(approx, exact) == 1.0);
}

TEST_CASE("nn-descent is deterministic under a fixed seed") {
    const LabeledDataset ds = blob_cloud(200, 17);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);
    NnDescentParams params;
    params.k = 8;
    params.seed = 123;

    CountingSimilarity cs1(m, ds);
    CountingSimilarity cs2(m, ds);
    const KnnGraph a = nn_descent(all, cs1, params);
    const KnnGraph b = nn_descent(all, cs2, params);
    CHECK(a.neighbors == b.neighbors);
    CHECK(cs1.count() == cs2.count());
}

TEST_CASE("nn-descent approximates the exact graph well") {
    const LabeledDataset ds = blob_cloud(400, 29);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    const SimilarityMeasure m = SimilarityMeasure::rbf_dense(1.0);

    NnDescentParams params;
    params.k = 10;
    params.seed = 7;
    CountingSimilarity cs1(m, ds);
    const KnnGraph approx = nn_descent(all, cs1, params);
    CountingSimilarity cs2(m, ds);
    const KnnGraph exact = exact_knn(all, cs2, 10);
    CHECK(graph_recall(approx, exact) >= 0.85);
    // cache-bounded: never more work than the full matrix
    CHECK(cs1.count() <= 400 * 399 / 2);
}

TEST_CASE("nn-descent never worsens a node's worst neighbor") {
    const LabeledDataset ds = blob_cloud(200, 41);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    NnDescentParams params;
    params.k = 6;
    params.seed = 9;

    std::vector<std::vector<double>> worst_per_iter;
    params.on_iteration = [&](const KnnGraph& g) {
        std::vector<double> worst(g.node_count());
        for (std::size_t v = 0; v < g.node_count(); ++v) worst[v] = g.neighbors[v].back().weight;
        worst_per_iter.push_back(std::move(worst));
    };
    CountingSimilarity cs(SimilarityMeasure::rbf_dense(1.0), ds);
    nn_descent(all, cs, params);
    REQUIRE(worst_per_iter.size() >= 2);
    for (std::size_t it = 1; it < worst_per_iter.size(); ++it)
        for (std::size_t v = 0; v < worst_per_iter[it].size(); ++v)
            CHECK(worst_per_iter[it][v] >= worst_per_iter[it - 1][v]);
}

TEST_CASE("nn-descent lists carry true cached weights and no self loops") {
    const LabeledDataset ds = blob_cloud(120, 53);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    CountingSimilarity cs(SimilarityMeasure::rbf_dense(1.0), ds);
    NnDescentParams params;
    params.k = 5;
    const KnnGraph g = nn_descent(all, cs, params);
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        std::map<ItemId, int> seen;
        for (const Neighbor& nb : g.neighbors[v]) {
            CHECK(nb.id != g.ids[v]);
            CHECK(++seen[nb.id] == 1);
            CHECK(nb.weight == cs.evaluate(g.ids[v], nb.id));
        }
        CHECK(g.neighbors[v].size() == 5);
    }
}

TEST_CASE("graph recall") {
    KnnGraph exact, approx;
    exact.k = approx.k = 2;
    exact.ids = approx.ids = {0, 1};
    exact.neighbors = {{{1, 0.9}, {2, 0.8}}, {{0, 0.9}, {2, 0.7}}};
    approx.neighbors = {{{1, 0.9}, {3, 0.5}}, {{0, 0.9}, {2, 0.7}}};

    SUBCASE("identity") { CHECK(graph_recall(exact, exact) == 1.0); }
    SUBCASE("half and full average to 0.75") { CHECK(graph_recall(approx, exact) == 0.75); }
    SUBCASE("disjoint lists") {
        KnnGraph none = approx;
        none.neighbors = {{{4, 0.1}, {5, 0.1}}, {{4, 0.1}, {5, 0.1}}};
        CHECK(graph_recall(none, exact) == 0.0);
    }
    SUBCASE("mismatched node sets") {
        KnnGraph other = exact;
        other.ids = {0, 2};
        CHECK_THROWS_AS(graph_recall(other, exact), DomainError);
    }
}

TEST_CASE("graph dump format") {
    KnnGraph g;
    g.k = 1;
    g.ids = {3, 9};
    g.neighbors = {{{9, 0.5}}, {{3, 0.5}}};
    CHECK(dump_graph(g) == "3: 9:0.5\n9: 3:0.5\n");
}
