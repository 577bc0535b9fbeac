#include <doctest.h>

#include <thread>
#include <vector>

#include "crs/knn_graph.hpp"
#include "crs/similarity.hpp"
#include "test_util.hpp"

using namespace crs;

TEST_CASE("cosine on dense vectors") {
    const FeatureVector e1 = DenseVector{1, 0};
    const FeatureVector e2 = DenseVector{0, 1};
    const FeatureVector diag = DenseVector{1, 1};
    CHECK(cosine(e1, e2) == 0.0);
    CHECK(cosine(diag, diag) == 1.0);
    CHECK(cosine(diag, e1) == doctest::Approx(0.7071067811865475).epsilon(1e-15));
}

TEST_CASE("cosine on sparse vectors") {
    const FeatureVector a = SparseVector{{2, 0.5}, {7, 1.0}};
    const FeatureVector b = SparseVector{{2, 0.5}, {7, 1.0}};
    const FeatureVector c = SparseVector{{3, 4.0}};
    CHECK(cosine(a, b) == doctest::Approx(1.0));
    CHECK(cosine(a, c) == 0.0);
}

TEST_CASE("cosine error cases") {
    const FeatureVector zero = DenseVector{0, 0};
    const FeatureVector ok = DenseVector{1, 0};
    const FeatureVector sparse = SparseVector{{0, 1.0}};
    CHECK_THROWS_AS(cosine(zero, ok), DomainError);
    CHECK_THROWS_AS(cosine(ok, sparse), TypeError);
    CHECK_THROWS_AS(cosine(FeatureVector(MatrixHandle{0}), ok), TypeError);
}

TEST_CASE("rbf kernel is 1 at zero distance and decays") {
    const FeatureVector a = DenseVector{0, 0};
    const FeatureVector b = DenseVector{3, 4};
    CHECK(rbf(a, a, 1.0) == 1.0);
    CHECK(rbf(a, b, 1.0) == doctest::Approx(std::exp(-12.5)));
    CHECK_THROWS_AS(rbf(a, FeatureVector(SparseVector{{0, 1.0}}), 1.0), TypeError);
}

TEST_CASE("counting similarity caches unordered pairs") {
    const LabeledDataset ds =
        testutil::dataset_from_dense({{1, 0}, {0, 1}, {1, 1}}, {"a", "a", "a"});
    CountingSimilarity cs(SimilarityMeasure::cosine_dense(), ds);

    const double v01 = cs.evaluate(0, 1);
    CHECK(cs.count() == 1);
    CHECK(cs.evaluate(1, 0) == v01);  // cached, bit-identical, not recounted
    CHECK(cs.count() == 1);
    cs.evaluate(0, 2);
    CHECK(cs.count() == 2);
    CHECK_THROWS_AS(cs.evaluate(1, 1), DomainError);
}

TEST_CASE("s_ratio against the full matrix") {
    const LabeledDataset ds = testutil::dataset_from_dense({{1, 0}, {0, 1}}, {"a", "a"});
    CountingSimilarity cs(SimilarityMeasure::cosine_dense(), ds);
    CHECK(cs.s_ratio(100) == 0.0);
    cs.evaluate(0, 1);
    CHECK(cs.s_ratio(2) == 1.0);
    CHECK_THROWS_AS(cs.s_ratio(1), DomainError);
}

TEST_CASE("exact knn on 100 points evaluates every pair exactly once") {
    GaussianBlobsParams p;
    p.centers = {{0, 0}};
    p.per_blob = 100;
    p.sigma = 1.0;
    const LabeledDataset ds = gen_gaussian_blobs(p, 21);
    const Cluster all = testutil::whole_dataset_cluster(ds);
    CountingSimilarity cs(SimilarityMeasure::rbf_dense(1.0), ds);
    exact_knn_serial(all, cs, 5);
    CHECK(cs.count() == 4950);
    CHECK(cs.s_ratio(100) == 1.0);
}

TEST_CASE("matrix lookups are counted like any other evaluation") {
    auto fx = testutil::matrix_fixture({{1.0, 0.3}, {0.3, 1.0}}, {"a", "b"});
    CountingSimilarity cs(fx.measure, fx.ds);
    CHECK(cs.evaluate(0, 1) == 0.3);
    CHECK(cs.count() == 1);
}

TEST_CASE("concurrent evaluation counts each distinct pair once") {
    GaussianBlobsParams p;
    p.centers = {{0, 0}};
    p.per_blob = 60;
    p.sigma = 1.0;
    const LabeledDataset ds = gen_gaussian_blobs(p, 4);
    CountingSimilarity cs(SimilarityMeasure::rbf_dense(1.0), ds);

    // every thread walks all pairs; dedup must leave exactly C(60,2)
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&cs, n = ds.size()] {
            for (ItemId i = 0; i < n; ++i)
                for (ItemId j = i + 1; j < n; ++j) cs.evaluate(i, j);
        });
    }
    for (auto& t : threads) t.join();
    CHECK(cs.count() == 60 * 59 / 2);
}

TEST_CASE("symmetry holds bitwise through the cache") {
    crs::Rng rng(7);
    LabeledDataset ds;
    for (int i = 0; i < 12; ++i) {
        ds.items.emplace_back(DenseVector{rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1)});
        ds.labels.push_back("a");
        ds.source_ids.push_back(i);
    }
    CountingSimilarity cs(SimilarityMeasure::cosine_dense(), ds);
    for (ItemId i = 0; i < 12; ++i)
        for (ItemId j = 0; j < 12; ++j) {
            if (i == j) continue;
            CHECK(cs.evaluate(i, j) == cs.evaluate(j, i));
        }
    CHECK(cs.count() == 66);
}
