#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "crs/dataset.hpp"
#include "crs/types.hpp"

namespace crs {

// Cosine of the angle between two payloads of the same kind.
// Throws DomainError on a zero vector and TypeError on mixed payload kinds.
double cosine(const FeatureVector& a, const FeatureVector& b);

// Gaussian kernel exp(-||a-b||^2 / (2 gamma^2)) for dense payloads.
double rbf(const FeatureVector& a, const FeatureVector& b, double gamma);

enum class SimilarityKind { CosineDense, CosineSparse, RbfDense, MatrixLookup };

const char* to_string(SimilarityKind k);

// Total, deterministic pairwise similarity on feature payloads. All shipped
// kinds are symmetric; cosine and rbf are bounded by 1 with s(x,x) = 1.
class SimilarityMeasure {
public:
    static SimilarityMeasure cosine_dense();
    static SimilarityMeasure cosine_sparse();
    static SimilarityMeasure rbf_dense(double gamma);
    static SimilarityMeasure matrix_lookup(std::shared_ptr<const SimilarityMatrix> m);

    double operator()(const FeatureVector& a, const FeatureVector& b) const;

    SimilarityKind kind() const { return kind_; }
    double rbf_gamma() const { return gamma_; }

private:
    SimilarityMeasure(SimilarityKind kind, double gamma, std::shared_ptr<const SimilarityMatrix> m)
        : kind_(kind), gamma_(gamma), matrix_(std::move(m)) {}

    SimilarityKind kind_;
    double gamma_ = 1.0;
    std::shared_ptr<const SimilarityMatrix> matrix_;
};

// Instrumented similarity over one dataset. evaluate() memoizes unordered id
// pairs and counts exactly one evaluation per distinct pair, which bounds the
// cost ratio by 1 and makes cached re-queries free. Shards are mutex
// protected so graph-construction workers can share one instance; the final
// count equals the number of distinct pairs regardless of interleaving.
//
// Counting is distributed: cached evaluations bump a per-shard counter under
// the shard lock and external ones a per-thread slot, so workers never
// contend on a shared counter line. count() is exact at quiescence.
class CountingSimilarity {
public:
    CountingSimilarity(SimilarityMeasure measure, const LabeledDataset& ds);

    // Cached unordered-pair evaluation; i == j is a DomainError.
    double evaluate(ItemId i, ItemId j);

    // Bulk form of evaluate() for one row of pairs: out[m] = s(i, js[m]).
    // Identical semantics and counting, but cache traffic is grouped so each
    // shard is locked once per call instead of once per pair.
    void evaluate_row(ItemId i, std::span<const ItemId> js, std::span<double> out);

    // One-shot query-vs-item evaluation; counted, never cached.
    double eval_external(const FeatureVector& q, ItemId r);

    std::uint64_t count() const;

    // count / (n(n-1)/2): cost relative to a full unordered similarity matrix.
    double s_ratio(std::size_t n) const;

    const SimilarityMeasure& measure() const { return measure_; }
    const LabeledDataset& dataset() const { return *ds_; }

private:
    // Open-addressing map from packed pair key to similarity value. Each
    // shard is padded to its own cache line; adjacent shards would otherwise
    // bounce a shared line between workers on every lock.
    struct alignas(128) Shard {
        std::mutex mu;
        std::vector<std::uint64_t> keys;  // 0 = empty slot
        std::vector<double> vals;
        std::size_t used = 0;
        std::atomic<std::uint64_t> count{0};  // written under mu, read lock-free

        bool lookup(std::uint64_t key, double& out) const;
        void insert(std::uint64_t key, double val);
        void grow();
    };

    struct alignas(128) CounterSlot {
        std::atomic<std::uint64_t> v{0};
    };

    static constexpr std::size_t kShardCount = 256;

    SimilarityMeasure measure_;
    const LabeledDataset* ds_;
    std::vector<Shard> shards_;
    std::vector<CounterSlot> external_counts_;
};

double s_ratio(const CountingSimilarity& cs, std::size_t n);

}  // namespace crs
