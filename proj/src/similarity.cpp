#include "crs/similarity.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crs/rng.hpp"

namespace crs {

namespace {

double cosine_dense_impl(const DenseVector& a, const DenseVector& b) {
    if (a.size() != b.size())
        throw DomainError("cosine: dense dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw DomainError("cosine: zero vector");
    // sqrt(na * nb) keeps s(x, x) == 1 exactly for identical inputs
    const double denom = na * nb > 0.0 ? std::sqrt(na * nb) : std::sqrt(na) * std::sqrt(nb);
    double v = dot / denom;
    if (v > 1.0) v = 1.0;
    if (v < -1.0) v = -1.0;
    return v;
}

double cosine_sparse_impl(const SparseVector& a, const SparseVector& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].index == b[j].index) {
            dot += a[i].value * b[j].value;
            ++i;
            ++j;
        } else if (a[i].index < b[j].index) {
            ++i;
        } else {
            ++j;
        }
    }
    for (const auto& e : a) na += e.value * e.value;
    for (const auto& e : b) nb += e.value * e.value;
    if (na == 0.0 || nb == 0.0) throw DomainError("cosine: zero vector");
    const double denom = na * nb > 0.0 ? std::sqrt(na * nb) : std::sqrt(na) * std::sqrt(nb);
    double v = dot / denom;
    if (v > 1.0) v = 1.0;
    if (v < -1.0) v = -1.0;
    return v;
}

}  // namespace

double cosine(const FeatureVector& a, const FeatureVector& b) {
    if (const auto* da = std::get_if<DenseVector>(&a)) {
        const auto* db = std::get_if<DenseVector>(&b);
        if (!db) throw TypeError("cosine: mixed payload kinds");
        return cosine_dense_impl(*da, *db);
    }
    if (const auto* sa = std::get_if<SparseVector>(&a)) {
        const auto* sb = std::get_if<SparseVector>(&b);
        if (!sb) throw TypeError("cosine: mixed payload kinds");
        return cosine_sparse_impl(*sa, *sb);
    }
    throw TypeError("cosine: opaque matrix handles carry no coordinates");
}

double rbf(const FeatureVector& a, const FeatureVector& b, double gamma) {
    const auto* da = std::get_if<DenseVector>(&a);
    const auto* db = std::get_if<DenseVector>(&b);
    if (!da || !db) throw TypeError("rbf: dense payloads required");
    if (da->size() != db->size()) throw DomainError("rbf: dense dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < da->size(); ++i) {
        const double d = (*da)[i] - (*db)[i];
        d2 += d * d;
    }
    return std::exp(-d2 / (2.0 * gamma * gamma));
}

const char* to_string(SimilarityKind k) {
    switch (k) {
        case SimilarityKind::CosineDense: return "cosine-dense";
        case SimilarityKind::CosineSparse: return "cosine-sparse";
        case SimilarityKind::RbfDense: return "rbf-dense";
        case SimilarityKind::MatrixLookup: return "matrix-lookup";
    }
    return "?";
}

SimilarityMeasure SimilarityMeasure::cosine_dense() {
    return SimilarityMeasure(SimilarityKind::CosineDense, 1.0, nullptr);
}
SimilarityMeasure SimilarityMeasure::cosine_sparse() {
    return SimilarityMeasure(SimilarityKind::CosineSparse, 1.0, nullptr);
}
SimilarityMeasure SimilarityMeasure::rbf_dense(double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("rbf_dense: gamma must be > 0");
    return SimilarityMeasure(SimilarityKind::RbfDense, gamma, nullptr);
}
SimilarityMeasure SimilarityMeasure::matrix_lookup(std::shared_ptr<const SimilarityMatrix> m) {
    if (!m) throw ConfigError("matrix_lookup: null matrix");
    return SimilarityMeasure(SimilarityKind::MatrixLookup, 1.0, std::move(m));
}

double SimilarityMeasure::operator()(const FeatureVector& a, const FeatureVector& b) const {
    switch (kind_) {
        case SimilarityKind::CosineDense:
        case SimilarityKind::CosineSparse:
            return cosine(a, b);
        case SimilarityKind::RbfDense:
            return rbf(a, b, gamma_);
        case SimilarityKind::MatrixLookup: {
            const auto* ha = std::get_if<MatrixHandle>(&a);
            const auto* hb = std::get_if<MatrixHandle>(&b);
            if (!ha || !hb) throw TypeError("matrix-lookup: opaque handles required");
            if (ha->row >= matrix_->n || hb->row >= matrix_->n) throw DomainError("matrix-lookup: row out of range");
            return matrix_->at(ha->row, hb->row);
        }
    }
    throw ConfigError("similarity: bad kind");
}

namespace {

std::size_t thread_slot() {
#ifdef _OPENMP
    return static_cast<std::size_t>(omp_get_thread_num()) & 63;
#else
    return 0;
#endif
}

}  // namespace

CountingSimilarity::CountingSimilarity(SimilarityMeasure measure, const LabeledDataset& ds)
    : measure_(std::move(measure)), ds_(&ds), shards_(kShardCount), external_counts_(64) {}

bool CountingSimilarity::Shard::lookup(std::uint64_t key, double& out) const {
    if (keys.empty()) return false;
    const std::size_t mask = keys.size() - 1;
    std::size_t slot = static_cast<std::size_t>(splitmix64(key)) & mask;
    while (keys[slot] != 0) {
        if (keys[slot] == key) {
            out = vals[slot];
            return true;
        }
        slot = (slot + 1) & mask;
    }
    return false;
}

void CountingSimilarity::Shard::insert(std::uint64_t key, double val) {
    if (keys.empty() || used * 10 >= keys.size() * 7) grow();
    const std::size_t mask = keys.size() - 1;
    std::size_t slot = static_cast<std::size_t>(splitmix64(key)) & mask;
    while (keys[slot] != 0) slot = (slot + 1) & mask;
    keys[slot] = key;
    vals[slot] = val;
    ++used;
}

void CountingSimilarity::Shard::grow() {
    const std::size_t cap = keys.empty() ? 64 : keys.size() * 2;
    std::vector<std::uint64_t> old_keys = std::move(keys);
    std::vector<double> old_vals = std::move(vals);
    keys.assign(cap, 0);
    vals.assign(cap, 0.0);
    const std::size_t mask = cap - 1;
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
        if (old_keys[i] == 0) continue;
        std::size_t slot = static_cast<std::size_t>(splitmix64(old_keys[i])) & mask;
        while (keys[slot] != 0) slot = (slot + 1) & mask;
        keys[slot] = old_keys[i];
        vals[slot] = old_vals[i];
    }
}

double CountingSimilarity::evaluate(ItemId i, ItemId j) {
    if (i == j) throw DomainError("evaluate: self-similarity requested for id " + std::to_string(i));
    if (i > j) std::swap(i, j);
    if (j >= ds_->size()) throw DomainError("evaluate: id " + std::to_string(j) + " out of range");
    const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | j;
    Shard& shard = shards_[splitmix64(key * 0x9e3779b97f4a7c15ULL) & (kShardCount - 1)];
    std::lock_guard<std::mutex> guard(shard.mu);
    double v = 0.0;
    if (shard.lookup(key, v)) return v;
    v = measure_(ds_->items[i], ds_->items[j]);
    shard.insert(key, v);
    shard.count.store(shard.count.load(std::memory_order_relaxed) + 1, std::memory_order_relaxed);
    return v;
}

void CountingSimilarity::evaluate_row(ItemId i, std::span<const ItemId> js, std::span<double> out) {
    if (out.size() != js.size()) throw ConfigError("evaluate_row: output size mismatch");
    const std::size_t len = js.size();
    // counting sort of pair positions by shard, then one lock per shard run
    thread_local std::vector<std::uint64_t> keys;
    thread_local std::vector<std::uint32_t> shard_of, order;
    thread_local std::vector<std::uint32_t> counts;
    keys.resize(len);
    shard_of.resize(len);
    order.resize(len);
    counts.assign(kShardCount + 1, 0);

    for (std::size_t m = 0; m < len; ++m) {
        ItemId a = i, b = js[m];
        if (a == b) throw DomainError("evaluate_row: self-similarity requested for id " + std::to_string(a));
        if (a > b) std::swap(a, b);
        if (b >= ds_->size()) throw DomainError("evaluate_row: id " + std::to_string(b) + " out of range");
        const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
        keys[m] = key;
        shard_of[m] = static_cast<std::uint32_t>(splitmix64(key * 0x9e3779b97f4a7c15ULL) & (kShardCount - 1));
        ++counts[shard_of[m] + 1];
    }
    for (std::size_t s = 0; s < kShardCount; ++s) counts[s + 1] += counts[s];
    for (std::size_t m = 0; m < len; ++m) order[counts[shard_of[m]]++] = static_cast<std::uint32_t>(m);

    std::size_t pos = 0;
    while (pos < len) {
        const std::uint32_t s = shard_of[order[pos]];
        std::size_t end = pos;
        while (end < len && shard_of[order[end]] == s) ++end;

        Shard& shard = shards_[s];
        std::lock_guard<std::mutex> guard(shard.mu);
        std::uint64_t fresh = 0;
        for (std::size_t p = pos; p < end; ++p) {
            const std::uint32_t m = order[p];
            double v = 0.0;
            if (!shard.lookup(keys[m], v)) {
                // canonical (lo, hi) argument order, same as evaluate()
                const ItemId lo = static_cast<ItemId>(keys[m] >> 32);
                const ItemId hi = static_cast<ItemId>(keys[m] & 0xffffffffu);
                v = measure_(ds_->items[lo], ds_->items[hi]);
                shard.insert(keys[m], v);
                ++fresh;
            }
            out[m] = v;
        }
        if (fresh) shard.count.store(shard.count.load(std::memory_order_relaxed) + fresh, std::memory_order_relaxed);
        pos = end;
    }
}

double CountingSimilarity::eval_external(const FeatureVector& q, ItemId r) {
    if (r >= ds_->size()) throw DomainError("eval_external: id " + std::to_string(r) + " out of range");
    const double v = measure_(q, ds_->items[r]);
    external_counts_[thread_slot()].v.fetch_add(1, std::memory_order_relaxed);
    return v;
}

std::uint64_t CountingSimilarity::count() const {
    std::uint64_t total = 0;
    for (const Shard& s : shards_) total += s.count.load(std::memory_order_relaxed);
    for (const CounterSlot& c : external_counts_) total += c.v.load(std::memory_order_relaxed);
    return total;
}

double CountingSimilarity::s_ratio(std::size_t n) const {
    if (n < 2) throw DomainError("s_ratio: n must be >= 2");
    const double full = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return static_cast<double>(count()) / full;
}

double s_ratio(const CountingSimilarity& cs, std::size_t n) { return cs.s_ratio(n); }

}  // namespace crs
