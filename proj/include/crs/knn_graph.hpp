#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "crs/similarity.hpp"
#include "crs/types.hpp"

namespace crs {

struct Neighbor {
    ItemId id;
    double weight;  // similarity to the owning node

    bool operator==(const Neighbor&) const = default;
};

// neighbor ordering used throughout: higher similarity first, then lower id
inline bool neighbor_before(const Neighbor& a, const Neighbor& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.id < b.id;
}

// Directed k-NN graph over one cluster. Node i owns ids[i] (ascending member
// order) and lists its min(k, n-1) most similar cluster members, sorted by
// descending weight then ascending id. No self-loops, no duplicates; every
// stored weight is the cached similarity value.
struct KnnGraph {
    int k = 0;
    std::vector<ItemId> ids;
    std::vector<std::vector<Neighbor>> neighbors;

    std::size_t node_count() const { return ids.size(); }
};

struct NnDescentParams {
    int k = 10;
    double rho = 0.7;         // reverse-neighbor sample rate
    double delta_nn = 0.001;  // terminate when updates < delta_nn * n * k
    std::uint64_t seed = 42;
    int max_iters = 30;  // safety cap; delta_nn normally stops much earlier

    // test hook: called with a snapshot after every completed iteration
    std::function<void(const KnnGraph&)> on_iteration;
};

// Brute-force k-NN over all unordered pairs; the serial reference. Exactly
// n(n-1)/2 counter increments on a fresh counter.
KnnGraph exact_knn_serial(const Cluster& cluster, CountingSimilarity& cs, int k);

// Same result as exact_knn_serial (the exact graph is unique), OpenMP over rows.
KnnGraph exact_knn(const Cluster& cluster, CountingSimilarity& cs, int k);

// Iterative approximate k-NN graph construction: seeded random lists refined
// by local joins among each node's new/old forward and sampled reverse
// neighbors until fewer than delta_nn * n * k list updates happen in an
// iteration. Falls back to exact_knn when n <= k + 1. Deterministic for a
// fixed seed under single-threaded execution.
KnnGraph nn_descent(const Cluster& cluster, CountingSimilarity& cs, const NnDescentParams& params);

// Mean over nodes of |approx list ∩ exact list| / list length.
double graph_recall(const KnnGraph& approx, const KnnGraph& exact);

// Debug/golden dump: one line per node, "id: nbr:weight nbr:weight ...".
std::string dump_graph(const KnnGraph& g);

}  // namespace crs
