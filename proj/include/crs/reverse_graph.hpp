#pragma once

#include <cstdint>

#include "crs/knn_graph.hpp"
#include "crs/similarity.hpp"
#include "crs/types.hpp"

namespace crs {

// Reverse k-NN graph after threshold pruning. reverse[i] holds U_r for node
// r = ids[i]: every member x that listed r among its k nearest with
// s(x, r) >= tau. Lists sorted by descending weight then ascending id.
struct ReverseGraph {
    double tau = 0.0;
    std::vector<ItemId> ids;
    std::vector<std::vector<Neighbor>> reverse;

    std::size_t node_count() const { return ids.size(); }
};

// Mean pairwise similarity within the cluster, the ordered-pair mean
// 1/(|C|(|C|-1)) * sum_{i != j} s(x_i, x_j). All shipped measures are
// symmetric, so this is accumulated canonically as row sums over j > i
// (ascending) followed by an ascending sum over rows, doubled. The row-wise
// scheme also keeps the result identical for any worker count.
double homogeneity(const Cluster& cluster, CountingSimilarity& cs);
double homogeneity_serial(const Cluster& cluster, CountingSimilarity& cs);

// Homogeneity of a seeded uniform sample of max(2, ceil(fraction * |C|))
// members, computed exactly on the sample. fraction = 1 reproduces
// homogeneity() bit for bit.
double approx_homogeneity(const Cluster& cluster, CountingSimilarity& cs, double fraction, std::uint64_t seed);

// Reverses every forward edge and drops edges with weight < tau.
ReverseGraph reverse_and_prune(const KnnGraph& g, double tau);

}  // namespace crs
