#pragma once

#include <cstdint>
#include <vector>

#include "crs/crs_select.hpp"
#include "crs/similarity.hpp"
#include "crs/types.hpp"

namespace crs {

struct DeltaMedoidsParams {
    double delta = 0.0;  // similarity threshold for neighbourhood membership
    int max_refine_iters = 20;
};

// Semi-greedy delta-neighbourhood cover with medoid refinement:
//   pass 1   scan members in id order, assign each to the most similar
//            existing representative with s(x, r) >= delta (ties lowest id),
//            else promote it;
//   refine   replace each representative by its assignment set's medoid (the
//            member with the largest total within-set similarity, summed in
//            ascending member order, ties lowest id), then rerun the
//            assignment scan (which may promote); repeat until the
//            representative set is stable or max_refine_iters.
// Every member ends delta-covered or is itself a representative.
// objective_trace, when given, receives sum_x (x is rep ? 1 : s(x, rep(x)))
// after each refinement iteration; for measures bounded by 1 the sequence
// never decreases.
Prototype delta_medoids(const Cluster& cluster, CountingSimilarity& cs, const DeltaMedoidsParams& params,
                        std::vector<double>* objective_trace = nullptr);

// max(1, round(fraction * |C|)) members sampled uniformly without
// replacement, deterministic under seed.
Prototype random_fraction(const Cluster& cluster, double fraction, std::uint64_t seed);

// The whole cluster as its own prototype; NPC over full prototypes is plain
// 1-NN classification against the training set.
Prototype full_cluster(const Cluster& cluster);

}  // namespace crs
