#include "crs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crs/rng.hpp"

namespace crs {

namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

// Assignment scan in member order: attach each member to the most similar
// current representative at or above delta (ties to the lowest rep id),
// promoting the member when none qualifies. Returns true when the
// representative roster changed.
bool assign_pass(const Cluster& cluster, CountingSimilarity& cs, double delta, std::vector<std::uint32_t>& rep_slots,
                 std::vector<std::uint32_t>& assignment) {
    const std::size_t n = cluster.size();
    std::vector<bool> is_rep(n, false);
    for (std::uint32_t r : rep_slots) is_rep[r] = true;

    bool changed = false;
    for (std::uint32_t x = 0; x < n; ++x) {
        if (is_rep[x]) {
            assignment[x] = x;
            continue;
        }
        std::uint32_t best = kUnassigned;
        double best_sim = -std::numeric_limits<double>::infinity();
        for (std::uint32_t r : rep_slots) {  // roster order == ascending promotion id within a pass
            if (r == x) continue;
            const double s = cs.evaluate(cluster.member_ids[x], cluster.member_ids[r]);
            if (s >= delta && (best == kUnassigned || s > best_sim ||
                               (s == best_sim && cluster.member_ids[r] < cluster.member_ids[best]))) {
                best = r;
                best_sim = s;
            }
        }
        if (best == kUnassigned) {
            rep_slots.push_back(x);
            is_rep[x] = true;
            assignment[x] = x;
            changed = true;
        } else {
            assignment[x] = best;
        }
    }
    return changed;
}

double objective(const Cluster& cluster, CountingSimilarity& cs, const std::vector<std::uint32_t>& assignment) {
    double total = 0.0;
    for (std::uint32_t x = 0; x < assignment.size(); ++x)
        total += assignment[x] == x ? 1.0 : cs.evaluate(cluster.member_ids[x], cluster.member_ids[assignment[x]]);
    return total;
}

}  // namespace

Prototype delta_medoids(const Cluster& cluster, CountingSimilarity& cs, const DeltaMedoidsParams& params,
                        std::vector<double>* objective_trace) {
    if (!std::isfinite(params.delta)) throw ConfigError("delta_medoids: delta must be finite");
    if (params.max_refine_iters < 0) throw ConfigError("delta_medoids: max_refine_iters must be >= 0");
    if (cluster.size() == 0) throw DomainError("delta_medoids: empty cluster");

    const std::size_t n = cluster.size();
    std::vector<std::uint32_t> rep_slots;   // local indices, promotion order
    std::vector<std::uint32_t> assignment(n, kUnassigned);

    // pass 1: semi-greedy cover
    assign_pass(cluster, cs, params.delta, rep_slots, assignment);

    for (int iter = 0; iter < params.max_refine_iters; ++iter) {
        bool changed = false;

        // medoid step: each representative becomes the member of its
        // assignment set with maximal total within-set similarity
        for (std::uint32_t& r : rep_slots) {
            std::vector<std::uint32_t> set;
            for (std::uint32_t x = 0; x < n; ++x)
                if (assignment[x] == r) set.push_back(x);
            if (set.size() <= 1) continue;
            std::uint32_t medoid = r;
            double best_total = -std::numeric_limits<double>::infinity();
            for (std::uint32_t m : set) {
                double total = 0.0;
                for (std::uint32_t y : set)  // ascending member order
                    if (y != m) total += cs.evaluate(cluster.member_ids[m], cluster.member_ids[y]);
                if (total > best_total) {  // first (lowest id) wins ties
                    best_total = total;
                    medoid = m;
                }
            }
            if (medoid != r) {
                for (std::uint32_t x = 0; x < n; ++x)
                    if (assignment[x] == r) assignment[x] = medoid;
                r = medoid;
                changed = true;
            }
        }

        if (assign_pass(cluster, cs, params.delta, rep_slots, assignment)) changed = true;
        if (objective_trace) objective_trace->push_back(objective(cluster, cs, assignment));
        if (!changed) break;
    }

    Prototype proto;
    proto.cluster_label = cluster.label;
    proto.covered_fraction = 1.0;
    proto.tau = params.delta;
    proto.epsilon = 0.0;
    proto.k = 0;
    proto.representatives.reserve(rep_slots.size());
    for (std::uint32_t r : rep_slots) proto.representatives.push_back(cluster.member_ids[r]);
    return proto;
}

Prototype random_fraction(const Cluster& cluster, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("random_fraction: fraction must be in (0,1]");
    if (cluster.size() == 0) throw DomainError("random_fraction: empty cluster");
    const std::size_t n = cluster.size();
    std::size_t m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    m = std::clamp<std::size_t>(std::max<std::size_t>(m, 1), 1, n);

    Rng rng(mix_seed(seed, fnv1a("random-fraction")));
    auto picks = sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m), rng);

    Prototype proto;
    proto.cluster_label = cluster.label;
    proto.covered_fraction = static_cast<double>(m) / static_cast<double>(n);
    proto.tau = std::numeric_limits<double>::quiet_NaN();
    proto.seed = seed;
    proto.representatives.reserve(m);
    for (std::uint32_t p : picks) proto.representatives.push_back(cluster.member_ids[p]);
    return proto;
}

Prototype full_cluster(const Cluster& cluster) {
    if (cluster.size() == 0) throw DomainError("full_cluster: empty cluster");
    Prototype proto;
    proto.cluster_label = cluster.label;
    proto.representatives = cluster.member_ids;
    proto.covered_fraction = 1.0;
    proto.tau = std::numeric_limits<double>::quiet_NaN();
    return proto;
}

}  // namespace crs
