#include "crs/reverse_graph.hpp"

#include <algorithm>
#include <cmath>

#include "crs/rng.hpp"
#include "omp_error.hpp"

namespace crs {

namespace {

// Canonical accumulation over explicit member ids: per-row sums over later
// members, rows summed in ascending order. Shared by the exact and sampled
// paths so that a full sample reproduces the exact value bit for bit.
double pair_mean(const std::vector<ItemId>& ids, CountingSimilarity& cs, bool parallel) {
    const std::size_t n = ids.size();
    std::vector<double> row(n - 1, 0.0);
    if (parallel) {
        detail::OmpErrorCollector errors;
#pragma omp parallel
        {
            std::vector<double> sims(n - 1);
#pragma omp for schedule(dynamic, 4)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(n) - 1; ++i) {
                errors.run([&] {
                    const std::size_t len = n - 1 - static_cast<std::size_t>(i);
                    std::span<double> out(sims.data(), len);
                    cs.evaluate_row(ids[i], std::span<const ItemId>(ids.data() + i + 1, len), out);
                    double sum = 0.0;
                    for (double v : out) sum += v;
                    row[i] = sum;
                });
            }
        }
        errors.rethrow_if_failed();
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) sum += cs.evaluate(ids[i], ids[j]);
            row[i] = sum;
        }
    }
    double total = 0.0;
    for (double r : row) total += r;
    return 2.0 * total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace

double homogeneity(const Cluster& cluster, CountingSimilarity& cs) {
    if (cluster.size() < 2) throw DomainError("homogeneity: cluster '" + cluster.label + "' has fewer than 2 members");
    return pair_mean(cluster.member_ids, cs, true);
}

double homogeneity_serial(const Cluster& cluster, CountingSimilarity& cs) {
    if (cluster.size() < 2) throw DomainError("homogeneity: cluster '" + cluster.label + "' has fewer than 2 members");
    return pair_mean(cluster.member_ids, cs, false);
}

double approx_homogeneity(const Cluster& cluster, CountingSimilarity& cs, double fraction, std::uint64_t seed) {
    if (cluster.size() < 2) throw DomainError("approx_homogeneity: cluster '" + cluster.label + "' has fewer than 2 members");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("approx_homogeneity: fraction must be in (0,1]");
    const std::size_t n = cluster.size();
    std::size_t m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    m = std::clamp<std::size_t>(std::max<std::size_t>(m, 2), 2, n);

    Rng rng(mix_seed(seed, fnv1a("approx-homogeneity")));
    auto picks = sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m), rng);
    std::sort(picks.begin(), picks.end());
    std::vector<ItemId> sample_ids;
    sample_ids.reserve(m);
    for (std::uint32_t p : picks) sample_ids.push_back(cluster.member_ids[p]);
    return pair_mean(sample_ids, cs, false);
}

ReverseGraph reverse_and_prune(const KnnGraph& g, double tau) {
    ReverseGraph rg;
    rg.tau = tau;
    rg.ids = g.ids;
    rg.reverse.resize(g.node_count());

    // local index of each member; ids are ascending so binary search works
    auto local_of = [&](ItemId id) {
        return static_cast<std::size_t>(std::lower_bound(g.ids.begin(), g.ids.end(), id) - g.ids.begin());
    };

    for (std::size_t x = 0; x < g.node_count(); ++x) {
        for (const Neighbor& nb : g.neighbors[x]) {
            if (nb.weight < tau) continue;
            rg.reverse[local_of(nb.id)].push_back(Neighbor{g.ids[x], nb.weight});
        }
    }
    for (auto& list : rg.reverse) std::sort(list.begin(), list.end(), neighbor_before);
    return rg;
}

}  // namespace crs
