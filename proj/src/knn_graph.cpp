#include "crs/knn_graph.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crs/io_util.hpp"
#include "crs/rng.hpp"
#include "omp_error.hpp"

namespace crs {

namespace {

struct PoolEntry {
    std::uint32_t node;  // local index within the cluster
    double weight;
    bool is_new;
};

bool entry_before(const PoolEntry& a, const PoolEntry& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.node < b.node;
}

// Insert into a capacity-bounded list kept sorted by (weight desc, node asc).
// Returns true when the list changed. Duplicates are rejected by node id.
bool pool_insert(std::vector<PoolEntry>& pool, std::size_t cap, PoolEntry e) {
    for (const PoolEntry& p : pool)
        if (p.node == e.node) return false;
    if (pool.size() < cap) {
        pool.insert(std::upper_bound(pool.begin(), pool.end(), e, entry_before), e);
        return true;
    }
    if (!entry_before(e, pool.back())) return false;
    pool.pop_back();
    pool.insert(std::upper_bound(pool.begin(), pool.end(), e, entry_before), e);
    return true;
}

void validate_knn_args(const Cluster& cluster, int k) {
    if (k < 1) throw ConfigError("knn: k must be >= 1");
    if (cluster.size() < 2) throw DomainError("knn: cluster '" + cluster.label + "' has fewer than 2 members");
}

KnnGraph finalize(const Cluster& cluster, int k, std::vector<std::vector<PoolEntry>>&& pools) {
    KnnGraph g;
    g.k = k;
    g.ids = cluster.member_ids;
    g.neighbors.resize(pools.size());
    for (std::size_t v = 0; v < pools.size(); ++v) {
        g.neighbors[v].reserve(pools[v].size());
        for (const PoolEntry& e : pools[v]) g.neighbors[v].push_back(Neighbor{cluster.member_ids[e.node], e.weight});
    }
    return g;
}

KnnGraph exact_knn_impl(const Cluster& cluster, CountingSimilarity& cs, int k, bool parallel) {
    validate_knn_args(cluster, k);
    const std::size_t n = cluster.size();
    const std::size_t cap = std::min<std::size_t>(static_cast<std::size_t>(k), n - 1);
    std::vector<std::vector<PoolEntry>> pools(n);
    for (auto& p : pools) p.reserve(cap + 1);

    if (!parallel) {
        for (std::uint32_t a = 0; a < n; ++a) {
            for (std::uint32_t b = a + 1; b < n; ++b) {
                const double w = cs.evaluate(cluster.member_ids[a], cluster.member_ids[b]);
                pool_insert(pools[a], cap, PoolEntry{b, w, false});
                pool_insert(pools[b], cap, PoolEntry{a, w, false});
            }
        }
        return finalize(cluster, k, std::move(pools));
    }

    // Each worker owns whole rows: node a scans all n-1 partners through the
    // bulk cache interface, so no list locks are needed and every unordered
    // pair is still computed (and counted) exactly once, by its first
    // toucher. The exact graph is unique, so the result matches the serial
    // reference bit for bit.
    detail::OmpErrorCollector errors;
#pragma omp parallel
    {
        std::vector<ItemId> partners(n - 1);
        std::vector<double> sims(n - 1);
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t a = 0; a < static_cast<std::int64_t>(n); ++a) {
            errors.run([&] {
                std::size_t idx = 0;
                for (std::uint32_t b = 0; b < n; ++b)
                    if (b != static_cast<std::uint32_t>(a)) partners[idx++] = cluster.member_ids[b];
                cs.evaluate_row(cluster.member_ids[a], partners, sims);
                idx = 0;
                for (std::uint32_t b = 0; b < n; ++b) {
                    if (b == static_cast<std::uint32_t>(a)) continue;
                    pool_insert(pools[a], cap, PoolEntry{b, sims[idx++], false});
                }
            });
        }
    }
    errors.rethrow_if_failed();
    return finalize(cluster, k, std::move(pools));
}

}  // namespace

KnnGraph exact_knn_serial(const Cluster& cluster, CountingSimilarity& cs, int k) {
    return exact_knn_impl(cluster, cs, k, false);
}

KnnGraph exact_knn(const Cluster& cluster, CountingSimilarity& cs, int k) {
    return exact_knn_impl(cluster, cs, k, true);
}

KnnGraph nn_descent(const Cluster& cluster, CountingSimilarity& cs, const NnDescentParams& params) {
    validate_knn_args(cluster, params.k);
    const std::size_t n = cluster.size();
    const std::size_t k = static_cast<std::size_t>(params.k);
    if (n <= k + 1) return exact_knn(cluster, cs, params.k);
    if (!(params.rho > 0.0 && params.rho <= 1.0)) throw ConfigError("nn_descent: rho must be in (0,1]");
    if (!(params.delta_nn > 0.0 && params.delta_nn < 1.0)) throw ConfigError("nn_descent: delta_nn must be in (0,1)");

    std::vector<std::vector<PoolEntry>> pools(n);

    // seeded random initialization: k distinct non-self neighbors per node
    for (std::uint32_t v = 0; v < n; ++v) {
        Rng rng(mix_seed(params.seed, 0x1000000ULL + v));
        auto picks = sample_without_replacement(static_cast<std::uint32_t>(n - 1), static_cast<std::uint32_t>(k), rng);
        pools[v].reserve(k + 1);
        for (std::uint32_t p : picks) {
            const std::uint32_t u = p >= v ? p + 1 : p;  // skip self
            const double w = cs.evaluate(cluster.member_ids[v], cluster.member_ids[u]);
            pool_insert(pools[v], k, PoolEntry{u, w, true});
        }
    }

    const std::size_t sample_cap = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.rho * static_cast<double>(k))));
    const double stop_threshold = params.delta_nn * static_cast<double>(n) * static_cast<double>(k);
    std::vector<std::vector<std::uint32_t>> rev_new(n), rev_old(n), cand_new(n), cand_old(n);

    // Joins run in two phases over blocks of nodes: workers first buffer
    // (target, neighbor, weight) updates thread-locally, then each touched
    // node applies its own updates. No list locks; a top-k list is a
    // function of the update multiset, not of apply order.
    struct Update {
        std::uint32_t target;
        std::uint32_t nbr;
        double weight;
    };
    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif
    std::vector<std::vector<Update>> per_thread(static_cast<std::size_t>(max_threads));
    std::vector<std::vector<Update>> per_node(n);
    std::vector<std::uint32_t> touched;
    const std::size_t block = 4096;

    for (int iter = 0; iter < params.max_iters; ++iter) {
        for (auto& r : rev_new) r.clear();
        for (auto& r : rev_old) r.clear();
        for (std::uint32_t v = 0; v < n; ++v)
            for (const PoolEntry& e : pools[v]) (e.is_new ? rev_new : rev_old)[e.node].push_back(v);

        // Candidate snapshot: all flagged-new forward neighbors plus a
        // rho-sampled slice of new reverse neighbors; same shape for old.
        // Flags are consumed here so joined entries go quiet next round.
        for (std::uint32_t v = 0; v < n; ++v) {
            auto& nc = cand_new[v];
            auto& oc = cand_old[v];
            nc.clear();
            oc.clear();
            for (PoolEntry& e : pools[v]) {
                if (e.is_new) {
                    nc.push_back(e.node);
                    e.is_new = false;
                } else {
                    oc.push_back(e.node);
                }
            }
            Rng rng(mix_seed(params.seed, 0x2000000ULL + static_cast<std::uint64_t>(iter) * n + v));
            auto take_sample = [&](const std::vector<std::uint32_t>& from, std::vector<std::uint32_t>& into) {
                if (from.size() <= sample_cap) {
                    into.insert(into.end(), from.begin(), from.end());
                    return;
                }
                auto picks = sample_without_replacement(static_cast<std::uint32_t>(from.size()),
                                                        static_cast<std::uint32_t>(sample_cap), rng);
                for (std::uint32_t p : picks) into.push_back(from[p]);
            };
            take_sample(rev_new[v], nc);
            take_sample(rev_old[v], oc);
            std::sort(nc.begin(), nc.end());
            nc.erase(std::unique(nc.begin(), nc.end()), nc.end());
            std::sort(oc.begin(), oc.end());
            oc.erase(std::unique(oc.begin(), oc.end()), oc.end());
        }

        // local joins: every new candidate of v meets the remaining new ones
        // and all old ones; evaluations go through the bulk cache interface
        // one candidate row at a time
        std::uint64_t updates = 0;
        for (std::size_t block_start = 0; block_start < n; block_start += block) {
            const std::size_t block_end = std::min(n, block_start + block);
            for (auto& tb : per_thread) tb.clear();

            detail::OmpErrorCollector errors;
#pragma omp parallel
            {
                std::size_t slot = 0;
#ifdef _OPENMP
                slot = static_cast<std::size_t>(omp_get_thread_num()) % per_thread.size();
#endif
                std::vector<Update>& buf = per_thread[slot];
                std::vector<std::uint32_t> partners;
                std::vector<ItemId> partner_ids;
                std::vector<double> sims;
#pragma omp for schedule(dynamic, 16)
                for (std::int64_t v = static_cast<std::int64_t>(block_start);
                     v < static_cast<std::int64_t>(block_end); ++v) {
                    errors.run([&] {
                        const auto& nc = cand_new[v];
                        const auto& oc = cand_old[v];
                        for (std::size_t i = 0; i < nc.size(); ++i) {
                            const std::uint32_t a = nc[i];
                            partners.clear();
                            for (std::size_t j = i + 1; j < nc.size(); ++j)
                                if (nc[j] != a) partners.push_back(nc[j]);
                            for (std::uint32_t b : oc)
                                if (b != a) partners.push_back(b);
                            if (partners.empty()) continue;
                            partner_ids.resize(partners.size());
                            sims.resize(partners.size());
                            for (std::size_t m = 0; m < partners.size(); ++m)
                                partner_ids[m] = cluster.member_ids[partners[m]];
                            cs.evaluate_row(cluster.member_ids[a], partner_ids, sims);
                            for (std::size_t m = 0; m < partners.size(); ++m) {
                                buf.push_back(Update{a, partners[m], sims[m]});
                                buf.push_back(Update{partners[m], a, sims[m]});
                            }
                        }
                    });
                }
            }
            errors.rethrow_if_failed();

            touched.clear();
            for (const auto& tb : per_thread) {
                for (const Update& u : tb) {
                    if (per_node[u.target].empty()) touched.push_back(u.target);
                    per_node[u.target].push_back(u);
                }
            }
            std::sort(touched.begin(), touched.end());

            std::uint64_t block_updates = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : block_updates)
            for (std::int64_t t = 0; t < static_cast<std::int64_t>(touched.size()); ++t) {
                auto& ups = per_node[touched[t]];
                for (const Update& u : ups)
                    if (pool_insert(pools[u.target], k, PoolEntry{u.nbr, u.weight, true})) ++block_updates;
                ups.clear();
            }
            updates += block_updates;
        }

        if (params.on_iteration) {
            auto snapshot = pools;
            params.on_iteration(finalize(cluster, params.k, std::move(snapshot)));
        }
        if (static_cast<double>(updates) < stop_threshold) break;
    }
    return finalize(cluster, params.k, std::move(pools));
}

double graph_recall(const KnnGraph& approx, const KnnGraph& exact) {
    if (approx.ids != exact.ids || approx.k != exact.k)
        throw DomainError("graph_recall: graphs cover different node sets or k");
    if (approx.node_count() == 0) throw DomainError("graph_recall: empty graphs");
    double total = 0.0;
    for (std::size_t v = 0; v < approx.node_count(); ++v) {
        std::unordered_set<ItemId> truth;
        truth.reserve(exact.neighbors[v].size() * 2);
        for (const Neighbor& nb : exact.neighbors[v]) truth.insert(nb.id);
        std::size_t hit = 0;
        for (const Neighbor& nb : approx.neighbors[v]) hit += truth.count(nb.id);
        const std::size_t len = std::max<std::size_t>(1, exact.neighbors[v].size());
        total += static_cast<double>(hit) / static_cast<double>(len);
    }
    return total / static_cast<double>(approx.node_count());
}

std::string dump_graph(const KnnGraph& g) {
    std::ostringstream out;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        out << g.ids[v] << ":";
        for (const Neighbor& nb : g.neighbors[v]) out << " " << nb.id << ":" << format_double(nb.weight);
        out << "\n";
    }
    return out.str();
}

}  // namespace crs
