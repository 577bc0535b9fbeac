#include "crs/crs_select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "crs/io_util.hpp"
#include "crs/rng.hpp"

namespace crs {

namespace {

std::size_t local_index(const std::vector<ItemId>& ids, ItemId id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
}

}  // namespace

CoverResult greedy_cover(const ReverseGraph& rg, std::size_t cluster_size, double epsilon, ScoreMode mode) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("greedy_cover: epsilon must be in (0,1]");
    const std::size_t n = rg.node_count();
    if (n == 0 || n != cluster_size) throw DomainError("greedy_cover: reverse graph does not match cluster size");

    // local adjacency: covers[u] = U_u, coverers[c] = { u : c in U_u }
    std::vector<std::vector<std::uint32_t>> covers(n), coverers(n);
    std::vector<std::vector<double>> cover_weights(n);
    for (std::size_t u = 0; u < n; ++u) {
        covers[u].reserve(rg.reverse[u].size());
        cover_weights[u].reserve(rg.reverse[u].size());
        // ascending member order is the canonical order for weight sums
        std::vector<Neighbor> by_id = rg.reverse[u];
        std::sort(by_id.begin(), by_id.end(), [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
        for (const Neighbor& nb : by_id) {
            const std::uint32_t c = static_cast<std::uint32_t>(local_index(rg.ids, nb.id));
            covers[u].push_back(c);
            cover_weights[u].push_back(nb.weight);
            coverers[c].push_back(static_cast<std::uint32_t>(u));
        }
    }

    std::vector<bool> covered(n, false), is_rep(n, false);
    // score[u] = |U_u ∩ Z| + (u ∈ Z), maintained incrementally
    std::vector<std::size_t> score(n);
    for (std::size_t u = 0; u < n; ++u) score[u] = covers[u].size() + 1;
    std::size_t covered_count = 0;

    auto mark_covered = [&](std::uint32_t c) {
        if (covered[c]) return;
        covered[c] = true;
        ++covered_count;
        --score[c];
        for (std::uint32_t u : coverers[c]) --score[u];
    };

    auto weight_sum = [&](std::size_t u) {
        double sum = 0.0;
        for (std::size_t i = 0; i < covers[u].size(); ++i)
            if (!covered[covers[u][i]]) sum += cover_weights[u][i];
        return sum;
    };

    CoverResult result;
    auto coverage_met = [&] {
        return static_cast<double>(covered_count) / static_cast<double>(n) >= epsilon;
    };

    while (!coverage_met()) {
        std::size_t best = n;
        std::size_t best_score = 0;
        double best_wsum = -std::numeric_limits<double>::infinity();

        if (mode == ScoreMode::DegreePrimary) {
            for (std::size_t u = 0; u < n; ++u) {
                if (is_rep[u] || score[u] == 0) continue;
                if (best != n && score[u] < best_score) continue;
                if (best == n || score[u] > best_score) {
                    best = u;
                    best_score = score[u];
                    best_wsum = weight_sum(u);
                    continue;
                }
                // score tie: larger weight sum, then the earlier (lower) id wins
                const double w = weight_sum(u);
                if (w > best_wsum) {
                    best = u;
                    best_wsum = w;
                }
            }
        } else {
            // weighted-sum-primary reading of the selection rule
            for (std::size_t u = 0; u < n; ++u) {
                if (is_rep[u] || score[u] == 0) continue;
                const double w = weight_sum(u);
                if (best == n || w > best_wsum || (w == best_wsum && score[u] > best_score)) {
                    best = u;
                    best_wsum = w;
                    best_score = score[u];
                }
            }
        }

        if (best == n) {
            // tau-orphaned stall: uncovered nodes represent themselves
            for (std::size_t c = 0; c < n && !coverage_met(); ++c) {
                if (covered[c] || is_rep[c]) continue;
                is_rep[c] = true;
                result.representatives.push_back(rg.ids[c]);
                mark_covered(static_cast<std::uint32_t>(c));
            }
            break;
        }

        is_rep[best] = true;
        result.representatives.push_back(rg.ids[best]);
        mark_covered(static_cast<std::uint32_t>(best));
        for (std::uint32_t c : covers[best]) mark_covered(c);
    }

    result.covered_fraction = static_cast<double>(covered_count) / static_cast<double>(n);
    return result;
}

Prototype select_representatives(const Cluster& cluster, CountingSimilarity& cs, const CrsParams& params,
                                 SelectionTrace* trace) {
    if (params.k < 1) throw ConfigError("select_representatives: k must be >= 1");
    if (!(params.epsilon > 0.0 && params.epsilon <= 1.0))
        throw ConfigError("select_representatives: epsilon must be in (0,1]");
    if (cluster.size() == 0) throw DomainError("select_representatives: empty cluster");

    Prototype proto;
    proto.cluster_label = cluster.label;
    proto.k = params.k;
    proto.epsilon = params.epsilon;
    proto.seed = params.nn.seed;

    if (cluster.size() == 1) {
        proto.representatives = {cluster.member_ids.front()};
        proto.covered_fraction = 1.0;
        proto.tau = params.fixed_tau.value_or(std::numeric_limits<double>::quiet_NaN());
        return proto;
    }

    NnDescentParams nn = params.nn;
    nn.k = params.k;
    KnnGraph graph = params.graph_mode == GraphMode::Exact ? exact_knn(cluster, cs, params.k)
                                                           : nn_descent(cluster, cs, nn);

    double tau = 0.0;
    if (params.fixed_tau) {
        tau = *params.fixed_tau;
    } else if (cluster.size() <= CrsParams::kExactTauLimit) {
        tau = homogeneity(cluster, cs);
    } else {
        tau = approx_homogeneity(cluster, cs, CrsParams::kTauSampleFraction, mix_seed(params.nn.seed, fnv1a("tau")));
    }
    proto.tau = tau;

    ReverseGraph rg = reverse_and_prune(graph, tau);
    CoverResult cover = greedy_cover(rg, cluster.size(), params.epsilon, params.score_mode);
    proto.representatives = std::move(cover.representatives);
    proto.covered_fraction = cover.covered_fraction;

    if (trace) {
        trace->graph = std::move(graph);
        trace->reverse = std::move(rg);
    }
    return proto;
}

void write_prototypes(const std::vector<Prototype>& protos, std::ostream& out,
                      const std::vector<std::string>& comment_lines) {
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    for (const Prototype& p : protos) {
        out << p.cluster_label << "\t" << format_double(p.epsilon) << "\t" << p.k << "\t" << format_double(p.tau)
            << "\t" << format_double(p.covered_fraction) << "\t";
        for (std::size_t i = 0; i < p.representatives.size(); ++i) {
            if (i) out << ",";
            out << p.representatives[i];
        }
        out << "\n";
    }
}

std::vector<Prototype> load_prototypes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::vector<Prototype> protos;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string context = path + ": line " + std::to_string(lineno);
        std::istringstream fields(line);
        Prototype p;
        std::string eps, k, tau, cov, ids;
        if (!std::getline(fields, p.cluster_label, '\t') || !std::getline(fields, eps, '\t') ||
            !std::getline(fields, k, '\t') || !std::getline(fields, tau, '\t') || !std::getline(fields, cov, '\t') ||
            !std::getline(fields, ids))
            throw ParseError(context + ": expected 6 tab-separated fields");
        try {
            p.epsilon = std::stod(eps);
            p.k = std::stoi(k);
            p.tau = std::stod(tau);
            p.covered_fraction = std::stod(cov);
        } catch (const std::exception&) {
            throw ParseError(context + ": malformed numeric field");
        }
        std::istringstream idstream(ids);
        std::string tok;
        while (std::getline(idstream, tok, ',')) {
            if (tok.empty()) continue;
            p.representatives.push_back(static_cast<ItemId>(std::stoul(tok)));
        }
        if (p.representatives.empty()) throw ParseError(context + ": prototype has no representatives");
        protos.push_back(std::move(p));
    }
    if (protos.empty()) throw ParseError(path + ": no prototype records");
    return protos;
}

}  // namespace crs
