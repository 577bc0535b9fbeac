#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crs/reverse_graph.hpp"
#include "crs/similarity.hpp"
#include "crs/types.hpp"

namespace crs {

// Selected representatives of one cluster, in selection order, with the
// parameters that produced them echoed for reproducibility.
struct Prototype {
    std::string cluster_label;
    std::vector<ItemId> representatives;
    double covered_fraction = 0.0;

    // parameter echo (k = 0 and tau = NaN where a method has no such knob)
    int k = 0;
    double epsilon = 0.0;
    double tau = 0.0;
    std::uint64_t seed = 0;

    std::size_t size() const { return representatives.size(); }
};

enum class GraphMode { NnDescent, Exact };

// Greedy scoring rule. DegreePrimary scores a candidate by how many
// uncovered members it covers and breaks ties by the larger sum of edge
// weights into the uncovered set; WeightPrimary swaps the two keys.
enum class ScoreMode { DegreePrimary, WeightPrimary };

struct CrsParams {
    int k = 10;
    double epsilon = 0.95;
    // nullopt: tau = cluster homogeneity, exact for clusters of at most
    // kExactTauLimit members and a seeded 5% sample estimate above that.
    std::optional<double> fixed_tau;
    GraphMode graph_mode = GraphMode::NnDescent;
    ScoreMode score_mode = ScoreMode::DegreePrimary;
    NnDescentParams nn;  // carries k's companion knobs and the seed

    static constexpr std::size_t kExactTauLimit = 2000;
    static constexpr double kTauSampleFraction = 0.05;
};

struct CoverResult {
    std::vector<ItemId> representatives;
    double covered_fraction = 0.0;
};

// Greedy cover of the cluster on its pruned reverse graph. Each step scores
// every non-representative u by |U_u ∩ Z| (+1 if u itself is uncovered),
// breaking ties by the larger sum of weights into U_u ∩ Z (accumulated in
// ascending member order) and then by lowest id; u and U_u leave Z. Stops
// once (n - |Z|) / n >= epsilon. If no candidate can make progress while
// coverage is unmet, remaining uncovered nodes become their own
// representatives in ascending id order.
CoverResult greedy_cover(const ReverseGraph& rg, std::size_t cluster_size, double epsilon,
                         ScoreMode mode = ScoreMode::DegreePrimary);

// Optional insight into the intermediate graphs select_representatives built.
struct SelectionTrace {
    KnnGraph graph;
    ReverseGraph reverse;
};

// Full selection pipeline for one cluster: build the k-NN graph (NN-Descent
// or the exact oracle), resolve tau, reverse and prune, greedily cover to
// epsilon. A singleton cluster is its own prototype.
Prototype select_representatives(const Cluster& cluster, CountingSimilarity& cs, const CrsParams& params,
                                 SelectionTrace* trace = nullptr);

// One record per cluster:
// label<TAB>epsilon<TAB>k<TAB>tau<TAB>covered_fraction<TAB>id,id,...
// Leading '#' lines carry free-form configuration echo.
void write_prototypes(const std::vector<Prototype>& protos, std::ostream& out,
                      const std::vector<std::string>& comment_lines = {});
std::vector<Prototype> load_prototypes(const std::string& path);

}  // namespace crs
