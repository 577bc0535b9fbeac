#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crs/types.hpp"

namespace crs {

// Precomputed pairwise similarity backing a dataset of opaque handles.
struct SimilarityMatrix {
    std::size_t n = 0;
    std::vector<double> values;  // row-major n*n

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// Dense CSV: optional leading '#' comment lines, then a header row, then one
// row per item. label_column selects the label by header name or by 0-based
// column index; nullopt means every column is a feature and labels are empty.
LabeledDataset load_dense_csv(const std::string& path,
                              const std::optional<std::string>& label_column = std::string("label"));

// One record per line: id<TAB>label<TAB>idx:val idx:val ... with strictly
// ascending idx. ItemIds are assigned by line order.
LabeledDataset load_sparse_records(const std::string& path);

// First line n, then n rows of n space-separated reals, then n lines
// id<TAB>label. The matrix must be square and symmetric.
std::pair<LabeledDataset, std::shared_ptr<const SimilarityMatrix>> load_similarity_matrix(const std::string& path);

void write_dense_csv(const LabeledDataset& ds, std::ostream& out,
                     const std::vector<std::string>& comment_lines = {});
void write_sparse_records(const LabeledDataset& ds, std::ostream& out,
                          const std::vector<std::string>& comment_lines = {});
void write_similarity_matrix(const LabeledDataset& ds, const SimilarityMatrix& m, std::ostream& out);

// Clusters induced by the labels, ordered by ascending label; member ids
// ascending within each cluster.
std::vector<Cluster> clusters_of(const LabeledDataset& ds);

// Stratified hold-out split. Per cluster, round(test_fraction * size) test
// members (clamped so both sides keep at least one). Both halves are
// re-indexed densely but keep canonical relative order and source_ids.
std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds, double test_fraction,
                                                           std::uint64_t seed);

struct GaussianBlobsParams {
    std::vector<std::array<double, 2>> centers;  // one blob per center
    std::size_t per_blob = 100;
    double sigma = 0.1;
};

struct TwoSpiralsParams {
    std::size_t n = 255;  // total points over both arms
    double noise = 0.0;
    double turns = 1.75;
};

LabeledDataset gen_gaussian_blobs(const GaussianBlobsParams& p, std::uint64_t seed);
LabeledDataset gen_two_spirals(const TwoSpiralsParams& p, std::uint64_t seed);

struct SyntheticParams {
    GaussianBlobsParams blobs;
    TwoSpiralsParams spirals;
};

// kind is "gaussian-blobs" or "two-spirals"; anything else is a ConfigError.
LabeledDataset gen_synthetic(const std::string& kind, const SyntheticParams& params, std::uint64_t seed);

}  // namespace crs
