#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace crs {

// Position of a sample in its dataset's canonical (ingestion) order.
// All tie-breaking in the pipeline resolves by lowest ItemId.
using ItemId = std::uint32_t;

// Error taxonomy:
//   ParseError  - malformed input file contents
//   ConfigError - invalid parameters or impossible requests
//   TypeError   - mixing incompatible feature payload kinds
//   DomainError - contract violation on otherwise well-formed data
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct TypeError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};

struct SparseEntry {
    std::uint32_t index;
    double value;
    bool operator==(const SparseEntry&) const = default;
};

using DenseVector = std::vector<double>;
// sorted by index, strictly increasing, values finite and nonzero
using SparseVector = std::vector<SparseEntry>;

// Opaque payload for datasets that only exist as a precomputed similarity
// matrix. Carries the row index of the item in the backing matrix; any
// operation that needs coordinates rejects it.
struct MatrixHandle {
    std::uint32_t row = 0;
    bool operator==(const MatrixHandle&) const = default;
};

using FeatureVector = std::variant<DenseVector, SparseVector, MatrixHandle>;

struct LabeledDataset {
    std::string name;
    std::vector<FeatureVector> items;  // position == ItemId
    std::vector<std::string> labels;   // parallel to items
    // Provenance of each item in the dataset it was derived from. Identity
    // for loaded/generated datasets; original ids for train/test splits.
    std::vector<ItemId> source_ids;

    std::size_t size() const { return items.size(); }

    // Dimension of dense payloads; 0 for sparse/matrix datasets.
    std::size_t dense_dim() const {
        if (items.empty()) return 0;
        if (const auto* d = std::get_if<DenseVector>(&items.front())) return d->size();
        return 0;
    }
};

struct Cluster {
    std::string label;
    std::vector<ItemId> member_ids;  // ascending, unique, nonempty

    std::size_t size() const { return member_ids.size(); }
};

}  // namespace crs
