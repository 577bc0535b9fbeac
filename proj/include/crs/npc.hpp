#pragma once

#include <span>
#include <string>
#include <vector>

#include "crs/crs_select.hpp"
#include "crs/similarity.hpp"
#include "crs/types.hpp"

namespace crs {

// Union of per-cluster prototypes resolved against the dataset they index
// into. Labels are pairwise distinct and representative id sets disjoint.
class PrototypeSet {
public:
    static PrototypeSet build(const LabeledDataset& ds, std::vector<Prototype> prototypes);

    const std::vector<Prototype>& prototypes() const { return prototypes_; }
    const LabeledDataset& dataset() const { return *ds_; }
    std::size_t total_representatives() const { return reps_.size(); }

    struct Rep {
        ItemId id;
        std::uint32_t prototype_index;
    };
    // ascending by id; the classification scan order
    const std::vector<Rep>& representatives() const { return reps_; }

private:
    const LabeledDataset* ds_ = nullptr;
    std::vector<Prototype> prototypes_;
    std::vector<Rep> reps_;
};

struct Classification {
    std::string label;
    ItemId best_rep = 0;
    double best_sim = 0.0;
};

// Nearest-prototype rule: evaluate s(x, r) for every representative across
// all prototypes and return the label of the prototype holding the argmax,
// ties resolved by lowest representative id. Each call costs exactly one
// similarity evaluation per representative.
Classification classify(const FeatureVector& x, const PrototypeSet& ps, CountingSimilarity& cs);

std::vector<Classification> batch_classify_serial(std::span<const FeatureVector> xs, const PrototypeSet& ps,
                                                  CountingSimilarity& cs);
// OpenMP over queries; output identical to the serial reference.
std::vector<Classification> batch_classify(std::span<const FeatureVector> xs, const PrototypeSet& ps,
                                           CountingSimilarity& cs);

}  // namespace crs
