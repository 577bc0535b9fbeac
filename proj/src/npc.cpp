#include "crs/npc.hpp"

#include <algorithm>
#include <unordered_set>

#include "omp_error.hpp"

namespace crs {

PrototypeSet PrototypeSet::build(const LabeledDataset& ds, std::vector<Prototype> prototypes) {
    if (prototypes.empty()) throw DomainError("PrototypeSet: no prototypes");
    PrototypeSet ps;
    ps.ds_ = &ds;
    ps.prototypes_ = std::move(prototypes);

    std::unordered_set<std::string> labels;
    std::unordered_set<ItemId> seen;
    for (std::uint32_t p = 0; p < ps.prototypes_.size(); ++p) {
        const Prototype& proto = ps.prototypes_[p];
        if (!labels.insert(proto.cluster_label).second)
            throw DomainError("PrototypeSet: duplicate cluster label '" + proto.cluster_label + "'");
        for (ItemId r : proto.representatives) {
            if (r >= ds.size()) throw DomainError("PrototypeSet: representative id " + std::to_string(r) + " out of range");
            if (ds.labels[r] != proto.cluster_label)
                throw DomainError("PrototypeSet: representative " + std::to_string(r) + " is labeled '" +
                                  ds.labels[r] + "', not '" + proto.cluster_label + "'");
            if (!seen.insert(r).second)
                throw DomainError("PrototypeSet: representative " + std::to_string(r) + " appears twice");
            ps.reps_.push_back(Rep{r, p});
        }
    }
    std::sort(ps.reps_.begin(), ps.reps_.end(), [](const Rep& a, const Rep& b) { return a.id < b.id; });
    return ps;
}

Classification classify(const FeatureVector& x, const PrototypeSet& ps, CountingSimilarity& cs) {
    const auto& reps = ps.representatives();
    if (reps.empty()) throw DomainError("classify: empty prototype set");
    // reps are scanned in ascending id order with a strict improvement test,
    // so similarity ties resolve to the lowest representative id
    Classification best;
    bool first = true;
    for (const auto& rep : reps) {
        const double s = cs.eval_external(x, rep.id);
        if (first || s > best.best_sim) {
            best.best_sim = s;
            best.best_rep = rep.id;
            best.label = ps.prototypes()[rep.prototype_index].cluster_label;
            first = false;
        }
    }
    return best;
}

std::vector<Classification> batch_classify_serial(std::span<const FeatureVector> xs, const PrototypeSet& ps,
                                                  CountingSimilarity& cs) {
    std::vector<Classification> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = classify(xs[i], ps, cs);
    return out;
}

std::vector<Classification> batch_classify(std::span<const FeatureVector> xs, const PrototypeSet& ps,
                                           CountingSimilarity& cs) {
    std::vector<Classification> out(xs.size());
    detail::OmpErrorCollector errors;
#pragma omp parallel for schedule(dynamic, 32)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(xs.size()); ++i)
        errors.run([&] { out[i] = classify(xs[i], ps, cs); });
    errors.rethrow_if_failed();
    return out;
}

}  // namespace crs
