#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crs/dataset.hpp"
#include "crs/rng.hpp"
#include "crs/similarity.hpp"
#include "crs/types.hpp"

namespace testutil {

// scoped OpenMP thread-count override
struct ThreadGuard {
#ifdef _OPENMP
    int saved;
    explicit ThreadGuard(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadGuard() { omp_set_num_threads(saved); }
#else
    explicit ThreadGuard(int) {}
#endif
};

inline crs::Cluster whole_dataset_cluster(const crs::LabeledDataset& ds, std::string label = "all") {
    crs::Cluster c{std::move(label), {}};
    c.member_ids.resize(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) c.member_ids[i] = static_cast<crs::ItemId>(i);
    return c;
}

inline crs::LabeledDataset dataset_from_dense(const std::vector<crs::DenseVector>& rows,
                                              const std::vector<std::string>& labels) {
    crs::LabeledDataset ds;
    ds.name = "inline";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ds.items.emplace_back(rows[i]);
        ds.labels.push_back(labels[i]);
        ds.source_ids.push_back(static_cast<crs::ItemId>(i));
    }
    return ds;
}

// dataset of opaque handles over an explicit symmetric similarity matrix
struct MatrixFixture {
    crs::LabeledDataset ds;
    crs::SimilarityMeasure measure = crs::SimilarityMeasure::cosine_dense();
};

inline MatrixFixture matrix_fixture(const std::vector<std::vector<double>>& sims,
                                    const std::vector<std::string>& labels) {
    auto m = std::make_shared<crs::SimilarityMatrix>();
    m->n = sims.size();
    for (const auto& row : sims)
        for (double v : row) m->values.push_back(v);
    MatrixFixture fx;
    for (std::size_t i = 0; i < sims.size(); ++i) {
        fx.ds.items.emplace_back(crs::MatrixHandle{static_cast<std::uint32_t>(i)});
        fx.ds.labels.push_back(labels[i]);
        fx.ds.source_ids.push_back(static_cast<crs::ItemId>(i));
    }
    fx.ds.name = "matrix";
    fx.measure = crs::SimilarityMeasure::matrix_lookup(std::move(m));
    return fx;
}

// High-dimensional nonnegative stand-in for an image-classification dataset:
// per-class archetype over a sparse support, a handful of intra-class modes,
// a shared background, and paired classes with overlapping supports so the
// classifier has real confusions to make. Cosine homogeneity lands near 0.75.
inline crs::LabeledDataset gen_image_like(std::size_t classes, std::size_t per_class, std::uint64_t seed,
                                          std::size_t dim = 784) {
    crs::Rng rng(seed);
    std::vector<double> background(dim);
    for (auto& v : background) v = rng.uniform(0.0, 0.1);

    std::vector<std::vector<std::uint32_t>> supports(classes);
    std::vector<std::vector<double>> archetypes(classes, std::vector<double>(dim, 0.0));
    const std::size_t support_size = dim / 4;
    for (std::size_t c = 0; c < classes; ++c) {
        if (c % 2 == 1) {
            // odd classes share 55% of the previous class's support
            const auto& prev = supports[c - 1];
            const std::size_t shared = prev.size() * 11 / 20;
            auto picks = crs::sample_without_replacement(static_cast<std::uint32_t>(prev.size()),
                                                         static_cast<std::uint32_t>(shared), rng);
            for (auto p : picks) supports[c].push_back(prev[p]);
            auto fresh = crs::sample_without_replacement(static_cast<std::uint32_t>(dim),
                                                         static_cast<std::uint32_t>(support_size - shared), rng);
            for (auto f : fresh) supports[c].push_back(f);
        } else {
            auto picks = crs::sample_without_replacement(static_cast<std::uint32_t>(dim),
                                                         static_cast<std::uint32_t>(support_size), rng);
            supports[c].assign(picks.begin(), picks.end());
        }
        for (auto j : supports[c]) archetypes[c][j] = rng.uniform(0.3, 0.62);
    }

    const std::size_t modes = 3;
    std::vector<std::vector<std::vector<double>>> mode_bumps(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        mode_bumps[c].assign(modes, std::vector<double>(dim, 0.0));
        for (std::size_t m = 0; m < modes; ++m)
            for (auto j : supports[c]) mode_bumps[c][m][j] = rng.uniform(0.0, 0.35);
    }

    crs::LabeledDataset ds;
    ds.name = "image-like";
    for (std::size_t c = 0; c < classes; ++c) {
        const std::string label = "class" + std::to_string(c);
        const std::size_t partner = c % 2 ? c - 1 : (c + 1 < classes ? c + 1 : c);
        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t m = i % modes;
            // a quarter of each class sits near the boundary to its partner
            double lambda = 1.0;
            if (partner != c && i % 3 == 2) lambda = rng.uniform(0.3, 0.7);
            crs::DenseVector v(dim);
            for (std::size_t j = 0; j < dim; ++j)
                v[j] = background[j] + lambda * archetypes[c][j] + (1.0 - lambda) * archetypes[partner][j] +
                       mode_bumps[c][m][j] + rng.uniform(0.0, 1.0);
            ds.items.emplace_back(std::move(v));
            ds.labels.push_back(label);
        }
    }
    ds.source_ids.resize(ds.items.size());
    for (std::size_t i = 0; i < ds.items.size(); ++i) ds.source_ids[i] = static_cast<crs::ItemId>(i);
    return ds;
}

}  // namespace testutil
