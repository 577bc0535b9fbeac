#include "crs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "crs/io_util.hpp"
#include "crs/rng.hpp"

namespace crs {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return in;
}

double parse_double(std::string_view cell, const std::string& context) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError(context + ": not a number: '" + std::string(cell) + "'");
    if (!std::isfinite(v)) throw ParseError(context + ": non-finite value");
    return v;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

LabeledDataset load_dense_csv(const std::string& path, const std::optional<std::string>& label_column) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t lineno = 0;

    // header (leading '#' comment lines are configuration echo, skipped)
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        header = split_on(line, ',');
        break;
    }
    if (header.empty()) throw ParseError(path + ": missing header row");

    std::size_t label_idx = header.size();  // sentinel: no label column
    if (label_column) {
        auto it = std::find(header.begin(), header.end(), *label_column);
        if (it != header.end()) {
            label_idx = static_cast<std::size_t>(it - header.begin());
        } else {
            std::size_t idx = 0;
            auto [ptr, ec] = std::from_chars(label_column->data(), label_column->data() + label_column->size(), idx);
            if (ec != std::errc() || ptr != label_column->data() + label_column->size() || idx >= header.size())
                throw ConfigError(path + ": label column '" + *label_column + "' not found");
            label_idx = idx;
        }
    }

    LabeledDataset ds;
    ds.name = path;
    const std::size_t d = header.size() - (label_idx < header.size() ? 1 : 0);
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = split_on(line, ',');
        if (cells.size() != header.size())
            throw ParseError(path + ": row " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
        DenseVector vec;
        vec.reserve(d);
        std::string label;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_idx) {
                label = cells[c];
            } else {
                vec.push_back(parse_double(cells[c], path + ": row " + std::to_string(lineno)));
            }
        }
        ds.items.emplace_back(std::move(vec));
        ds.labels.push_back(std::move(label));
    }
    if (ds.items.empty()) throw ParseError(path + ": no data rows");
    ds.source_ids.resize(ds.items.size());
    for (std::size_t i = 0; i < ds.items.size(); ++i) ds.source_ids[i] = static_cast<ItemId>(i);
    return ds;
}

LabeledDataset load_sparse_records(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    LabeledDataset ds;
    ds.name = path;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const std::string context = path + ": line " + std::to_string(lineno);
        const std::vector<std::string> fields = split_on(line, '\t');
        if (fields.size() != 3) throw ParseError(context + ": expected id<TAB>label<TAB>pairs");
        SparseVector vec;
        std::istringstream pairs(fields[2]);
        std::string tok;
        std::uint32_t prev_index = 0;
        bool first = true;
        while (pairs >> tok) {
            const std::size_t colon = tok.find(':');
            if (colon == std::string::npos) throw ParseError(context + ": malformed pair '" + tok + "'");
            std::uint32_t idx = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
            if (ec != std::errc() || p != tok.data() + colon)
                throw ParseError(context + ": malformed index in '" + tok + "'");
            const double val = parse_double(std::string_view(tok).substr(colon + 1), context);
            if (val == 0.0) throw ParseError(context + ": zero value at index " + std::to_string(idx));
            if (!first && idx <= prev_index)
                throw ParseError(context + ": indices not sorted (" + std::to_string(prev_index) + " then " +
                                 std::to_string(idx) + ")");
            prev_index = idx;
            first = false;
            vec.push_back(SparseEntry{idx, val});
        }
        ds.items.emplace_back(std::move(vec));
        ds.labels.push_back(fields[1]);
    }
    if (ds.items.empty()) throw ParseError(path + ": no records");
    ds.source_ids.resize(ds.items.size());
    for (std::size_t i = 0; i < ds.items.size(); ++i) ds.source_ids[i] = static_cast<ItemId>(i);
    return ds;
}

std::pair<LabeledDataset, std::shared_ptr<const SimilarityMatrix>> load_similarity_matrix(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t lineno = 0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        n = static_cast<std::size_t>(parse_double(line, path + ": line " + std::to_string(lineno)));
        break;
    }
    if (n == 0) throw ParseError(path + ": missing or zero item count");

    auto matrix = std::make_shared<SimilarityMatrix>();
    matrix->n = n;
    matrix->values.reserve(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        if (!std::getline(in, line)) throw ParseError(path + ": matrix not square (only " + std::to_string(r) + " of " + std::to_string(n) + " rows)");
        ++lineno;
        line = strip_cr(line);
        std::istringstream row(line);
        std::string cell;
        std::size_t c = 0;
        while (row >> cell) {
            matrix->values.push_back(parse_double(cell, path + ": line " + std::to_string(lineno)));
            ++c;
        }
        if (c != n)
            throw ParseError(path + ": matrix not square (row " + std::to_string(r) + " has " + std::to_string(c) +
                             " of " + std::to_string(n) + " columns)");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (matrix->at(i, j) != matrix->at(j, i))
                throw ParseError(path + ": matrix not symmetric at (" + std::to_string(i) + "," + std::to_string(j) +
                                 ")");

    LabeledDataset ds;
    ds.name = path;
    for (std::size_t r = 0; r < n; ++r) {
        if (!std::getline(in, line)) throw ParseError(path + ": missing label line " + std::to_string(r));
        line = strip_cr(line);
        const std::vector<std::string> fields = split_on(line, '\t');
        if (fields.size() != 2) throw ParseError(path + ": label line " + std::to_string(r) + ": expected id<TAB>label");
        ds.items.emplace_back(MatrixHandle{static_cast<std::uint32_t>(r)});
        ds.labels.push_back(fields[1]);
    }
    ds.source_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.source_ids[i] = static_cast<ItemId>(i);
    return {std::move(ds), std::move(matrix)};
}

void write_dense_csv(const LabeledDataset& ds, std::ostream& out, const std::vector<std::string>& comment_lines) {
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    const std::size_t d = ds.dense_dim();
    for (std::size_t c = 0; c < d; ++c) out << "f" << c << ",";
    out << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto* vec = std::get_if<DenseVector>(&ds.items[i]);
        if (!vec) throw TypeError("write_dense_csv: item " + std::to_string(i) + " is not dense");
        for (double v : *vec) out << format_double(v) << ",";
        out << ds.labels[i] << "\n";
    }
}

void write_sparse_records(const LabeledDataset& ds, std::ostream& out, const std::vector<std::string>& comment_lines) {
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto* vec = std::get_if<SparseVector>(&ds.items[i]);
        if (!vec) throw TypeError("write_sparse_records: item " + std::to_string(i) + " is not sparse");
        out << i << "\t" << ds.labels[i] << "\t";
        for (std::size_t e = 0; e < vec->size(); ++e) {
            if (e) out << " ";
            out << (*vec)[e].index << ":" << format_double((*vec)[e].value);
        }
        out << "\n";
    }
}

void write_similarity_matrix(const LabeledDataset& ds, const SimilarityMatrix& m, std::ostream& out) {
    out << m.n << "\n";
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.n; ++j) {
            if (j) out << " ";
            out << format_double(m.at(i, j));
        }
        out << "\n";
    }
    for (std::size_t i = 0; i < ds.size(); ++i) out << i << "\t" << ds.labels[i] << "\n";
}

std::vector<Cluster> clusters_of(const LabeledDataset& ds) {
    std::map<std::string, std::vector<ItemId>> groups;
    for (std::size_t i = 0; i < ds.size(); ++i) groups[ds.labels[i]].push_back(static_cast<ItemId>(i));
    std::vector<Cluster> clusters;
    clusters.reserve(groups.size());
    for (auto& [label, ids] : groups) clusters.push_back(Cluster{label, std::move(ids)});
    return clusters;
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds, double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("split_train_test: test_fraction must be in (0,1)");
    const std::vector<Cluster> clusters = clusters_of(ds);
    std::vector<bool> in_test(ds.size(), false);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const Cluster& cluster = clusters[c];
        const std::size_t n = cluster.size();
        if (n < 2) throw DomainError("split_train_test: cluster '" + cluster.label + "' has a single member");
        std::size_t t = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
        t = std::clamp<std::size_t>(t, 1, n - 1);
        Rng rng(mix_seed(seed, fnv1a(cluster.label)));
        const auto picks = sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(t), rng);
        for (std::uint32_t p : picks) in_test[cluster.member_ids[p]] = true;
    }

    LabeledDataset train, test;
    train.name = ds.name + "/train";
    test.name = ds.name + "/test";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        LabeledDataset& dst = in_test[i] ? test : train;
        dst.items.push_back(ds.items[i]);
        dst.labels.push_back(ds.labels[i]);
        dst.source_ids.push_back(ds.source_ids[i]);
    }
    return {std::move(train), std::move(test)};
}

LabeledDataset gen_gaussian_blobs(const GaussianBlobsParams& p, std::uint64_t seed) {
    if (p.centers.empty()) throw ConfigError("gen_gaussian_blobs: no centers");
    if (p.per_blob < 1) throw ConfigError("gen_gaussian_blobs: per_blob must be >= 1");
    if (p.sigma < 0.0) throw ConfigError("gen_gaussian_blobs: sigma must be >= 0");
    LabeledDataset ds;
    ds.name = "gaussian-blobs";
    Rng rng(seed);
    for (std::size_t b = 0; b < p.centers.size(); ++b) {
        const std::string label = "b" + std::to_string(b);
        for (std::size_t i = 0; i < p.per_blob; ++i) {
            DenseVector v{p.centers[b][0] + rng.normal(0.0, p.sigma), p.centers[b][1] + rng.normal(0.0, p.sigma)};
            ds.items.emplace_back(std::move(v));
            ds.labels.push_back(label);
        }
    }
    ds.source_ids.resize(ds.items.size());
    for (std::size_t i = 0; i < ds.items.size(); ++i) ds.source_ids[i] = static_cast<ItemId>(i);
    return ds;
}

LabeledDataset gen_two_spirals(const TwoSpiralsParams& p, std::uint64_t seed) {
    if (p.n < 2) throw ConfigError("gen_two_spirals: n must be >= 2");
    if (p.noise < 0.0) throw ConfigError("gen_two_spirals: noise must be >= 0");
    LabeledDataset ds;
    ds.name = "two-spirals";
    Rng rng(seed);
    // arm 0 gets the extra point when n is odd
    const std::size_t n0 = (p.n + 1) / 2;
    for (std::size_t i = 0; i < p.n; ++i) {
        const std::size_t arm = i < n0 ? 0 : 1;
        const std::size_t j = arm == 0 ? i : i - n0;
        const std::size_t arm_n = arm == 0 ? n0 : p.n - n0;
        const double t = arm_n > 1 ? static_cast<double>(j) / static_cast<double>(arm_n - 1) : 0.0;
        const double angle = p.turns * 6.283185307179586477 * t + (arm == 0 ? 0.0 : 3.141592653589793238);
        const double radius = 0.5 + 2.0 * t;
        DenseVector v{radius * std::cos(angle) + rng.normal(0.0, p.noise),
                      radius * std::sin(angle) + rng.normal(0.0, p.noise)};
        ds.items.emplace_back(std::move(v));
        ds.labels.push_back("s" + std::to_string(arm));
    }
    ds.source_ids.resize(ds.items.size());
    for (std::size_t i = 0; i < ds.items.size(); ++i) ds.source_ids[i] = static_cast<ItemId>(i);
    return ds;
}

LabeledDataset gen_synthetic(const std::string& kind, const SyntheticParams& params, std::uint64_t seed) {
    if (kind == "gaussian-blobs") return gen_gaussian_blobs(params.blobs, seed);
    if (kind == "two-spirals") return gen_two_spirals(params.spirals, seed);
    throw ConfigError("gen_synthetic: unknown kind '" + kind + "'");
}

}  // namespace crs
