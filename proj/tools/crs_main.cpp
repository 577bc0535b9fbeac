// crs: cluster representative selection and nearest-prototype classification.
//
// Subcommands: gen, select, classify, eval, sweep. Every output file embeds
// the effective configuration; identical invocations with an explicit seed
// and --workers 1 produce byte-identical outputs.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "crs/baselines.hpp"
#include "crs/crs_select.hpp"
#include "crs/dataset.hpp"
#include "crs/eval.hpp"
#include "crs/io_util.hpp"
#include "crs/knn_graph.hpp"
#include "crs/npc.hpp"
#include "crs/rng.hpp"

namespace {

using crs::ConfigError;

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct DataArgs {
    std::string path;
    std::string format = "csv";  // csv | sparse | matrix
    std::string label_col = "label";
};

struct SimArgs {
    std::string sim = "cosine";  // cosine | rbf (matrix datasets always use lookup)
    double rbf_gamma = 1.0;
};

struct LoadedData {
    crs::LabeledDataset ds;
    crs::SimilarityMeasure measure = crs::SimilarityMeasure::cosine_dense();
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--data", args.path, "input dataset file")->required();
    cmd->add_option("--format", args.format, "dataset format: csv, sparse, matrix")
        ->check(CLI::IsMember({"csv", "sparse", "matrix"}))
        ->capture_default_str();
    cmd->add_option("--label-col", args.label_col, "CSV label column (name or index)")->capture_default_str();
}

void add_sim_options(CLI::App* cmd, SimArgs& args) {
    cmd->add_option("--sim", args.sim, "similarity for feature payloads: cosine, rbf")
        ->check(CLI::IsMember({"cosine", "rbf"}))
        ->capture_default_str();
    cmd->add_option("--rbf-gamma", args.rbf_gamma, "bandwidth for --sim rbf")->capture_default_str();
}

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("file not found: " + path);
}

LoadedData load_data(const DataArgs& data, const SimArgs& sim) {
    require_file(data.path);
    LoadedData out;
    if (data.format == "csv") {
        out.ds = crs::load_dense_csv(data.path, data.label_col);
        out.measure = sim.sim == "rbf" ? crs::SimilarityMeasure::rbf_dense(sim.rbf_gamma)
                                       : crs::SimilarityMeasure::cosine_dense();
    } else if (data.format == "sparse") {
        if (sim.sim == "rbf") throw ConfigError("--sim rbf requires dense data");
        out.ds = crs::load_sparse_records(data.path);
        out.measure = crs::SimilarityMeasure::cosine_sparse();
    } else {
        auto [ds, matrix] = crs::load_similarity_matrix(data.path);
        out.ds = std::move(ds);
        out.measure = crs::SimilarityMeasure::matrix_lookup(std::move(matrix));
    }
    return out;
}

void echo_data(ConfigEcho& echo, const DataArgs& data, const SimArgs& sim) {
    echo.emplace_back("data", data.path);
    echo.emplace_back("format", data.format);
    if (data.format == "csv") echo.emplace_back("label_col", data.label_col);
    if (data.format == "matrix") {
        echo.emplace_back("sim", "matrix-lookup");
    } else {
        echo.emplace_back("sim", sim.sim);
        if (sim.sim == "rbf") echo.emplace_back("rbf_gamma", crs::format_double(sim.rbf_gamma));
    }
}

std::vector<std::string> echo_lines(const ConfigEcho& echo) {
    std::vector<std::string> lines;
    lines.reserve(echo.size());
    for (const auto& [k, v] : echo) lines.push_back(k + "=" + v);
    return lines;
}

// method parameter block shared by select, eval, and sweep
struct MethodArgs {
    std::string method = "crs";
    int k = 10;
    double epsilon = 0.95;
    std::string tau = "auto";
    std::string graph = "nn-descent";
    double rho = 0.7;
    double delta_nn = 0.001;
    int max_iters = 30;
    std::string score = "degree";
    double fraction = 0.05;
    std::string delta = "auto";
    int refine_iters = 20;
};

void add_method_options(CLI::App* cmd, MethodArgs& args, bool with_method) {
    if (with_method)
        cmd->add_option("--method", args.method, "prototype selection method")
            ->check(CLI::IsMember({"crs", "delta-medoids", "random", "full"}))
            ->capture_default_str();
    cmd->add_option("--k", args.k, "neighbor count for the k-NN graph")->capture_default_str();
    cmd->add_option("--epsilon", args.epsilon, "coverage requirement in (0,1]")->capture_default_str();
    cmd->add_option("--tau", args.tau, "edge pruning threshold: auto (cluster homogeneity) or a number")
        ->capture_default_str();
    cmd->add_option("--graph", args.graph, "k-NN graph construction: nn-descent or exact")
        ->check(CLI::IsMember({"nn-descent", "exact"}))
        ->capture_default_str();
    cmd->add_option("--rho", args.rho, "reverse-neighbor sample rate")->capture_default_str();
    cmd->add_option("--delta-nn", args.delta_nn, "graph construction termination threshold")->capture_default_str();
    cmd->add_option("--max-iters", args.max_iters, "graph construction iteration cap")->capture_default_str();
    cmd->add_option("--score", args.score, "greedy scoring: degree or weighted")
        ->check(CLI::IsMember({"degree", "weighted"}))
        ->capture_default_str();
    cmd->add_option("--fraction", args.fraction, "sample fraction for --method random")->capture_default_str();
    cmd->add_option("--delta", args.delta, "delta-medoids threshold: auto (sampled homogeneity) or a number")
        ->capture_default_str();
    cmd->add_option("--refine-iters", args.refine_iters, "delta-medoids refinement cap")->capture_default_str();
}

double parse_numeric_or(const std::string& value, const char* flag) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string(flag) + ": expected 'auto' or a number, got '" + value + "'");
    }
}

crs::MethodSpec make_method_spec(const MethodArgs& args, std::uint64_t seed) {
    crs::MethodSpec spec;
    if (args.method == "crs") spec.method = crs::Method::Crs;
    else if (args.method == "delta-medoids") spec.method = crs::Method::DeltaMedoids;
    else if (args.method == "random") spec.method = crs::Method::Random;
    else spec.method = crs::Method::Full;

    if (args.k < 1) throw ConfigError("--k must be >= 1");
    if (!(args.epsilon > 0.0 && args.epsilon <= 1.0)) throw ConfigError("--epsilon must be in (0,1]");
    spec.crs.k = args.k;
    spec.crs.epsilon = args.epsilon;
    if (args.tau != "auto") spec.crs.fixed_tau = parse_numeric_or(args.tau, "--tau");
    spec.crs.graph_mode = args.graph == "exact" ? crs::GraphMode::Exact : crs::GraphMode::NnDescent;
    spec.crs.score_mode = args.score == "weighted" ? crs::ScoreMode::WeightPrimary : crs::ScoreMode::DegreePrimary;
    spec.crs.nn.k = args.k;
    spec.crs.nn.rho = args.rho;
    spec.crs.nn.delta_nn = args.delta_nn;
    spec.crs.nn.max_iters = args.max_iters;
    spec.crs.nn.seed = seed;

    if (args.delta != "auto") spec.dm_delta = parse_numeric_or(args.delta, "--delta");
    spec.dm_max_refine_iters = args.refine_iters;
    if (!(args.fraction > 0.0 && args.fraction <= 1.0)) throw ConfigError("--fraction must be in (0,1]");
    spec.random_fraction = args.fraction;
    return spec;
}

void echo_method(ConfigEcho& echo, const MethodArgs& args, std::uint64_t seed, int workers) {
    echo.emplace_back("method", args.method);
    if (args.method == "crs") {
        echo.emplace_back("k", std::to_string(args.k));
        echo.emplace_back("epsilon", crs::format_double(args.epsilon));
        echo.emplace_back("tau", args.tau);
        echo.emplace_back("graph", args.graph);
        echo.emplace_back("rho", crs::format_double(args.rho));
        echo.emplace_back("delta_nn", crs::format_double(args.delta_nn));
        echo.emplace_back("max_iters", std::to_string(args.max_iters));
        echo.emplace_back("score", args.score);
    } else if (args.method == "delta-medoids") {
        echo.emplace_back("delta", args.delta);
        echo.emplace_back("refine_iters", std::to_string(args.refine_iters));
    } else if (args.method == "random") {
        echo.emplace_back("fraction", crs::format_double(args.fraction));
    }
    echo.emplace_back("seed", std::to_string(seed));
    echo.emplace_back("workers", std::to_string(workers));
}

void set_workers(int workers) {
    if (workers < 1) throw ConfigError("--workers must be >= 1");
#ifdef _OPENMP
    omp_set_num_threads(workers);
#endif
}

// Builds prototypes per cluster the same way the evaluation harness does:
// fresh counter per cluster, seed salted with the cluster label.
std::vector<crs::Prototype> build_prototypes(const crs::LabeledDataset& ds, const crs::SimilarityMeasure& measure,
                                             const crs::MethodSpec& spec, std::uint64_t seed,
                                             std::string* graph_dump) {
    const std::vector<crs::Cluster> clusters = crs::clusters_of(ds);
    std::vector<crs::Prototype> protos(clusters.size());
    std::vector<std::string> dumps(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        crs::CountingSimilarity cs(measure, ds);
        const std::uint64_t cluster_seed = crs::mix_seed(seed, crs::fnv1a(clusters[c].label));
        switch (spec.method) {
            case crs::Method::Crs: {
                crs::CrsParams params = spec.crs;
                params.nn.seed = cluster_seed;
                if (graph_dump) {
                    crs::SelectionTrace trace;
                    protos[c] = crs::select_representatives(clusters[c], cs, params, &trace);
                    dumps[c] = crs::dump_graph(trace.graph);
                } else {
                    protos[c] = crs::select_representatives(clusters[c], cs, params);
                }
                break;
            }
            case crs::Method::DeltaMedoids: {
                crs::DeltaMedoidsParams params;
                params.max_refine_iters = spec.dm_max_refine_iters;
                params.delta = spec.dm_delta ? *spec.dm_delta
                               : clusters[c].size() >= 2
                                   ? crs::approx_homogeneity(clusters[c], cs, 0.05, cluster_seed)
                                   : 1.0;
                protos[c] = crs::delta_medoids(clusters[c], cs, params);
                break;
            }
            case crs::Method::Random:
                protos[c] = crs::random_fraction(clusters[c], spec.random_fraction, cluster_seed);
                break;
            case crs::Method::Full:
                protos[c] = crs::full_cluster(clusters[c]);
                break;
        }
    }
    if (graph_dump) {
        std::ostringstream all;
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            all << "# cluster " << clusters[c].label << "\n" << dumps[c];
        }
        *graph_dump = all.str();
    }
    return protos;
}

int run_gen(const std::string& kind, std::size_t blobs, std::size_t per, double sigma, const std::string& centers,
            double spread, std::size_t n, double noise, double turns, std::uint64_t seed, const std::string& out) {
    crs::SyntheticParams params;
    params.blobs.per_blob = per;
    params.blobs.sigma = sigma;
    if (!centers.empty()) {
        std::istringstream list(centers);
        std::string pair;
        while (std::getline(list, pair, ';')) {
            const std::size_t comma = pair.find(',');
            if (comma == std::string::npos) throw ConfigError("--centers: expected x,y;x,y;...");
            params.blobs.centers.push_back(
                {std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
        }
    } else {
        for (std::size_t b = 0; b < blobs; ++b) {
            const double angle = 6.283185307179586477 * static_cast<double>(b) / static_cast<double>(std::max<std::size_t>(blobs, 1));
            params.blobs.centers.push_back({spread * std::cos(angle), spread * std::sin(angle)});
        }
    }
    params.spirals.n = n;
    params.spirals.noise = noise;
    params.spirals.turns = turns;

    const crs::LabeledDataset ds = crs::gen_synthetic(kind, params, seed);

    ConfigEcho echo;
    echo.emplace_back("command", "gen");
    echo.emplace_back("kind", kind);
    if (kind == "gaussian-blobs") {
        std::ostringstream c;
        for (std::size_t b = 0; b < params.blobs.centers.size(); ++b) {
            if (b) c << ";";
            c << crs::format_double(params.blobs.centers[b][0]) << "," << crs::format_double(params.blobs.centers[b][1]);
        }
        echo.emplace_back("centers", c.str());
        echo.emplace_back("per_blob", std::to_string(per));
        echo.emplace_back("sigma", crs::format_double(sigma));
    } else {
        echo.emplace_back("n", std::to_string(n));
        echo.emplace_back("noise", crs::format_double(noise));
        echo.emplace_back("turns", crs::format_double(turns));
    }
    echo.emplace_back("seed", std::to_string(seed));

    crs::atomic_write_file(out, [&](std::ostream& os) { crs::write_dense_csv(ds, os, echo_lines(echo)); });
    std::cerr << "wrote " << ds.size() << " samples to " << out << "\n";
    return 0;
}

int run_select(const DataArgs& data, const SimArgs& sim, const MethodArgs& method, std::uint64_t seed, int workers,
               const std::string& out, const std::string& dump_path) {
    set_workers(workers);
    LoadedData loaded = load_data(data, sim);
    const crs::MethodSpec spec = make_method_spec(method, seed);

    std::string dump;
    std::vector<crs::Prototype> protos =
        build_prototypes(loaded.ds, loaded.measure, spec, seed, dump_path.empty() ? nullptr : &dump);

    ConfigEcho echo;
    echo.emplace_back("command", "select");
    echo_data(echo, data, sim);
    echo_method(echo, method, seed, workers);

    crs::atomic_write_file(out, [&](std::ostream& os) { crs::write_prototypes(protos, os, echo_lines(echo)); });
    if (!dump_path.empty()) crs::atomic_write_file(dump_path, [&](std::ostream& os) { os << dump; });

    std::size_t total = 0;
    for (const auto& p : protos) total += p.size();
    std::cerr << "selected " << total << " representatives over " << protos.size() << " clusters -> " << out << "\n";
    return 0;
}

int run_classify(const DataArgs& data, const SimArgs& sim, const std::string& proto_path,
                 const std::string& queries_path, const std::string& queries_label_col, int workers,
                 const std::string& out) {
    set_workers(workers);
    LoadedData loaded = load_data(data, sim);
    require_file(proto_path);
    require_file(queries_path);
    crs::PrototypeSet ps = crs::PrototypeSet::build(loaded.ds, crs::load_prototypes(proto_path));

    std::vector<crs::FeatureVector> queries;
    std::vector<std::string> query_names;
    if (data.format == "matrix") {
        // queries are row indices into the same similarity matrix
        std::ifstream in(queries_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto row = static_cast<std::uint32_t>(std::stoul(line));
            queries.emplace_back(crs::MatrixHandle{row});
            query_names.push_back(line);
        }
        if (queries.empty()) throw crs::ParseError(queries_path + ": no query ids");
    } else if (data.format == "sparse") {
        const crs::LabeledDataset qds = crs::load_sparse_records(queries_path);
        queries = qds.items;
        for (std::size_t i = 0; i < qds.size(); ++i) query_names.push_back(std::to_string(i));
    } else {
        std::optional<std::string> label_col;
        if (queries_label_col != "none") label_col = queries_label_col;
        const crs::LabeledDataset qds = crs::load_dense_csv(queries_path, label_col);
        queries = qds.items;
        for (std::size_t i = 0; i < qds.size(); ++i) query_names.push_back(std::to_string(i));
    }

    crs::CountingSimilarity cs(loaded.measure, loaded.ds);
    const std::vector<crs::Classification> results = crs::batch_classify(queries, ps, cs);

    ConfigEcho echo;
    echo.emplace_back("command", "classify");
    echo_data(echo, data, sim);
    echo.emplace_back("proto", proto_path);
    echo.emplace_back("queries", queries_path);
    echo.emplace_back("workers", std::to_string(workers));

    crs::atomic_write_file(out, [&](std::ostream& os) {
        for (const auto& line : echo_lines(echo)) os << "# " << line << "\n";
        for (std::size_t i = 0; i < results.size(); ++i)
            os << query_names[i] << "\t" << results[i].label << "\t" << results[i].best_rep << "\t"
               << crs::format_double(results[i].best_sim) << "\n";
    });
    std::cerr << "classified " << results.size() << " queries (" << cs.count() << " similarity calls) -> " << out
              << "\n";
    return 0;
}

int run_eval_cmd(const DataArgs& data, const SimArgs& sim, const MethodArgs& method, double test_fraction,
                 std::uint64_t seed, int workers, const std::string& out, const std::string& per_class_path,
                 const std::string& confusion_path, const std::string& per_cluster_path, bool timings) {
    set_workers(workers);
    LoadedData loaded = load_data(data, sim);
    const crs::MethodSpec spec = make_method_spec(method, seed);
    crs::EvalOptions opts;
    opts.test_fraction = test_fraction;
    opts.seed = seed;

    const crs::MetricsReport report = crs::run_eval(loaded.ds, loaded.measure, spec, opts);

    ConfigEcho echo;
    echo.emplace_back("command", "eval");
    echo_data(echo, data, sim);
    echo_method(echo, method, seed, workers);
    echo.emplace_back("test_fraction", crs::format_double(test_fraction));

    crs::atomic_write_file(out, [&](std::ostream& os) { os << crs::report_json(report, echo, timings); });
    if (!per_class_path.empty())
        crs::atomic_write_file(per_class_path, [&](std::ostream& os) { os << crs::per_class_csv(report); });
    if (!confusion_path.empty())
        crs::atomic_write_file(confusion_path, [&](std::ostream& os) { os << crs::confusion_csv(report); });
    if (!per_cluster_path.empty()) {
        auto [train, test] = crs::split_train_test(loaded.ds, test_fraction, seed);
        const auto meta = crs::describe_clusters(train, loaded.measure, seed);
        crs::atomic_write_file(per_cluster_path, [&](std::ostream& os) {
            os << crs::per_cluster_table_csv({{method.method, report}}, meta);
        });
    }
    std::cerr << "macro P/R " << crs::format_double(report.macro_precision) << "/"
              << crs::format_double(report.macro_recall) << ", prototype fraction "
              << crs::format_double(report.prototype_fraction) << ", S_build "
              << crs::format_double(report.s_ratio_build) << " -> " << out << "\n";
    return 0;
}

int run_sweep(const DataArgs& data, const SimArgs& sim, const MethodArgs& method, const std::string& ks_arg,
              double test_fraction, std::uint64_t seed, int workers, const std::string& out,
              const std::string& summary_path, bool timings) {
    set_workers(workers);
    std::vector<int> ks;
    {
        std::istringstream list(ks_arg);
        std::string tok;
        while (std::getline(list, tok, ',')) {
            if (tok.empty()) continue;
            try {
                ks.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw ConfigError("--ks: bad value '" + tok + "'");
            }
        }
        if (ks.empty()) throw ConfigError("--ks: no values");
    }
    LoadedData loaded = load_data(data, sim);
    MethodArgs crs_method = method;
    crs_method.method = "crs";
    const crs::MethodSpec spec = make_method_spec(crs_method, seed);
    crs::EvalOptions opts;
    opts.test_fraction = test_fraction;
    opts.seed = seed;

    const auto reports = crs::sweep_k(loaded.ds, loaded.measure, spec, ks, opts);

    ConfigEcho echo;
    echo.emplace_back("command", "sweep");
    echo_data(echo, data, sim);
    echo_method(echo, crs_method, seed, workers);
    {
        std::ostringstream kss;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (i) kss << ",";
            kss << reports[i].first;
        }
        echo.emplace_back("ks", kss.str());
    }
    echo.emplace_back("test_fraction", crs::format_double(test_fraction));

    crs::atomic_write_file(out, [&](std::ostream& os) { os << crs::sweep_json(reports, echo, timings); });
    if (!summary_path.empty()) {
        crs::atomic_write_file(summary_path, [&](std::ostream& os) {
            os << "k,prototype_fraction,macro_precision,macro_recall,calls_build,s_ratio_build\n";
            for (const auto& [k, r] : reports)
                os << k << "," << crs::format_double(r.prototype_fraction) << ","
                   << crs::format_double(r.macro_precision) << "," << crs::format_double(r.macro_recall) << ","
                   << r.calls_build << "," << crs::format_double(r.s_ratio_build) << "\n";
        });
    }
    for (const auto& [k, r] : reports)
        std::cerr << "k=" << k << ": fraction " << crs::format_double(r.prototype_fraction) << ", macro P/R "
                  << crs::format_double(r.macro_precision) << "/" << crs::format_double(r.macro_recall) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cluster representative selection and nearest-prototype classification"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic 2-D dataset as dense CSV");
    std::string gen_kind = "gaussian-blobs";
    std::size_t gen_blobs = 2, gen_per = 100, gen_n = 255;
    double gen_sigma = 0.1, gen_spread = 5.0, gen_noise = 0.0, gen_turns = 1.75;
    std::string gen_centers, gen_out;
    std::uint64_t gen_seed = 42;
    gen->add_option("--kind", gen_kind, "gaussian-blobs or two-spirals")->capture_default_str();
    gen->add_option("--blobs", gen_blobs, "number of blobs")->capture_default_str();
    gen->add_option("--per", gen_per, "points per blob")->capture_default_str();
    gen->add_option("--sigma", gen_sigma, "blob standard deviation")->capture_default_str();
    gen->add_option("--centers", gen_centers, "explicit blob centers x,y;x,y;...");
    gen->add_option("--spread", gen_spread, "radius of the default center circle")->capture_default_str();
    gen->add_option("--n", gen_n, "total points for two-spirals")->capture_default_str();
    gen->add_option("--noise", gen_noise, "spiral noise")->capture_default_str();
    gen->add_option("--turns", gen_turns, "spiral turns")->capture_default_str();
    gen->add_option("--seed", gen_seed, "random seed")->envname("CRS_SEED")->capture_default_str();
    gen->add_option("--out", gen_out, "output CSV path")->required();

    // select
    auto* select = app.add_subcommand("select", "build cluster prototypes");
    DataArgs sel_data;
    SimArgs sel_sim;
    MethodArgs sel_method;
    std::uint64_t sel_seed = 42;
    int sel_workers = 1;
    std::string sel_out, sel_dump;
    add_data_options(select, sel_data);
    add_sim_options(select, sel_sim);
    add_method_options(select, sel_method, true);
    select->add_option("--seed", sel_seed, "random seed")->envname("CRS_SEED")->capture_default_str();
    select->add_option("--workers", sel_workers, "worker threads (1 = deterministic)")->capture_default_str();
    select->add_option("--out", sel_out, "output prototype file")->required();
    select->add_option("--dump-graph", sel_dump, "also write the k-NN graphs (crs method only)");

    // classify
    auto* classify = app.add_subcommand("classify", "nearest-prototype classification of query samples");
    DataArgs cls_data;
    SimArgs cls_sim;
    std::string cls_proto, cls_queries, cls_qlabel = "none", cls_out;
    int cls_workers = 1;
    add_data_options(classify, cls_data);
    add_sim_options(classify, cls_sim);
    classify->add_option("--proto", cls_proto, "prototype file from select")->required();
    classify->add_option("--queries", cls_queries, "query file (CSV/sparse rows, or matrix row ids)")->required();
    classify->add_option("--queries-label-col", cls_qlabel, "label column in the query CSV, or none")
        ->capture_default_str();
    classify->add_option("--workers", cls_workers, "worker threads")->capture_default_str();
    classify->add_option("--out", cls_out, "output TSV path")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "train/test evaluation of a selection method");
    DataArgs ev_data;
    SimArgs ev_sim;
    MethodArgs ev_method;
    double ev_test_fraction = 0.3;
    std::uint64_t ev_seed = 42;
    int ev_workers = 1;
    std::string ev_out, ev_per_class, ev_confusion, ev_per_cluster;
    bool ev_timings = false;
    add_data_options(eval, ev_data);
    add_sim_options(eval, ev_sim);
    add_method_options(eval, ev_method, true);
    eval->add_option("--test-fraction", ev_test_fraction, "held-out fraction per cluster")->capture_default_str();
    eval->add_option("--seed", ev_seed, "random seed")->envname("CRS_SEED")->capture_default_str();
    eval->add_option("--workers", ev_workers, "worker threads (1 = deterministic)")->capture_default_str();
    eval->add_option("--out", ev_out, "report JSON path")->required();
    eval->add_option("--per-class-csv", ev_per_class, "per-class metrics CSV");
    eval->add_option("--confusion-csv", ev_confusion, "confusion matrix CSV");
    eval->add_option("--per-cluster-csv", ev_per_cluster, "per-cluster table CSV");
    eval->add_flag("--timings", ev_timings, "include wall-clock in the report (breaks byte reproducibility)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "eval the crs method across several k values on one split");
    DataArgs sw_data;
    SimArgs sw_sim;
    MethodArgs sw_method;
    std::string sw_ks = "5,10,15";
    double sw_test_fraction = 0.3;
    std::uint64_t sw_seed = 42;
    int sw_workers = 1;
    std::string sw_out, sw_summary;
    bool sw_timings = false;
    add_data_options(sweep, sw_data);
    add_sim_options(sweep, sw_sim);
    add_method_options(sweep, sw_method, false);
    sweep->add_option("--ks", sw_ks, "comma-separated k values")->capture_default_str();
    sweep->add_option("--test-fraction", sw_test_fraction, "held-out fraction per cluster")->capture_default_str();
    sweep->add_option("--seed", sw_seed, "random seed")->envname("CRS_SEED")->capture_default_str();
    sweep->add_option("--workers", sw_workers, "worker threads (1 = deterministic)")->capture_default_str();
    sweep->add_option("--out", sw_out, "sweep JSON path")->required();
    sweep->add_option("--summary-csv", sw_summary, "per-k summary CSV");
    sweep->add_flag("--timings", sw_timings, "include wall-clock in the reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return run_gen(gen_kind, gen_blobs, gen_per, gen_sigma, gen_centers, gen_spread, gen_n,
                                          gen_noise, gen_turns, gen_seed, gen_out);
        if (select->parsed())
            return run_select(sel_data, sel_sim, sel_method, sel_seed, sel_workers, sel_out, sel_dump);
        if (classify->parsed())
            return run_classify(cls_data, cls_sim, cls_proto, cls_queries, cls_qlabel, cls_workers, cls_out);
        if (eval->parsed())
            return run_eval_cmd(ev_data, ev_sim, ev_method, ev_test_fraction, ev_seed, ev_workers, ev_out,
                                ev_per_class, ev_confusion, ev_per_cluster, ev_timings);
        if (sweep->parsed())
            return run_sweep(sw_data, sw_sim, sw_method, sw_ks, sw_test_fraction, sw_seed, sw_workers, sw_out,
                             sw_summary, sw_timings);
    } catch (const crs::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crs::TypeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
