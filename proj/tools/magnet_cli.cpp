// Command-line surface: generate DSBM benchmarks, export magnetic Laplacians,
// train and sweep the spectral network, and run the mathematical verification
// suite. Exit codes: 0 success, 1 internal failure, 2 usage or config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "magnet/data.hpp"
#include "magnet/dsbm.hpp"
#include "magnet/experiment.hpp"
#include "magnet/graph.hpp"
#include "magnet/spectral.hpp"
#include "magnet/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in " + path + ": " +
                                    e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct GenerateOptions {
    std::string config;
    std::string preset = "ordered";
    int num_vertices = 0;
    int num_clusters = 5;
    double alpha_star = 0.1;
    double alpha_diag = 0.1;
    double beta_star = 0.05;
    std::uint64_t seed = 1;
    std::string out = "dsbm_out";
    // which flags were given explicitly (flags override config keys)
    bool has_preset = false, has_n = false, has_clusters = false;
    bool has_alpha_star = false, has_alpha_diag = false, has_beta_star = false;
    bool has_seed = false;
};

void run_generate(const GenerateOptions& o) {
    magnet::DsbmParams params;
    std::string preset = o.preset;
    bool custom_matrices = false;
    int num_vertices = o.num_vertices;
    int num_clusters = o.num_clusters;
    double alpha_star = o.alpha_star, alpha_diag = o.alpha_diag;
    double beta_star = o.beta_star;
    std::uint64_t seed = o.seed;

    if (!o.config.empty()) {
        const json j = load_json(o.config);
        if (!j.is_object())
            throw std::invalid_argument("config must be an object");
        if (j.contains("alpha") || j.contains("beta") ||
            j.contains("cluster_sizes")) {
            for (const auto& [key, _] : j.items())
                if (key != "num_vertices" && key != "cluster_sizes" &&
                    key != "alpha" && key != "beta" && key != "seed")
                    throw std::invalid_argument("unknown key '" + key +
                                                "' in generator config");
            custom_matrices = true;
            params.num_vertices = j.at("num_vertices").get<int>();
            params.cluster_sizes =
                j.at("cluster_sizes").get<std::vector<int>>();
            params.num_clusters = static_cast<int>(params.cluster_sizes.size());
            params.alpha =
                j.at("alpha").get<std::vector<std::vector<double>>>();
            params.beta = j.at("beta").get<std::vector<std::vector<double>>>();
            params.seed = j.value("seed", std::uint64_t{1});
            if (o.has_seed) params.seed = seed;
        } else {
            for (const auto& [key, _] : j.items())
                if (key != "preset" && key != "num_vertices" &&
                    key != "num_clusters" && key != "alpha_star" &&
                    key != "alpha_diag" && key != "beta_star" && key != "seed")
                    throw std::invalid_argument("unknown key '" + key +
                                                "' in generator config");
            if (!o.has_preset) preset = j.value("preset", std::string("ordered"));
            if (!o.has_n) num_vertices = j.value("num_vertices", 0);
            if (!o.has_clusters) num_clusters = j.value("num_clusters", 5);
            if (!o.has_alpha_star) alpha_star = j.value("alpha_star", 0.1);
            if (!o.has_alpha_diag) alpha_diag = j.value("alpha_diag", 0.1);
            if (!o.has_beta_star) beta_star = j.value("beta_star", 0.05);
            if (!o.has_seed) seed = j.value("seed", std::uint64_t{1});
        }
    }

    if (!custom_matrices) {
        if (num_vertices <= 0)
            throw std::invalid_argument(
                "generate needs --num-vertices (or num_vertices in --config)");
        if (preset == "ordered")
            params = magnet::ordered_meta(num_vertices, num_clusters,
                                          alpha_star, alpha_diag, beta_star,
                                          seed);
        else if (preset == "cyclic" || preset == "cyclic_noisy")
            params = magnet::cyclic_meta(num_vertices, num_clusters, beta_star,
                                         preset == "cyclic_noisy", seed);
        else
            throw std::invalid_argument("unknown preset '" + preset + "'");
    }
    magnet::validate_dsbm(params);
    const magnet::DsbmSample sample = magnet::sample_dsbm(params);

    fs::create_directories(o.out);
    auto artifact = [&](const std::string& name) {
        return (fs::path(o.out) / name).string();
    };
    magnet::write_edge_list_file(sample.graph, artifact("edges.tsv"));
    magnet::write_labels_file(artifact("labels.tsv"), sample.labels);
    magnet::write_features_file(artifact("features.tsv"), sample.features);

    json manifest;
    manifest["format"] = "magnet-manifest";
    manifest["version"] = 1;
    manifest["kind"] = "generate";
    manifest["preset"] = custom_matrices ? "custom" : preset;
    json pj;
    pj["num_vertices"] = params.num_vertices;
    pj["num_clusters"] = params.num_clusters;
    pj["cluster_sizes"] = params.cluster_sizes;
    pj["alpha"] = params.alpha;
    pj["beta"] = params.beta;
    pj["seed"] = params.seed;
    manifest["params"] = pj;
    manifest["outputs"] = {"edges.tsv", "labels.tsv", "features.tsv"};
    write_text_file(artifact("manifest.json"), manifest.dump(2) + "\n");

    std::printf("wrote %d vertices, %d edges, %d clusters to %s\n",
                sample.graph.num_vertices, sample.graph.num_edges(),
                params.num_clusters, o.out.c_str());
}

struct LaplacianOptions {
    std::string graph;
    double q = 0.25;
    std::string normalization = "normalized";
    bool allow_extended_q = false;
    bool spectrum = false;
    std::string out = ".";
};

void run_laplacian(const LaplacianOptions& o) {
    const magnet::DirectedGraph g = magnet::read_edge_list_file(o.graph);
    magnet::Normalization norm;
    if (o.normalization == "normalized")
        norm = magnet::Normalization::normalized;
    else if (o.normalization == "unnormalized")
        norm = magnet::Normalization::unnormalized;
    else
        throw std::invalid_argument(
            "--normalization must be 'normalized' or 'unnormalized'");

    const magnet::MagneticLaplacian l =
        magnet::build_laplacian(g, o.q, norm, o.allow_extended_q);
    fs::create_directories(o.out);
    const std::string matrix_path =
        (fs::path(o.out) / "laplacian.tsv").string();
    magnet::write_laplacian_file(matrix_path, l);
    std::printf("wrote %s (%d x %d, %s, q=%g)\n", matrix_path.c_str(),
                g.num_vertices, g.num_vertices, o.normalization.c_str(), o.q);

    if (o.spectrum) {
        const magnet::EigenDecomposition eig = magnet::eigendecompose(l.matrix);
        const std::string csv_path =
            (fs::path(o.out) / "spectrum.csv").string();
        std::string csv = "index,eigenvalue\n";
        char buf[64];
        for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i,
                          eig.eigenvalues[i]);
            csv += buf;
        }
        write_text_file(csv_path, csv);
        std::printf("eigenvalues:");
        const std::size_t shown = std::min<std::size_t>(16, eig.eigenvalues.size());
        for (std::size_t i = 0; i < shown; ++i)
            std::printf(" %.12g", eig.eigenvalues[i]);
        if (shown < eig.eigenvalues.size())
            std::printf(" ... (%zu total, see %s)", eig.eigenvalues.size(),
                        csv_path.c_str());
        std::printf("\n");
    }
}

struct TrainOptions {
    std::string config;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string out = "magnet_run";
};

void run_train(const TrainOptions& o) {
    magnet::ExperimentConfig cfg = magnet::load_experiment_config(o.config);
    if (o.has_seed) {
        cfg.seed = o.seed;
        cfg.train.seed = o.seed;
    }
    const magnet::ExperimentResult res = magnet::run_experiment(cfg, o.out);
    std::printf("config,q,seed,val_acc,test_acc,epochs,seconds\n");
    std::printf("%s,%.17g,%llu,%.17g,%.17g,%d,%.3f\n",
                magnet::to_string(cfg.task).c_str(), cfg.model.q,
                static_cast<unsigned long long>(cfg.seed),
                res.report.best_val_acc, res.report.test_acc,
                res.report.epochs_run, res.report.wall_seconds);
    std::printf("artifacts under %s\n", o.out.c_str());
}

struct SweepOptions {
    std::string config;
    std::string out = "magnet_sweep";
    bool plot = false;
    int workers = 0;
};

void run_sweep_cmd(const SweepOptions& o) {
    const magnet::SweepConfig cfg = magnet::load_sweep_config(o.config);
    const int workers =
        o.workers > 0 ? o.workers : magnet::worker_count_from_env();
    const magnet::SweepSummary summary =
        magnet::run_sweep(cfg, o.out, workers, o.plot);
    std::printf("%s,mean_val_acc,mean_test_acc,std_test_acc\n",
                cfg.axis.c_str());
    for (std::size_t i = 0; i < cfg.values.size(); ++i)
        std::printf("%g,%.6f,%.6f,%.6f\n", cfg.values[i],
                    summary.mean_val_acc[i], summary.mean_test_acc[i],
                    summary.std_test_acc[i]);
    std::printf("best %s = %g (mean validation accuracy %.6f)\n",
                cfg.axis.c_str(), cfg.values[summary.best_value_index],
                summary.mean_val_acc[summary.best_value_index]);
    std::printf("artifacts under %s\n", o.out.c_str());
}

int run_verify(bool quick) {
    const std::vector<magnet::CheckResult> results =
        magnet::run_verification_suite(quick);
    int failures = 0;
    for (const magnet::CheckResult& r : results) {
        std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        if (!r.pass) ++failures;
    }
    if (failures == 0)
        std::printf("all %zu checks passed\n", results.size());
    else
        std::printf("%d of %zu checks failed\n", failures, results.size());
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Spectral learning on directed graphs via the magnetic Laplacian"};
    app.require_subcommand(1);
    int exit_status = 0;

    GenerateOptions gen;
    CLI::App* cgen = app.add_subcommand(
        "generate", "Sample a directed stochastic block model to files");
    cgen->add_option("--config", gen.config, "JSON generator config");
    CLI::Option* op = cgen->add_option("--preset", gen.preset,
                                       "ordered, cyclic or cyclic_noisy");
    CLI::Option* on = cgen->add_option("--num-vertices", gen.num_vertices,
                                       "number of vertices");
    CLI::Option* oc = cgen->add_option("--num-clusters", gen.num_clusters,
                                       "number of clusters");
    CLI::Option* oas = cgen->add_option("--alpha-star", gen.alpha_star,
                                        "between-cluster edge probability");
    CLI::Option* oad = cgen->add_option("--alpha-diag", gen.alpha_diag,
                                        "within-cluster edge probability");
    CLI::Option* obs = cgen->add_option("--beta-star", gen.beta_star,
                                        "orientation probability");
    CLI::Option* ogs = cgen->add_option("--seed", gen.seed, "master seed");
    cgen->add_option("--out", gen.out, "output directory");
    cgen->callback([&]() {
        gen.has_preset = op->count() > 0;
        gen.has_n = on->count() > 0;
        gen.has_clusters = oc->count() > 0;
        gen.has_alpha_star = oas->count() > 0;
        gen.has_alpha_diag = oad->count() > 0;
        gen.has_beta_star = obs->count() > 0;
        gen.has_seed = ogs->count() > 0;
        run_generate(gen);
    });

    LaplacianOptions lap;
    CLI::App* clap = app.add_subcommand(
        "laplacian", "Export a magnetic Laplacian (optionally its spectrum)");
    clap->add_option("--graph", lap.graph, "edge list file")->required();
    clap->add_option("--q", lap.q, "charge parameter");
    clap->add_option("--normalization", lap.normalization,
                     "normalized or unnormalized");
    clap->add_flag("--allow-extended-q", lap.allow_extended_q,
                   "accept q outside [0, 0.25]");
    clap->add_flag("--spectrum", lap.spectrum, "also export eigenvalues");
    clap->add_option("--out", lap.out, "output directory");
    clap->callback([&]() { run_laplacian(lap); });

    TrainOptions tr;
    CLI::App* ctr = app.add_subcommand(
        "train", "Run one training experiment from a config file");
    ctr->add_option("--config", tr.config, "experiment config JSON")
        ->required();
    CLI::Option* ots = ctr->add_option("--seed", tr.seed, "master seed override");
    ctr->add_option("--out", tr.out, "output directory");
    ctr->callback([&]() {
        tr.has_seed = ots->count() > 0;
        run_train(tr);
    });

    SweepOptions sw;
    CLI::App* csw = app.add_subcommand(
        "sweep", "Sweep q or beta_star across seeds and aggregate");
    csw->add_option("--config", sw.config, "sweep config JSON")->required();
    csw->add_option("--out", sw.out, "output directory");
    csw->add_flag("--plot", sw.plot, "write accuracy charts");
    csw->add_option("--workers", sw.workers,
                    "worker threads (default: MAGNET_WORKERS or hardware)");
    csw->callback([&]() { run_sweep_cmd(sw); });

    bool quick = false;
    CLI::App* cver = app.add_subcommand(
        "verify", "Run the mathematical verification suite");
    cver->add_flag("--quick", quick, "reduced sweep sizes");
    cver->callback([&]() { exit_status = run_verify(quick); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_status;
}
