#include "magnet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace magnet {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
    if (!j.is_object())
        throw std::invalid_argument("expected an object at " + path);
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw std::invalid_argument("unknown key '" + key + "' at " + path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string to_string(ExperimentTask t) {
    switch (t) {
        case ExperimentTask::node: return "node";
        case ExperimentTask::link_existence: return "link_existence";
        case ExperimentTask::link_direction: return "link_direction";
        case ExperimentTask::link_three_class: return "link_three_class";
    }
    throw std::logic_error("unreachable");
}

ExperimentTask experiment_task_from_string(const std::string& s) {
    if (s == "node") return ExperimentTask::node;
    if (s == "link_existence") return ExperimentTask::link_existence;
    if (s == "link_direction") return ExperimentTask::link_direction;
    if (s == "link_three_class") return ExperimentTask::link_three_class;
    throw std::invalid_argument("unknown task '" + s + "'");
}

ExperimentConfig parse_experiment_config(const json& j) try {
    check_keys(j, "$", {"task", "seed", "data", "split", "model", "train"});
    ExperimentConfig cfg;
    cfg.task = experiment_task_from_string(
        j.at("task").get<std::string>());
    cfg.seed = j.value("seed", std::uint64_t{1});
    const bool is_link = cfg.task != ExperimentTask::node;

    const json& d = j.at("data");
    check_keys(d, "$.data",
               {"source", "preset", "num_vertices", "num_clusters",
                "alpha_star", "alpha_diag", "beta_star", "edge_list", "labels",
                "features"});
    cfg.data.source = d.at("source").get<std::string>();
    if (cfg.data.source == "dsbm") {
        cfg.data.preset = d.at("preset").get<std::string>();
        if (cfg.data.preset != "ordered" && cfg.data.preset != "cyclic" &&
            cfg.data.preset != "cyclic_noisy")
            throw std::invalid_argument("unknown DSBM preset '" +
                                        cfg.data.preset + "'");
        cfg.data.num_vertices = d.at("num_vertices").get<int>();
        cfg.data.num_clusters = d.value("num_clusters", 5);
        cfg.data.alpha_star = d.value("alpha_star", 0.1);
        cfg.data.alpha_diag = d.value("alpha_diag", 0.1);
        cfg.data.beta_star = d.value("beta_star", 0.05);
        if (d.contains("edge_list") || d.contains("labels"))
            throw std::invalid_argument(
                "edge_list/labels only apply to source \"files\"");
    } else if (cfg.data.source == "files") {
        cfg.data.edge_list = d.at("edge_list").get<std::string>();
        if (!is_link) cfg.data.labels = d.at("labels").get<std::string>();
        for (const char* k : {"preset", "num_vertices", "num_clusters",
                              "alpha_star", "alpha_diag", "beta_star"})
            if (d.contains(k))
                throw std::invalid_argument(
                    std::string("'") + k + "' only applies to source \"dsbm\"");
    } else {
        throw std::invalid_argument("data source must be \"dsbm\" or \"files\"");
    }

    if (is_link) {
        if (d.contains("features"))
            throw std::invalid_argument(
                "link tasks derive degree features from the residual graph; "
                "remove data.features");
        cfg.data.feature_choice = FeatureChoice::degree;
    } else if (d.contains("features")) {
        const std::string f = d.at("features").get<std::string>();
        if (f == "degree") {
            cfg.data.feature_choice = FeatureChoice::degree;
        } else if (f == "native") {
            if (cfg.data.source != "dsbm")
                throw std::invalid_argument(
                    "\"native\" features require the DSBM source");
            cfg.data.feature_choice = FeatureChoice::native;
        } else {
            if (cfg.data.source != "files")
                throw std::invalid_argument(
                    "a feature file path requires source \"files\"");
            cfg.data.feature_choice = FeatureChoice::native;
            cfg.data.features = f;
        }
    } else {
        if (cfg.data.source == "files")
            throw std::invalid_argument(
                "source \"files\" needs data.features (path or \"degree\")");
        cfg.data.feature_choice = FeatureChoice::native;
    }

    if (j.contains("split")) {
        const json& s = j.at("split");
        if (is_link) {
            check_keys(s, "$.split", {"test_frac", "val_frac", "include_noisy"});
            cfg.split.test_frac = s.value("test_frac", 0.15);
            cfg.split.link_val_frac = s.value("val_frac", 0.05);
            cfg.split.include_noisy = s.value("include_noisy", false);
            if (cfg.split.include_noisy && cfg.task != ExperimentTask::link_existence)
                throw std::invalid_argument(
                    "include_noisy applies only to existence prediction");
        } else {
            check_keys(s, "$.split",
                       {"scheme", "train_frac", "val_frac", "train_per_class",
                        "val_total"});
            cfg.split.scheme = s.value("scheme", "fraction");
            if (cfg.split.scheme == "fraction") {
                cfg.split.train_frac = s.value("train_frac", 0.6);
                cfg.split.val_frac = s.value("val_frac", 0.2);
            } else if (cfg.split.scheme == "per_class") {
                cfg.split.train_per_class = s.value("train_per_class", 20);
                cfg.split.val_total = s.value("val_total", 500);
            } else {
                throw std::invalid_argument("unknown split scheme '" +
                                            cfg.split.scheme + "'");
            }
        }
    } else if (is_link) {
        cfg.split.include_noisy = false;
    }

    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, "$.model",
                   {"q", "cheb_order", "hidden", "dropout", "biases",
                    "shared_theta", "allow_extended_q"});
        cfg.model.q = m.value("q", 0.25);
        cfg.model.cheb_order = m.value("cheb_order", 1);
        if (m.contains("hidden"))
            cfg.model.hidden = m.at("hidden").get<std::vector<int>>();
        cfg.model.dropout = m.value("dropout", 0.5);
        cfg.model.biases = m.value("biases", true);
        cfg.model.shared_theta = m.value("shared_theta", false);
        cfg.model.allow_extended_q = m.value("allow_extended_q", false);
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        check_keys(t, "$.train",
                   {"max_epochs", "patience", "lr", "weight_decay"});
        cfg.train.max_epochs = t.value("max_epochs", 3000);
        cfg.train.patience = t.value("patience", 500);
        cfg.train.lr = t.value("lr", 5e-3);
        cfg.train.weight_decay = t.value("weight_decay", 5e-4);
    }
    cfg.train.seed = cfg.seed;

    // Value errors surface here, at parse time, rather than deep inside a run.
    if (cfg.data.source == "dsbm") {
        if (cfg.data.num_vertices < 1)
            throw std::invalid_argument("data.num_vertices must be positive");
        if (cfg.data.num_clusters < 1)
            throw std::invalid_argument("data.num_clusters must be positive");
    }
    if (cfg.model.hidden.empty())
        throw std::invalid_argument("model.hidden needs at least one width");
    for (int h : cfg.model.hidden)
        if (h < 1)
            throw std::invalid_argument("model.hidden widths must be positive");
    if (cfg.model.cheb_order < 0)
        throw std::invalid_argument("model.cheb_order must be non-negative");
    if (!(cfg.model.dropout >= 0.0 && cfg.model.dropout < 1.0))
        throw std::invalid_argument("model.dropout must lie in [0, 1)");
    if (!(cfg.train.lr > 0.0))
        throw std::invalid_argument("train.lr must be positive");
    if (cfg.train.weight_decay < 0.0)
        throw std::invalid_argument("train.weight_decay must be non-negative");
    if (cfg.train.max_epochs < 1)
        throw std::invalid_argument("train.max_epochs must be at least 1");
    if (cfg.train.patience < 0)
        throw std::invalid_argument("train.patience must be non-negative");
    return cfg;
} catch (const json::exception& e) {
    // Missing required keys and wrong value types are config mistakes, not
    // internal failures.
    throw std::invalid_argument(std::string("config error: ") + e.what());
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in " + path + ": " +
                                    e.what());
    }
    return parse_experiment_config(j);
}

json experiment_config_json(const ExperimentConfig& cfg) {
    json d;
    d["source"] = cfg.data.source;
    if (cfg.data.source == "dsbm") {
        d["preset"] = cfg.data.preset;
        d["num_vertices"] = cfg.data.num_vertices;
        d["num_clusters"] = cfg.data.num_clusters;
        if (cfg.data.preset == "ordered") {
            d["alpha_star"] = cfg.data.alpha_star;
            d["alpha_diag"] = cfg.data.alpha_diag;
        }
        d["beta_star"] = cfg.data.beta_star;
    } else {
        d["edge_list"] = cfg.data.edge_list;
        if (!cfg.data.labels.empty()) d["labels"] = cfg.data.labels;
    }
    // The echo must re-parse, so features are written in the same vocabulary
    // the parser reads. Link tasks always use degree features and reject the
    // key outright.
    if (cfg.task == ExperimentTask::node) {
        if (cfg.data.feature_choice == FeatureChoice::degree)
            d["features"] = "degree";
        else if (cfg.data.source == "dsbm")
            d["features"] = "native";
        else
            d["features"] = cfg.data.features;
    }

    json s;
    if (cfg.task == ExperimentTask::node) {
        s["scheme"] = cfg.split.scheme;
        if (cfg.split.scheme == "fraction") {
            s["train_frac"] = cfg.split.train_frac;
            s["val_frac"] = cfg.split.val_frac;
        } else {
            s["train_per_class"] = cfg.split.train_per_class;
            s["val_total"] = cfg.split.val_total;
        }
    } else {
        s["test_frac"] = cfg.split.test_frac;
        s["val_frac"] = cfg.split.link_val_frac;
        s["include_noisy"] = cfg.split.include_noisy;
    }

    json m;
    m["q"] = cfg.model.q;
    m["cheb_order"] = cfg.model.cheb_order;
    m["hidden"] = cfg.model.hidden;
    m["dropout"] = cfg.model.dropout;
    m["biases"] = cfg.model.biases;
    m["shared_theta"] = cfg.model.shared_theta;
    m["allow_extended_q"] = cfg.model.allow_extended_q;

    json t;
    t["max_epochs"] = cfg.train.max_epochs;
    t["patience"] = cfg.train.patience;
    t["lr"] = cfg.train.lr;
    t["weight_decay"] = cfg.train.weight_decay;

    json out;
    out["task"] = to_string(cfg.task);
    out["seed"] = cfg.seed;
    out["data"] = d;
    out["split"] = s;
    out["model"] = m;
    out["train"] = t;
    return out;
}

namespace {

struct LoadedData {
    DirectedGraph graph;
    std::vector<int> labels;  // node task only
    RealMatrix native_features;
    bool has_native = false;
};

LoadedData load_data(const ExperimentConfig& cfg) {
    LoadedData out;
    if (cfg.data.source == "dsbm") {
        DsbmParams params;
        if (cfg.data.preset == "ordered")
            params = ordered_meta(cfg.data.num_vertices, cfg.data.num_clusters,
                                  cfg.data.alpha_star, cfg.data.alpha_diag,
                                  cfg.data.beta_star, cfg.seed);
        else
            params = cyclic_meta(cfg.data.num_vertices, cfg.data.num_clusters,
                                 cfg.data.beta_star,
                                 cfg.data.preset == "cyclic_noisy", cfg.seed);
        DsbmSample sample = sample_dsbm(params);
        out.graph = std::move(sample.graph);
        out.labels = std::move(sample.labels);
        out.native_features = std::move(sample.features);
        out.has_native = true;
    } else {
        out.graph = read_edge_list_file(cfg.data.edge_list);
        if (cfg.task == ExperimentTask::node)
            out.labels = read_labels_file(cfg.data.labels, out.graph.num_vertices);
        if (!cfg.data.features.empty()) {
            out.native_features =
                read_features_file(cfg.data.features, out.graph.num_vertices);
            out.has_native = true;
        }
    }
    return out;
}

LinkTask to_link_task(ExperimentTask t) {
    switch (t) {
        case ExperimentTask::link_existence: return LinkTask::existence;
        case ExperimentTask::link_direction: return LinkTask::direction;
        case ExperimentTask::link_three_class: return LinkTask::three_class;
        case ExperimentTask::node: break;
    }
    throw std::logic_error("not a link task");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
    LoadedData data = load_data(cfg);
    const bool is_link = cfg.task != ExperimentTask::node;

    ExperimentResult res;
    namespace fs = std::filesystem;
    if (!out_dir.empty()) fs::create_directories(out_dir);
    auto artifact = [&](const std::string& name) {
        return out_dir.empty() ? std::string()
                               : (fs::path(out_dir) / name).string();
    };

    MagNetConfig mc;
    mc.q = cfg.model.q;
    mc.cheb_order = cfg.model.cheb_order;
    mc.hidden = cfg.model.hidden;
    mc.dropout = cfg.model.dropout;
    mc.use_biases = cfg.model.biases;
    mc.shared_theta = cfg.model.shared_theta;
    mc.allow_extended_q = cfg.model.allow_extended_q;

    RunReport report;
    std::string split_path;

    if (!is_link) {
        if (data.labels.empty())
            throw std::invalid_argument("node task needs labels");
        const int num_classes =
            1 + *std::max_element(data.labels.begin(), data.labels.end());
        mc.task = TaskKind::node;
        mc.num_classes = num_classes;

        RealMatrix features;
        if (cfg.data.feature_choice == FeatureChoice::degree)
            features = degree_features(data.graph);
        else if (data.has_native)
            features = data.native_features;
        else
            throw std::invalid_argument("no features available");

        NodeSplit split =
            cfg.split.scheme == "fraction"
                ? node_split_fraction(data.graph.num_vertices,
                                      cfg.split.train_frac, cfg.split.val_frac,
                                      cfg.seed)
                : node_split_per_class(data.labels, cfg.split.train_per_class,
                                       cfg.split.val_total, cfg.seed);
        if (!out_dir.empty()) {
            split_path = artifact("split.json");
            write_node_split_file(split_path, split);
        }

        MagNetModel model(data.graph, mc, features.cols);
        Rng init_rng = stream_rng(cfg.seed, Stream::init);
        model.initialize(init_rng);

        auto make_view = [&](const std::vector<int>& rows) {
            TaskView v;
            v.labels = data.labels;
            v.rows = rows;
            v.forward = [&model, features](Tape& tape, bool training,
                                           Rng* rng) {
                return model.forward_node(tape, features, training, rng);
            };
            return v;
        };
        const TaskView train_view = make_view(split.train);
        const TaskView val_view = make_view(split.val);
        const TaskView test_view = make_view(split.test);
        const std::string ckpt = artifact("checkpoint.txt");
        report = train_model(model, train_view, val_view, test_view, cfg.train,
                             out_dir.empty() ? nullptr : &ckpt);
        res.checkpoint_path = ckpt;
    } else {
        LinkSplit split =
            link_split(data.graph, to_link_task(cfg.task), cfg.split.test_frac,
                       cfg.split.link_val_frac, cfg.split.include_noisy,
                       cfg.seed);
        if (!out_dir.empty()) {
            split_path = artifact("split.json");
            write_link_split_file(split_path, split);
        }
        mc.task = TaskKind::link;
        mc.num_classes = cfg.task == ExperimentTask::link_three_class ? 3 : 2;

        const RealMatrix features = degree_features(split.residual);
        MagNetModel model(split.residual, mc, features.cols);
        Rng init_rng = stream_rng(cfg.seed, Stream::init);
        model.initialize(init_rng);

        auto make_view = [&](const LinkObservations& obs) {
            TaskView v;
            v.labels = obs.labels;
            v.rows.resize(obs.labels.size());
            std::iota(v.rows.begin(), v.rows.end(), 0);
            v.forward = [&model, features, pairs = obs.pairs](
                            Tape& tape, bool training, Rng* rng) {
                return model.forward_link(tape, features, pairs, training, rng);
            };
            return v;
        };
        const TaskView train_view = make_view(split.train);
        const TaskView val_view = make_view(split.val);
        const TaskView test_view = make_view(split.test);
        const std::string ckpt = artifact("checkpoint.txt");
        report = train_model(model, train_view, val_view, test_view, cfg.train,
                             out_dir.empty() ? nullptr : &ckpt);
        res.checkpoint_path = ckpt;
    }

    json doc;
    doc["format"] = "magnet-run-report";
    doc["version"] = 1;
    doc["config"] = experiment_config_json(cfg);
    doc["num_parameters"] = report.num_parameters;
    doc["epochs_run"] = report.epochs_run;
    doc["best_epoch"] = report.best_epoch;
    doc["best_val_acc"] = report.best_val_acc;
    doc["test_acc"] = report.test_acc;
    doc["test_loss"] = report.test_loss;
    doc["test_confusion"] = report.test_confusion;
    doc["aborted_nan"] = report.aborted_nan;
    json curve = json::array();
    for (std::size_t i = 0; i < report.curve.size(); ++i) {
        const EpochStats& e = report.curve[i];
        curve.push_back({{"epoch", i + 1},
                         {"train_loss", e.train_loss},
                         {"train_acc", e.train_acc},
                         {"val_loss", e.val_loss},
                         {"val_acc", e.val_acc}});
    }
    doc["curve"] = std::move(curve);

    res.report = std::move(report);
    res.report_json = std::move(doc);
    res.split_path = split_path;
    if (!out_dir.empty()) {
        res.report_path = artifact("report.json");
        write_text(res.report_path, res.report_json.dump(2) + "\n");
        json meta;
        meta["wall_seconds"] = res.report.wall_seconds;
        write_text(artifact("report.meta.json"), meta.dump(2) + "\n");
        json manifest;
        manifest["format"] = "magnet-manifest";
        manifest["version"] = 1;
        manifest["kind"] = "train";
        manifest["config"] = experiment_config_json(cfg);
        manifest["outputs"] = {"report.json", "report.meta.json",
                               "checkpoint.txt", "split.json"};
        write_text(artifact("manifest.json"), manifest.dump(2) + "\n");
    }
    return res;
}

SweepConfig parse_sweep_config(const json& j) try {
    check_keys(j, "$", {"base", "sweep"});
    SweepConfig cfg;
    cfg.base = parse_experiment_config(j.at("base"));
    const json& s = j.at("sweep");
    check_keys(s, "$.sweep", {"axis", "values", "seeds"});
    cfg.axis = s.at("axis").get<std::string>();
    if (cfg.axis != "q" && cfg.axis != "beta_star")
        throw std::invalid_argument("sweep axis must be \"q\" or \"beta_star\"");
    cfg.values = s.at("values").get<std::vector<double>>();
    cfg.seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.values.empty() || cfg.seeds.empty())
        throw std::invalid_argument("sweep needs values and seeds");
    if (cfg.axis == "beta_star" && cfg.base.data.source != "dsbm")
        throw std::invalid_argument("beta_star sweeps need the DSBM source");
    return cfg;
} catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in " + path + ": " +
                                    e.what());
    }
    return parse_sweep_config(j);
}

SweepSummary run_sweep(const SweepConfig& cfg, const std::string& out_dir,
                       int num_workers, bool plots) {
    auto run_one = [&cfg](int value_index, std::uint64_t seed) {
        ExperimentConfig derived = cfg.base;
        derived.seed = seed;
        derived.train.seed = seed;
        const double value = cfg.values[value_index];
        char name[64];
        if (cfg.axis == "q") {
            derived.model.q = value;
            std::snprintf(name, sizeof(name), "q=%g", value);
        } else {
            derived.data.beta_star = value;
            std::snprintf(name, sizeof(name), "beta_star=%g", value);
        }
        ExperimentResult r = run_experiment(derived, "");
        SweepRow row;
        row.config_name = name;
        row.q = derived.model.q;
        row.seed = seed;
        row.val_acc = r.report.best_val_acc;
        row.test_acc = r.report.test_acc;
        row.epochs = r.report.epochs_run;
        row.seconds = r.report.wall_seconds;
        return row;
    };

    GridOutcome grid = grid_search(static_cast<int>(cfg.values.size()), run_one,
                                   cfg.seeds, num_workers);
    SweepSummary summary;
    summary.rows = std::move(grid.rows);
    summary.best_value_index = grid.best_index;
    const std::size_t s = cfg.seeds.size();
    for (std::size_t ci = 0; ci < cfg.values.size(); ++ci) {
        std::vector<double> vals, tests;
        for (std::size_t si = 0; si < s; ++si) {
            vals.push_back(summary.rows[ci * s + si].val_acc);
            tests.push_back(summary.rows[ci * s + si].test_acc);
        }
        summary.mean_val_acc.push_back(mean_std(vals).first);
        const auto [mt, st] = mean_std(tests);
        summary.mean_test_acc.push_back(mt);
        summary.std_test_acc.push_back(st);
    }

    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        auto artifact = [&](const std::string& name) {
            return (fs::path(out_dir) / name).string();
        };
        write_sweep_csv(artifact("sweep.csv"), summary.rows);
        json doc;
        doc["format"] = "magnet-sweep-summary";
        doc["version"] = 1;
        doc["axis"] = cfg.axis;
        doc["values"] = cfg.values;
        doc["seeds"] = cfg.seeds;
        doc["mean_val_acc"] = summary.mean_val_acc;
        doc["mean_test_acc"] = summary.mean_test_acc;
        doc["std_test_acc"] = summary.std_test_acc;
        doc["best_value_index"] = summary.best_value_index;
        doc["best_value"] = cfg.values[summary.best_value_index];
        write_text(artifact("summary.json"), doc.dump(2) + "\n");
        std::vector<std::string> outputs = {"sweep.csv", "summary.json"};
        if (plots) {
            const std::string chart = cfg.axis == "q" ? "accuracy_vs_q.svg"
                                                      : "accuracy_vs_beta.svg";
            write_accuracy_chart_svg(
                artifact(chart), "test accuracy", cfg.axis, cfg.values,
                summary.mean_test_acc);
            outputs.push_back(chart);
        }
        json manifest;
        manifest["format"] = "magnet-manifest";
        manifest["version"] = 1;
        manifest["kind"] = "sweep";
        manifest["config"] = {{"base", experiment_config_json(cfg.base)},
                              {"sweep",
                               {{"axis", cfg.axis},
                                {"values", cfg.values},
                                {"seeds", cfg.seeds}}}};
        manifest["outputs"] = outputs;
        write_text(artifact("manifest.json"), manifest.dump(2) + "\n");
    }
    return summary;
}

int worker_count_from_env() {
    const char* env = std::getenv("MAGNET_WORKERS");
    if (env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == nullptr || *end != '\0' || v < 1)
            throw std::invalid_argument(
                "MAGNET_WORKERS must be a positive integer");
        return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_accuracy_chart_svg(const std::string& path, const std::string& title,
                              const std::string& x_label,
                              const std::vector<double>& xs,
                              const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("chart needs matching nonempty series");
    const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = xs[0], xmax = xs[0];
    for (double x : xs) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    auto px = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
    };
    auto py = [&](double y) { return h - mb - y * (h - mt - mb); };

    std::string svg;
    char buf[512];
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
           "height=\"420\" viewBox=\"0 0 640 420\">\n";
    svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"24\" font-size=\"16\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  w / 2, title.c_str());
    svg += buf;
    // axes
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" "
                  "stroke=\"black\"/>\n",
                  ml, h - mb, w - mr, h - mb);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" "
                  "stroke=\"black\"/>\n",
                  ml, mt, ml, h - mb);
    svg += buf;
    // y ticks at 0, 0.25, ..., 1
    for (int i = 0; i <= 4; ++i) {
        const double yv = 0.25 * i;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" "
                      "stroke=\"#cccccc\"/>\n",
                      ml, py(yv), w - mr, py(yv));
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%g\" y=\"%g\" font-size=\"12\" "
                      "text-anchor=\"end\">%.2f</text>\n",
                      ml - 8, py(yv) + 4, yv);
        svg += buf;
    }
    // x ticks at data points
    for (double x : xs) {
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%g\" y=\"%g\" font-size=\"12\" "
                      "text-anchor=\"middle\">%g</text>\n",
                      px(x), h - mb + 18, x);
        svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" font-size=\"14\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  (ml + w - mr) / 2, h - 12, x_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"18\" y=\"%g\" font-size=\"14\" "
                  "text-anchor=\"middle\" transform=\"rotate(-90 18 %g)\">"
                  "accuracy</text>\n",
                  (mt + h - mb) / 2, (mt + h - mb) / 2);
    svg += buf;
    // polyline + markers
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%g,%g ", px(xs[i]), py(ys[i]));
        pts += buf;
    }
    svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
           "points=\"" + pts + "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%g\" cy=\"%g\" r=\"3.5\" "
                      "fill=\"#1f77b4\"/>\n",
                      px(xs[i]), py(ys[i]));
        svg += buf;
    }
    svg += "</svg>\n";
    write_text(path, svg);
}

}  // namespace magnet
