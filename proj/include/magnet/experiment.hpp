#pragma once

// Config-file driven experiments: parse a strict JSON description of
// data + split + model + training, run it deterministically, and write the
// artifact set (canonical run report, timing sidecar, split, checkpoint,
// manifest). The canonical report contains no wall-clock measurements, so
// identical config + seed reproduce it byte for byte.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "magnet/data.hpp"
#include "magnet/dsbm.hpp"
#include "magnet/model.hpp"
#include "magnet/train.hpp"

namespace magnet {

enum class ExperimentTask { node, link_existence, link_direction, link_three_class };

std::string to_string(ExperimentTask t);
ExperimentTask experiment_task_from_string(const std::string& s);

enum class FeatureChoice { native, degree };

struct DataConfig {
    std::string source;  // "dsbm" or "files"
    // dsbm
    std::string preset;  // "ordered", "cyclic", "cyclic_noisy"
    int num_vertices = 0;
    int num_clusters = 5;
    double alpha_star = 0.1;
    double alpha_diag = 0.1;
    double beta_star = 0.05;
    // files
    std::string edge_list, labels, features;
    FeatureChoice feature_choice = FeatureChoice::native;
};

struct SplitConfig {
    // node schemes
    std::string scheme = "fraction";  // or "per_class"
    double train_frac = 0.6, val_frac = 0.2;
    int train_per_class = 20, val_total = 500;
    // link scheme
    double test_frac = 0.15, link_val_frac = 0.05;
    bool include_noisy = false;
};

struct ModelConfig {
    double q = 0.25;
    int cheb_order = 1;
    std::vector<int> hidden = {16, 16};
    double dropout = 0.5;
    bool biases = true;
    bool shared_theta = false;
    bool allow_extended_q = false;
};

struct ExperimentConfig {
    ExperimentTask task = ExperimentTask::node;
    std::uint64_t seed = 1;
    DataConfig data;
    SplitConfig split;
    ModelConfig model;
    TrainConfig train;
};

// Strict: unknown keys anywhere are rejected with their JSON path.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json experiment_config_json(const ExperimentConfig& cfg);

struct ExperimentResult {
    RunReport report;
    nlohmann::json report_json;         // canonical document
    std::string report_path;            // empty when out_dir was empty
    std::string checkpoint_path;
    std::string split_path;
};

// Runs the experiment; when out_dir is non-empty, writes report.json,
// report.meta.json, checkpoint.txt, split.json and manifest.json there.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir);

struct SweepConfig {
    ExperimentConfig base;
    std::string axis;  // "q" or "beta_star"
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
};

SweepConfig parse_sweep_config(const nlohmann::json& j);
SweepConfig load_sweep_config(const std::string& path);

struct SweepSummary {
    std::vector<SweepRow> rows;          // one per (value, seed), value-major
    std::vector<double> mean_val_acc;    // per value
    std::vector<double> mean_test_acc;
    std::vector<double> std_test_acc;
    int best_value_index = -1;           // by mean validation accuracy
};

// Runs the sweep on up to num_workers threads; deterministic row order.
// When out_dir is non-empty, writes sweep.csv, summary.json, manifest.json
// and (with plots) accuracy charts.
SweepSummary run_sweep(const SweepConfig& cfg, const std::string& out_dir,
                       int num_workers, bool plots);

// Worker count: MAGNET_WORKERS when set (>= 1), else hardware concurrency.
int worker_count_from_env();

// Minimal static SVG line chart (accuracy in [0, 1] against a numeric axis).
void write_accuracy_chart_svg(const std::string& path, const std::string& title,
                              const std::string& x_label,
                              const std::vector<double>& xs,
                              const std::vector<double>& ys);

}  // namespace magnet
