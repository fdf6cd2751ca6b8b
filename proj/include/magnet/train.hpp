#pragma once

// Full-batch training with Adam, classical L2 weight decay, early stopping
// on validation accuracy, best-checkpoint restoration, and a single test
// evaluation at the end. Tasks are presented to the loop as views: a forward
// function producing logits plus the labels and the rows that count.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "magnet/autodiff.hpp"
#include "magnet/model.hpp"

namespace magnet {

struct TrainConfig {
    int max_epochs = 3000;
    int patience = 500;      // epochs without a new best validation accuracy
    double lr = 5e-3;
    double weight_decay = 5e-4;
    std::uint64_t seed = 1;  // master seed; dropout streams derive from it
};

struct TaskView {
    std::function<RTensor(Tape&, bool training, Rng* dropout_rng)> forward;
    std::vector<int> labels;  // label per logit row
    std::vector<int> rows;    // rows contributing to loss and accuracy
};

struct EpochStats {
    double train_loss = 0.0, train_acc = 0.0;
    double val_loss = 0.0, val_acc = 0.0;
};

struct EvalStats {
    double loss = 0.0;
    double accuracy = 0.0;
    std::vector<std::vector<long long>> confusion;  // [true][predicted]
};

struct RunReport {
    std::vector<EpochStats> curve;
    int epochs_run = 0;
    int best_epoch = 0;  // 0 = initial parameters
    double best_val_acc = 0.0;
    double test_acc = 0.0;
    double test_loss = 0.0;
    std::vector<std::vector<long long>> test_confusion;
    long long num_parameters = 0;
    bool aborted_nan = false;
    double wall_seconds = 0.0;  // measurement, not part of the canonical report
};

// Accuracy with ties resolved toward the lowest class index.
double accuracy_from_probs(const RealMatrix& probs,
                           const std::vector<int>& labels,
                           const std::vector<int>& rows);

EvalStats evaluate_view(const TaskView& view, int num_classes);

RunReport train_model(MagNetModel& model, const TaskView& train_view,
                      const TaskView& val_view, const TaskView& test_view,
                      const TrainConfig& cfg,
                      const std::string* checkpoint_path = nullptr);

// One grid/sweep result row; `seconds` is wall-clock and excluded from any
// determinism contract.
struct SweepRow {
    std::string config_name;
    double q = 0.0;
    std::uint64_t seed = 0;
    double val_acc = 0.0;
    double test_acc = 0.0;
    int epochs = 0;
    double seconds = 0.0;
};

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

// Runs every (config, seed) job, possibly on a small thread pool, and picks
// the config with the best mean validation accuracy (first index wins ties).
// Row order in the result is deterministic regardless of worker count.
struct GridOutcome {
    int best_index = -1;
    double best_mean_val = 0.0;
    std::vector<SweepRow> rows;
};
GridOutcome grid_search(
    int num_configs,
    const std::function<SweepRow(int config_index, std::uint64_t seed)>& run_one,
    const std::vector<std::uint64_t>& seeds, int num_workers = 1);

// Least-squares slope t-statistic for y against x (0 when x or the residuals
// carry no signal); used to assert the absence of a trend.
double slope_t_statistic(const std::vector<double>& x,
                         const std::vector<double>& y);

std::pair<double, double> mean_std(const std::vector<double>& v);

}  // namespace magnet
