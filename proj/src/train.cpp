#include "magnet/train.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace magnet {

namespace {

int argmax_row(const RealMatrix& m, int r) {
    int best = 0;
    for (int c = 1; c < m.cols; ++c)
        if (m.at(r, c) > m.at(r, best)) best = c;
    return best;
}

double xent_over_rows(const RealMatrix& probs, const std::vector<int>& labels,
                      const std::vector<int>& rows) {
    double loss = 0.0;
    for (int r : rows)
        loss -= std::log(std::max(probs.at(r, labels[r]), 1e-300));
    return loss / static_cast<double>(rows.size());
}

}  // namespace

double accuracy_from_probs(const RealMatrix& probs,
                           const std::vector<int>& labels,
                           const std::vector<int>& rows) {
    if (rows.empty()) throw std::invalid_argument("accuracy over empty rows");
    long long correct = 0;
    for (int r : rows)
        if (argmax_row(probs, r) == labels[r]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

EvalStats evaluate_view(const TaskView& view, int num_classes) {
    Tape tape;
    tape.recording = false;
    RTensor logits = view.forward(tape, /*training=*/false, nullptr);
    const RealMatrix probs = softmax_rows(logits->value);
    EvalStats stats;
    stats.loss = xent_over_rows(probs, view.labels, view.rows);
    stats.accuracy = accuracy_from_probs(probs, view.labels, view.rows);
    stats.confusion.assign(num_classes, std::vector<long long>(num_classes, 0));
    for (int r : view.rows)
        ++stats.confusion[view.labels[r]][argmax_row(probs, r)];
    return stats;
}

RunReport train_model(MagNetModel& model, const TaskView& train_view,
                      const TaskView& val_view, const TaskView& test_view,
                      const TrainConfig& cfg,
                      const std::string* checkpoint_path) {
    if (cfg.max_epochs < 1 || cfg.patience < 1)
        throw std::invalid_argument("epochs and patience must be >= 1");
    if (train_view.rows.empty())
        throw std::invalid_argument("training set is empty");
    if (val_view.rows.empty())
        throw std::invalid_argument("validation set is empty");
    if (test_view.rows.empty())
        throw std::invalid_argument("test set is empty");

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Parameter*> params = model.parameter_ptrs();
    Adam adam(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay}, params);

    RunReport report;
    report.num_parameters = model.num_trainable_scalars();

    auto snapshot = [&]() {
        std::vector<std::vector<double>> snap;
        snap.reserve(params.size());
        for (const Parameter* p : params) snap.push_back(p->value);
        return snap;
    };
    std::vector<std::vector<double>> best = snapshot();
    double best_val = -1.0;
    int since_improved = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng dropout_rng = stream_rng(cfg.seed, Stream::dropout,
                                     static_cast<std::uint64_t>(epoch));
        Tape tape;
        RTensor logits = train_view.forward(tape, /*training=*/true, &dropout_rng);
        LossResult train_loss = softmax_cross_entropy(
            tape, logits, train_view.labels, train_view.rows);
        for (Parameter* p : params) p->zero_grad();
        tape.backward();
        adam.step();

        EpochStats stats;
        stats.train_loss = train_loss.loss;
        stats.train_acc = accuracy_from_probs(train_loss.probs,
                                              train_view.labels,
                                              train_view.rows);

        Tape eval_tape;
        eval_tape.recording = false;
        RTensor val_logits = val_view.forward(eval_tape, false, nullptr);
        const RealMatrix val_probs = softmax_rows(val_logits->value);
        stats.val_loss = xent_over_rows(val_probs, val_view.labels, val_view.rows);
        stats.val_acc = accuracy_from_probs(val_probs, val_view.labels,
                                            val_view.rows);
        report.curve.push_back(stats);
        report.epochs_run = epoch;

        if (!std::isfinite(stats.train_loss)) {
            report.aborted_nan = true;
            break;
        }
        if (stats.val_acc > best_val) {
            best_val = stats.val_acc;
            report.best_epoch = epoch;
            best = snapshot();
            since_improved = 0;
        } else if (++since_improved >= cfg.patience) {
            break;
        }
    }

    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
    report.best_val_acc = std::max(best_val, 0.0);
    if (checkpoint_path) save_checkpoint(*checkpoint_path, model.parameters());

    const EvalStats test =
        evaluate_view(test_view, model.config().num_classes);
    report.test_acc = test.accuracy;
    report.test_loss = test.loss;
    report.test_confusion = test.confusion;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return report;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write csv: " + path);
    out << "config,q,seed,val_acc,test_acc,epochs,seconds\n";
    char buf[256];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%llu,%.17g,%.17g,%d,%.3f\n",
                      r.config_name.c_str(), r.q,
                      static_cast<unsigned long long>(r.seed), r.val_acc,
                      r.test_acc, r.epochs, r.seconds);
        out << buf;
    }
}

GridOutcome grid_search(
    int num_configs,
    const std::function<SweepRow(int, std::uint64_t)>& run_one,
    const std::vector<std::uint64_t>& seeds, int num_workers) {
    if (num_configs <= 0 || seeds.empty())
        throw std::invalid_argument("grid search needs configs and seeds");
    const int total = num_configs * static_cast<int>(seeds.size());
    GridOutcome out;
    out.rows.resize(total);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int job = next.fetch_add(1);
            if (job >= total) return;
            const int ci = job / static_cast<int>(seeds.size());
            const int si = job % static_cast<int>(seeds.size());
            out.rows[job] = run_one(ci, seeds[si]);
        }
    };
    const int workers = std::max(1, std::min(num_workers, total));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (int ci = 0; ci < num_configs; ++ci) {
        double sum = 0.0;
        for (std::size_t si = 0; si < seeds.size(); ++si)
            sum += out.rows[ci * seeds.size() + si].val_acc;
        const double mean = sum / static_cast<double>(seeds.size());
        if (out.best_index < 0 || mean > out.best_mean_val) {
            out.best_index = ci;
            out.best_mean_val = mean;
        }
    }
    return out;
}

double slope_t_statistic(const std::vector<double>& x,
                         const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 3)
        throw std::invalid_argument("need >= 3 paired samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return 0.0;
    const double slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - my - slope * (x[i] - mx);
        ss_res += r * r;
    }
    if (ss_res == 0.0) return slope == 0.0 ? 0.0 : HUGE_VAL;
    const double se = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    return slope / se;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty sample");
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    s = v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
    return {m, s};
}

}  // namespace magnet
