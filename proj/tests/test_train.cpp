#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "magnet/data.hpp"
#include "magnet/dsbm.hpp"
#include "magnet/model.hpp"
#include "magnet/rng.hpp"
#include "magnet/train.hpp"

using namespace magnet;

namespace {

struct ToySetup {
    DsbmSample sample;
    MagNetModel model;
    NodeSplit split;

    ToySetup(MagNetConfig cfg, std::uint64_t seed)
        : sample(sample_dsbm(ordered_meta(50, 2, 0.5, 0.5, 0.0, seed))),
          model(sample.graph, cfg, 1),
          split(node_split_fraction(50, 0.6, 0.2, seed)) {
        Rng init = stream_rng(seed, Stream::init);
        model.initialize(init);
    }

    TaskView view(const std::vector<int>& rows) {
        TaskView v;
        const RealMatrix features = sample.features;
        MagNetModel* m = &model;
        v.forward = [m, features](Tape& tape, bool training, Rng* rng) {
            return m->forward_node(tape, features, training, rng);
        };
        v.labels = sample.labels;
        v.rows = rows;
        return v;
    }
};

MagNetConfig toy_config() {
    MagNetConfig cfg;
    cfg.task = TaskKind::node;
    cfg.q = 0.25;
    cfg.cheb_order = 2;
    cfg.hidden = {8, 8};
    cfg.num_classes = 2;
    cfg.dropout = 0.5;
    return cfg;
}

}  // namespace

TEST_CASE("accuracy breaks ties toward the lowest class index") {
    RealMatrix probs(3, 3);
    probs.at(0, 0) = 0.2; probs.at(0, 1) = 0.5; probs.at(0, 2) = 0.3;
    probs.at(1, 0) = 0.4; probs.at(1, 1) = 0.4; probs.at(1, 2) = 0.2;
    probs.at(2, 0) = 0.1; probs.at(2, 1) = 0.2; probs.at(2, 2) = 0.7;
    CHECK(accuracy_from_probs(probs, {1, 0, 2}, {0, 1, 2}) == doctest::Approx(1.0));
    CHECK(accuracy_from_probs(probs, {1, 1, 2}, {0, 1, 2}) ==
          doctest::Approx(2.0 / 3.0));
    // only the listed rows count
    CHECK(accuracy_from_probs(probs, {1, 1, 2}, {1}) == doctest::Approx(0.0));
}

TEST_CASE("view evaluation fills the confusion matrix by true then predicted") {
    RealMatrix logits(3, 2);
    logits.at(0, 0) = 2.0; logits.at(0, 1) = 0.0;  // predicts 0
    logits.at(1, 0) = 0.0; logits.at(1, 1) = 3.0;  // predicts 1
    logits.at(2, 0) = 1.0; logits.at(2, 1) = 0.0;  // predicts 0
    TaskView view;
    view.forward = [logits](Tape& tape, bool, Rng*) {
        return real_input(logits);
    };
    view.labels = {0, 0, 1};
    view.rows = {0, 1, 2};
    const EvalStats stats = evaluate_view(view, 2);
    CHECK(stats.accuracy == doctest::Approx(1.0 / 3.0));
    CHECK(stats.confusion[0][0] == 1);
    CHECK(stats.confusion[0][1] == 1);
    CHECK(stats.confusion[1][0] == 1);
    CHECK(stats.confusion[1][1] == 0);
    // mean cross entropy: rows score log(1+e^-2), 3+log(1+e^-3), 1+log(1+e^-1)
    const double expect =
        (std::log1p(std::exp(-2.0)) + 3.0 + std::log1p(std::exp(-3.0)) + 1.0 +
         std::log1p(std::exp(-1.0))) / 3.0;
    CHECK(stats.loss == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("training separates a strongly oriented two-cluster graph") {
    ToySetup toy(toy_config(), 5);
    TrainConfig cfg;
    cfg.max_epochs = 300;
    cfg.patience = 300;
    cfg.seed = 5;
    const RunReport report = train_model(toy.model, toy.view(toy.split.train),
                                         toy.view(toy.split.val),
                                         toy.view(toy.split.test), cfg);
    CHECK(report.best_val_acc >= 0.9);
    CHECK(report.test_acc >= 0.9);
    double best_train = 0.0;
    for (const EpochStats& e : report.curve)
        best_train = std::max(best_train, e.train_acc);
    CHECK(best_train >= 0.95);
    CHECK(report.num_parameters == toy.model.num_trainable_scalars());
    CHECK_FALSE(report.aborted_nan);
}

TEST_CASE("zero learning rate stops exactly at the patience limit") {
    ToySetup toy(toy_config(), 7);
    TrainConfig cfg;
    cfg.lr = 0.0;
    cfg.weight_decay = 0.0;
    cfg.max_epochs = 100;
    cfg.patience = 5;
    cfg.seed = 7;
    const RunReport report = train_model(toy.model, toy.view(toy.split.train),
                                         toy.view(toy.split.val),
                                         toy.view(toy.split.test), cfg);
    // epoch 1 sets the best; the next `patience` epochs cannot beat it
    CHECK(report.epochs_run == 6);
    CHECK(report.best_epoch == 1);
    for (const EpochStats& e : report.curve)
        CHECK(e.val_acc == doctest::Approx(report.curve[0].val_acc));
}

TEST_CASE("identical seeds reproduce the whole report") {
    auto run = [] {
        ToySetup toy(toy_config(), 9);
        TrainConfig cfg;
        cfg.max_epochs = 40;
        cfg.patience = 40;
        cfg.seed = 9;
        return train_model(toy.model, toy.view(toy.split.train),
                           toy.view(toy.split.val), toy.view(toy.split.test),
                           cfg);
    };
    const RunReport a = run();
    const RunReport b = run();
    REQUIRE(a.curve.size() == b.curve.size());
    for (std::size_t i = 0; i < a.curve.size(); ++i) {
        CHECK(a.curve[i].train_loss == b.curve[i].train_loss);
        CHECK(a.curve[i].train_acc == b.curve[i].train_acc);
        CHECK(a.curve[i].val_loss == b.curve[i].val_loss);
        CHECK(a.curve[i].val_acc == b.curve[i].val_acc);
    }
    CHECK(a.best_epoch == b.best_epoch);
    CHECK(a.best_val_acc == b.best_val_acc);
    CHECK(a.test_acc == b.test_acc);
    CHECK(a.test_loss == b.test_loss);
    CHECK(a.test_confusion == b.test_confusion);
}

TEST_CASE("the saved checkpoint holds the restored best parameters") {
    ToySetup toy(toy_config(), 11);
    TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.patience = 30;
    cfg.seed = 11;
    const std::string path = "train_best_checkpoint.txt";
    const RunReport report = train_model(toy.model, toy.view(toy.split.train),
                                         toy.view(toy.split.val),
                                         toy.view(toy.split.test), cfg, &path);

    // the model was restored to the best epoch before the test evaluation,
    // so evaluating again must reproduce the reported numbers exactly
    const TaskView test_view = toy.view(toy.split.test);
    const EvalStats again = evaluate_view(test_view, 2);
    CHECK(again.accuracy == report.test_acc);
    CHECK(again.loss == report.test_loss);

    // and the checkpoint on disk holds those same parameters
    std::vector<Parameter> loaded;
    for (const Parameter& p : toy.model.parameters()) {
        loaded.push_back(p.is_complex
                             ? Parameter::complex(p.name, p.rows, p.cols)
                             : Parameter::real(p.name, p.rows, p.cols));
    }
    load_checkpoint(path, loaded);
    for (std::size_t i = 0; i < loaded.size(); ++i)
        CHECK(loaded[i].value == toy.model.parameters()[i].value);
    std::remove(path.c_str());
}

TEST_CASE("training aborts when the loss leaves the reals") {
    ToySetup toy(toy_config(), 13);
    RealMatrix poisoned(50, 2);
    for (double& v : poisoned.a) v = std::nan("");
    TaskView bad;
    bad.forward = [poisoned](Tape&, bool, Rng*) { return real_input(poisoned); };
    bad.labels = std::vector<int>(50, 0);
    bad.rows = {0, 1, 2};
    TrainConfig cfg;
    cfg.max_epochs = 50;
    cfg.patience = 50;
    const RunReport report =
        train_model(toy.model, bad, bad, bad, cfg);
    CHECK(report.aborted_nan);
    CHECK(report.epochs_run == 1);
}

TEST_CASE("training rejects empty views and bad budgets") {
    ToySetup toy(toy_config(), 15);
    TrainConfig cfg;
    TaskView empty = toy.view({});
    CHECK_THROWS_AS(train_model(toy.model, empty, empty, empty, cfg),
                    std::invalid_argument);
    cfg.max_epochs = 0;
    CHECK_THROWS_AS(train_model(toy.model, toy.view(toy.split.train),
                                toy.view(toy.split.val),
                                toy.view(toy.split.test), cfg),
                    std::invalid_argument);
}

TEST_CASE("grid search picks the best mean validation accuracy") {
    auto run_one = [](int config_index, std::uint64_t seed) {
        SweepRow row;
        row.config_name = "c" + std::to_string(config_index);
        row.seed = seed;
        // config 1 dominates; config 2 close behind
        row.val_acc = 0.5 + 0.2 * (config_index == 1) +
                      0.15 * (config_index == 2) +
                      0.001 * static_cast<double>(seed);
        row.test_acc = row.val_acc;
        return row;
    };
    const std::vector<std::uint64_t> seeds = {1, 2, 3};
    const GridOutcome serial = grid_search(3, run_one, seeds, 1);
    CHECK(serial.best_index == 1);
    CHECK(serial.rows.size() == 9);
    // deterministic row order: configs outer, seeds inner
    CHECK(serial.rows[0].config_name == "c0");
    CHECK(serial.rows[0].seed == 1);
    CHECK(serial.rows[4].config_name == "c1");
    CHECK(serial.rows[4].seed == 2);

    const GridOutcome parallel = grid_search(3, run_one, seeds, 4);
    CHECK(parallel.best_index == serial.best_index);
    REQUIRE(parallel.rows.size() == serial.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(parallel.rows[i].config_name == serial.rows[i].config_name);
        CHECK(parallel.rows[i].seed == serial.rows[i].seed);
        CHECK(parallel.rows[i].val_acc == serial.rows[i].val_acc);
    }

    // ties resolve to the first config
    auto tied = [](int, std::uint64_t) { SweepRow r; r.val_acc = 0.7; return r; };
    CHECK(grid_search(3, tied, seeds, 1).best_index == 0);
}

TEST_CASE("sweep csv format is frozen") {
    SweepRow row;
    row.config_name = "q=0.25";
    row.q = 0.25;
    row.seed = 3;
    row.val_acc = 0.875;
    row.test_acc = 0.8125;
    row.epochs = 42;
    row.seconds = 1.5;
    const std::string path = "sweep_format.csv";
    write_sweep_csv(path, {row});
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == "config,q,seed,val_acc,test_acc,epochs,seconds");
    CHECK(line == "q=0.25,0.25,3,0.875,0.8125,42,1.500");
    std::remove(path.c_str());
}

TEST_CASE("slope t statistic flags trends and ignores flat data") {
    const std::vector<double> x = {1, 2, 3, 4, 5, 6};
    CHECK(slope_t_statistic(x, {2, 2, 2, 2, 2, 2}) == 0.0);
    CHECK(slope_t_statistic({3, 3, 3, 3, 3, 3}, x) == 0.0);
    // a clean linear trend with tiny noise gives an enormous statistic
    CHECK(slope_t_statistic(x, {1.0, 2.001, 2.999, 4.0, 5.001, 5.999}) > 50.0);
    // symmetric noise around a constant stays small
    CHECK(std::abs(slope_t_statistic(x, {2.0, 2.1, 1.9, 2.05, 1.95, 2.0})) < 3.0);
}

TEST_CASE("mean and sample deviation") {
    const auto [m, s] = mean_std({1.0, 2.0, 3.0, 4.0});
    CHECK(m == doctest::Approx(2.5));
    CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0)));
    const auto [m1, s1] = mean_std({7.0});
    CHECK(m1 == 7.0);
    CHECK(s1 == 0.0);
    CHECK_THROWS_AS(mean_std({}), std::invalid_argument);
}
