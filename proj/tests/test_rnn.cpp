#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rnnbo/errors.hpp"
#include "rnnbo/rnn.hpp"

#include <cmath>
#include <cstdio>
#include <random>

using namespace rnnbo;

namespace {

rnn::RnnConfig small_cfg(int layers = 2, int hidden = 5, const std::string& act = "tanh") {
    rnn::RnnConfig cfg;
    cfg.num_layers = layers;
    cfg.hidden_size = hidden;
    cfg.dropout_rate = 0.0;
    cfg.activation = act;
    cfg.epochs = 1;
    return cfg;
}

std::vector<rnn::Sequence> random_batch(int sequences, int steps, int input_dim,
                                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<rnn::Sequence> batch(sequences);
    for (auto& seq : batch) {
        for (int t = 0; t < steps; ++t) {
            Eigen::VectorXd x(input_dim);
            for (int i = 0; i < input_dim; ++i) x(i) = noise(rng);
            seq.inputs.push_back(x);
            seq.targets.emplace_back(unit(rng), unit(rng));
        }
    }
    return batch;
}

pipeline::TrainingDataset constant_dataset(int windows, int d) {
    pipeline::TrainingDataset ds;
    ds.meta.model = epi::ModelKind::Seir;
    ds.meta.window_dim = d;
    ds.meta.horizon = windows + d - 1;
    for (int w = 0; w < windows; ++w) {
        for (int j = 0; j < d; ++j) {
            pipeline::TrainingPair pair;
            pair.label = "only";
            pair.window = w;
            pair.epoch = w + j;
            pair.state = epi::SeirState{0.5, 0.2, 0.3, 0.0};
            pair.beta = 0.3;
            pair.u1 = 0.3;
            pair.u2 = 0.7;
            ds.pairs.push_back(pair);
        }
    }
    return ds;
}

} // namespace

TEST_CASE("config validation mirrors the layer sweep range") {
    rnn::RnnConfig cfg;
    cfg.num_layers = 1;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.num_layers = 8;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.dropout_rate = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.activation = "gelu";
    CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("zero weights squash to the output midpoint") {
    rnn::RnnModel model = rnn::RnnModel::init(small_cfg(), 5, epi::ModelKind::Seir);
    for (long i = 0; i < model.parameter_count(); ++i) model.set_parameter(i, 0.0);
    model.reset_state();
    const Eigen::Vector2d out = model.forward(Eigen::VectorXd::Constant(5, 0.4));
    CHECK(out(0) == 0.5);
    CHECK(out(1) == 0.5);
}

TEST_CASE("hidden state carries between calls and resets cleanly") {
    rnn::RnnConfig cfg = small_cfg(2, 4);
    cfg.seed = 5;
    rnn::RnnModel model = rnn::RnnModel::init(cfg, 3, epi::ModelKind::Sis);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.7);

    model.reset_state();
    const Eigen::Vector2d first = model.forward(x);
    const Eigen::Vector2d second = model.forward(x); // recurrence carries state
    CHECK(first != second);

    model.reset_state();
    const Eigen::Vector2d again = model.forward(x);
    CHECK(first == again);
}

TEST_CASE("outputs stay inside the control bounds for wild inputs") {
    rnn::RnnConfig cfg = small_cfg(3, 8, "relu");
    cfg.seed = 17;
    rnn::RnnModel model = rnn::RnnModel::init(cfg, 5, epi::ModelKind::Seir);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> wild(0.0, 1e6);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd x(5);
        for (int i = 0; i < 5; ++i) x(i) = wild(rng);
        const Eigen::Vector2d out = model.forward(x);
        CHECK(out(0) >= 0.0);
        CHECK(out(0) <= 1.0);
        CHECK(out(1) >= 0.0);
        CHECK(out(1) <= 1.0);
    }
}

TEST_CASE("bptt gradients match finite differences") {
    std::mt19937_64 rng(31);

    SUBCASE("tanh stack") {
        for (int trial = 0; trial < 4; ++trial) {
            rnn::RnnConfig cfg = small_cfg(2 + trial % 2, 4 + trial, "tanh");
            cfg.seed = 100 + trial;
            const rnn::RnnModel model = rnn::RnnModel::init(cfg, 5, epi::ModelKind::Seir);
            const auto batch = random_batch(2, 3, 5, rng);
            CHECK(rnn::gradient_check(model, batch, 60, trial) < 1e-4);
        }
    }

    SUBCASE("relu stack") {
        for (int trial = 0; trial < 4; ++trial) {
            rnn::RnnConfig cfg = small_cfg(2, 5, "relu");
            cfg.seed = 200 + trial;
            const rnn::RnnModel model = rnn::RnnModel::init(cfg, 3, epi::ModelKind::Sis);
            const auto batch = random_batch(2, 4, 3, rng);
            CHECK(rnn::gradient_check(model, batch, 60, 10 + trial) < 1e-4);
        }
    }

    SUBCASE("single-step sequence reduces to plain backprop") {
        const rnn::RnnModel model = rnn::RnnModel::init(small_cfg(), 5, epi::ModelKind::Seir);
        const auto batch = random_batch(1, 1, 5, rng);
        CHECK(rnn::gradient_check(model, batch, 40, 3) < 1e-4);
    }

    SUBCASE("zero-length sequence is rejected") {
        const rnn::RnnModel model = rnn::RnnModel::init(small_cfg(), 5, epi::ModelKind::Seir);
        std::vector<rnn::Sequence> batch(1);
        CHECK_THROWS_AS((void)rnn::gradient_check(model, batch), InputError);
    }
}

TEST_CASE("training memorizes a constant pattern") {
    const pipeline::TrainingDataset ds = constant_dataset(4, 3);
    rnn::RnnConfig cfg;
    cfg.num_layers = 2;
    cfg.hidden_size = 8;
    cfg.dropout_rate = 0.0;
    cfg.epochs = 300;
    cfg.batch_size = 4;
    cfg.learning_rate = 0.01;
    cfg.seed = 4;
    const auto [model, report] = rnn::train(ds, cfg);
    CHECK(report.final_loss < 1e-4);
    CHECK(report.loss_history.size() == 300);
}

TEST_CASE("training is seed-deterministic, dropout masks included") {
    const pipeline::TrainingDataset ds = constant_dataset(6, 4);
    rnn::RnnConfig cfg;
    cfg.num_layers = 3;
    cfg.hidden_size = 6;
    cfg.dropout_rate = 0.2;
    cfg.epochs = 5;
    cfg.seed = 77;
    const auto [model_a, report_a] = rnn::train(ds, cfg);
    const auto [model_b, report_b] = rnn::train(ds, cfg);
    CHECK(report_a.loss_history == report_b.loss_history);
    for (long i = 0; i < model_a.parameter_count(); ++i) {
        CHECK(model_a.get_parameter(i) == model_b.get_parameter(i));
    }
}

TEST_CASE("empty dataset is rejected") {
    pipeline::TrainingDataset ds;
    CHECK_THROWS_AS((void)rnn::train(ds, rnn::RnnConfig{}), InputError);
}

TEST_CASE("checkpoint round trip preserves rollouts bit-exact") {
    const std::string path = "rnn_ckpt_test.txt";
    const pipeline::TrainingDataset ds = constant_dataset(4, 3);
    rnn::RnnConfig cfg;
    cfg.num_layers = 2;
    cfg.hidden_size = 6;
    cfg.epochs = 10;
    cfg.seed = 9;
    auto [model, report] = rnn::train(ds, cfg);
    rnn::save_model(model, path);
    rnn::RnnModel back = rnn::load_model(path);

    CHECK(back.parameter_count() == model.parameter_count());
    for (long i = 0; i < model.parameter_count(); ++i) {
        CHECK(back.get_parameter(i) == model.get_parameter(i));
    }
    CHECK(back.feature_mean == model.feature_mean);
    CHECK(back.feature_std == model.feature_std);

    // replay a fixed input sequence through both
    model.reset_state();
    back.reset_state();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd x(5);
        for (int i = 0; i < 5; ++i) x(i) = unit(rng);
        const Eigen::Vector2d a = model.forward(x);
        const Eigen::Vector2d b = back.forward(x);
        CHECK(a == b);
    }
    std::remove(path.c_str());
}

TEST_CASE("checkpoint loading rejects damaged files") {
    const std::string path = "rnn_ckpt_bad_test.txt";
    const rnn::RnnModel model = rnn::RnnModel::init(small_cfg(), 5, epi::ModelKind::Seir);
    rnn::save_model(model, path);

    SUBCASE("truncated file") {
        std::ifstream in(path);
        std::string contents((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
        in.close();
        std::ofstream out(path);
        out << contents.substr(0, contents.size() / 2);
        out.close();
        CHECK_THROWS_AS((void)rnn::load_model(path), InputError);
    }

    SUBCASE("bad magic") {
        std::ofstream out(path);
        out << "something-else 1\n";
        out.close();
        CHECK_THROWS_AS((void)rnn::load_model(path), InputError);
    }

    std::remove(path.c_str());
}

TEST_CASE("loss drops over early epochs on a learnable pattern") {
    // state-dependent targets: u1 tracks S, u2 tracks I
    pipeline::TrainingDataset ds;
    ds.meta.model = epi::ModelKind::Seir;
    ds.meta.window_dim = 5;
    ds.meta.horizon = 12;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int w = 0; w < 8; ++w) {
        for (int j = 0; j < 5; ++j) {
            pipeline::TrainingPair pair;
            pair.label = "L" + std::to_string(w % 2);
            pair.window = w;
            pair.epoch = w + j;
            const double s = unit(rng), e = (1.0 - s) * unit(rng);
            const double i = (1.0 - s - e) * unit(rng);
            pair.state = epi::SeirState{s, e, i, 1.0 - s - e - i};
            pair.beta = 0.3;
            pair.u1 = s;
            pair.u2 = i;
            ds.pairs.push_back(pair);
        }
    }
    rnn::RnnConfig cfg;
    cfg.num_layers = 3;
    cfg.hidden_size = 16;
    cfg.epochs = 3;
    cfg.seed = 12;
    const auto [model, report] = rnn::train(ds, cfg);
    CHECK(report.loss_history[2] < report.loss_history[0]);
}
