#include "rnnbo/rnn.hpp"

#include "rnnbo/errors.hpp"
#include "rnnbo/io.hpp"
#include "rnnbo/seeding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace rnnbo::rnn {

void RnnConfig::validate() const {
    if (num_layers < 2 || num_layers > 7) throw InputError("rnn: num_layers must lie in [2,7]");
    if (hidden_size < 1) throw InputError("rnn: hidden_size must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
        throw InputError("rnn: dropout_rate must lie in [0,1)");
    }
    if (activation != "relu" && activation != "tanh") {
        throw InputError("rnn: unknown activation '" + activation + "'");
    }
    if (epochs < 1) throw InputError("rnn: epochs must be >= 1");
    if (batch_size < 1) throw InputError("rnn: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw InputError("rnn: learning_rate must be > 0");
    if (!(out_lower < out_upper)) throw InputError("rnn: out_lower must be < out_upper");
}

namespace {

double activate(double z, bool relu) { return relu ? (z > 0.0 ? z : 0.0) : std::tanh(z); }
double activate_deriv(double z, bool relu) {
    if (relu) return z > 0.0 ? 1.0 : 0.0;
    const double t = std::tanh(z);
    return 1.0 - t * t;
}

double sigmoid(double y) { return 1.0 / (1.0 + std::exp(-y)); }

} // namespace

RnnModel RnnModel::init(const RnnConfig& cfg, int input_dim, epi::ModelKind kind) {
    cfg.validate();
    if (input_dim < 1) throw InputError("rnn: input_dim must be >= 1");

    RnnModel model;
    model.cfg_ = cfg;
    model.input_dim_ = input_dim;
    model.kind_ = kind;

    std::mt19937_64 rng(mix_seed(cfg.seed, 0x1717));
    auto glorot = [&rng](Eigen::MatrixXd& m) {
        const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
        }
    };

    model.layers.resize(cfg.num_layers);
    for (int l = 0; l < cfg.num_layers; ++l) {
        const int in = l == 0 ? input_dim : cfg.hidden_size;
        Layer& layer = model.layers[l];
        layer.w.resize(cfg.hidden_size, in);
        layer.u.resize(cfg.hidden_size, cfg.hidden_size);
        layer.b = Eigen::VectorXd::Zero(cfg.hidden_size);
        glorot(layer.w);
        glorot(layer.u);
    }
    model.head_w.resize(2, cfg.hidden_size);
    glorot(model.head_w);
    model.head_b.setZero();
    model.feature_mean = Eigen::VectorXd::Zero(input_dim);
    model.feature_std = Eigen::VectorXd::Ones(input_dim);
    model.reset_state();
    return model;
}

void RnnModel::reset_state() {
    hidden_.assign(cfg_.num_layers, Eigen::VectorXd::Zero(cfg_.hidden_size));
}

Eigen::Vector2d RnnModel::forward(const Eigen::VectorXd& raw_input) {
    if (raw_input.size() != input_dim_) throw InputError("rnn forward: input size mismatch");
    if (hidden_.empty()) reset_state();
    const bool relu = cfg_.activation == "relu";

    Eigen::VectorXd x = (raw_input - feature_mean).cwiseQuotient(feature_std);
    for (int l = 0; l < cfg_.num_layers; ++l) {
        Eigen::VectorXd z = layers[l].w * x + layers[l].u * hidden_[l] + layers[l].b;
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = activate(z(i), relu);
        hidden_[l] = z;
        x = std::move(z);
    }
    const Eigen::Vector2d y = head_w * x + head_b;
    Eigen::Vector2d out;
    for (int i = 0; i < 2; ++i) {
        out(i) = cfg_.out_lower + (cfg_.out_upper - cfg_.out_lower) * sigmoid(y(i));
    }
    return out;
}

long RnnModel::parameter_count() const {
    long n = 0;
    for (const Layer& l : layers) n += l.w.size() + l.u.size() + l.b.size();
    return n + head_w.size() + head_b.size();
}

double RnnModel::get_parameter(long index) const {
    for (const Layer& l : layers) {
        for (const auto* m : {&l.w, &l.u}) {
            if (index < m->size()) return *(m->data() + index);
            index -= m->size();
        }
        if (index < l.b.size()) return l.b(index);
        index -= l.b.size();
    }
    if (index < head_w.size()) return *(head_w.data() + index);
    index -= head_w.size();
    if (index < 2) return head_b(index);
    throw InputError("rnn: parameter index out of range");
}

void RnnModel::set_parameter(long index, double value) {
    for (Layer& l : layers) {
        for (auto* m : {&l.w, &l.u}) {
            if (index < m->size()) {
                *(m->data() + index) = value;
                return;
            }
            index -= m->size();
        }
        if (index < l.b.size()) {
            l.b(index) = value;
            return;
        }
        index -= l.b.size();
    }
    if (index < head_w.size()) {
        *(head_w.data() + index) = value;
        return;
    }
    index -= head_w.size();
    if (index < 2) {
        head_b(index) = value;
        return;
    }
    throw InputError("rnn: parameter index out of range");
}

// ---------------------------------------------------------------------------
// Training internals
// ---------------------------------------------------------------------------

struct Grads {
    std::vector<RnnModel::Layer> layers;
    Eigen::MatrixXd head_w;
    Eigen::Vector2d head_b;

    static Grads zeros_like(const RnnModel& model) {
        Grads g;
        g.layers.resize(model.layers.size());
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            g.layers[l].w = Eigen::MatrixXd::Zero(model.layers[l].w.rows(), model.layers[l].w.cols());
            g.layers[l].u = Eigen::MatrixXd::Zero(model.layers[l].u.rows(), model.layers[l].u.cols());
            g.layers[l].b = Eigen::VectorXd::Zero(model.layers[l].b.size());
        }
        g.head_w = Eigen::MatrixXd::Zero(model.head_w.rows(), model.head_w.cols());
        g.head_b.setZero();
        return g;
    }

    void scale(double s) {
        for (auto& l : layers) {
            l.w *= s;
            l.u *= s;
            l.b *= s;
        }
        head_w *= s;
        head_b *= s;
    }
};

struct Backprop {
    const RnnModel& model;
    // One mask column per layer; identity when dropout is off. Masks already
    // carry the inverted-dropout 1/(1-p) scale.
    const std::vector<Eigen::VectorXd>* masks = nullptr;

    // Runs one sequence (hidden state starts at zero), accumulates parameter
    // gradients of the sequence loss sum ||o_t - y_t||^2 / (T*2) into `grads`,
    // and returns that loss.
    double run(const Sequence& seq, Grads* grads) const {
        const int steps = static_cast<int>(seq.inputs.size());
        if (steps == 0) throw InputError("rnn: zero-length sequence");
        if (seq.targets.size() != seq.inputs.size()) {
            throw InputError("rnn: inputs/targets length mismatch");
        }
        const int layers_n = static_cast<int>(model.layers.size());
        const int hidden = static_cast<int>(model.cfg_.hidden_size);
        const bool relu = model.cfg_.activation == "relu";
        const double span = model.cfg_.out_upper - model.cfg_.out_lower;

        // forward pass, capturing everything BPTT needs
        std::vector<Eigen::VectorXd> x0(steps);
        std::vector<std::vector<Eigen::VectorXd>> z(steps), hs(steps), out(steps);
        std::vector<Eigen::Vector2d> sig(steps), err(steps);
        const Eigen::VectorXd zero_h = Eigen::VectorXd::Zero(hidden);
        double loss = 0.0;

        for (int t = 0; t < steps; ++t) {
            if (seq.inputs[t].size() != model.input_dim_) {
                throw InputError("rnn: input size mismatch in sequence");
            }
            x0[t] = (seq.inputs[t] - model.feature_mean).cwiseQuotient(model.feature_std);
            z[t].resize(layers_n);
            hs[t].resize(layers_n);
            out[t].resize(layers_n);
            const Eigen::VectorXd* in = &x0[t];
            for (int l = 0; l < layers_n; ++l) {
                const Eigen::VectorXd& hprev = t == 0 ? zero_h : hs[t - 1][l];
                z[t][l] = model.layers[l].w * (*in) + model.layers[l].u * hprev +
                          model.layers[l].b;
                Eigen::VectorXd h(hidden);
                for (int i = 0; i < hidden; ++i) h(i) = activate(z[t][l](i), relu);
                hs[t][l] = std::move(h);
                out[t][l] = masks ? hs[t][l].cwiseProduct((*masks)[l]).eval() : hs[t][l];
                in = &out[t][l];
            }
            const Eigen::Vector2d y = model.head_w * out[t][layers_n - 1] + model.head_b;
            for (int i = 0; i < 2; ++i) sig[t](i) = sigmoid(y(i));
            const Eigen::Vector2d o =
                Eigen::Vector2d::Constant(model.cfg_.out_lower) + span * sig[t];
            err[t] = o - seq.targets[t];
            loss += err[t].squaredNorm();
        }
        const double norm = static_cast<double>(steps) * 2.0;
        loss /= norm;

        if (!grads) return loss;

        // backward pass
        std::vector<Eigen::VectorXd> carry(layers_n, Eigen::VectorXd::Zero(hidden));
        for (int t = steps - 1; t >= 0; --t) {
            Eigen::Vector2d dy;
            for (int i = 0; i < 2; ++i) {
                dy(i) = 2.0 / norm * err[t](i) * span * sig[t](i) * (1.0 - sig[t](i));
            }
            grads->head_w += dy * out[t][layers_n - 1].transpose();
            grads->head_b += dy;

            Eigen::VectorXd dout = model.head_w.transpose() * dy;
            for (int l = layers_n - 1; l >= 0; --l) {
                Eigen::VectorXd dh = masks ? dout.cwiseProduct((*masks)[l]).eval() : dout;
                dh += carry[l];
                Eigen::VectorXd dz(hidden);
                for (int i = 0; i < hidden; ++i) dz(i) = dh(i) * activate_deriv(z[t][l](i), relu);

                const Eigen::VectorXd& in = l == 0 ? x0[t] : out[t][l - 1];
                const Eigen::VectorXd& hprev = t == 0 ? zero_h : hs[t - 1][l];
                grads->layers[l].w += dz * in.transpose();
                grads->layers[l].u += dz * hprev.transpose();
                grads->layers[l].b += dz;
                carry[l] = model.layers[l].u.transpose() * dz;
                if (l > 0) dout = model.layers[l].w.transpose() * dz;
            }
        }
        return loss;
    }
};

std::vector<Sequence> sequences_from_dataset(const pipeline::TrainingDataset& dataset) {
    std::map<std::pair<std::string, int>, Sequence> grouped;
    std::vector<std::pair<std::string, int>> order;
    for (const pipeline::TrainingPair& pair : dataset.pairs) {
        const auto key = std::make_pair(pair.label, pair.window);
        if (grouped.find(key) == grouped.end()) order.push_back(key);
        Sequence& seq = grouped[key];
        const std::vector<double> f = pair.features();
        seq.inputs.push_back(Eigen::Map<const Eigen::VectorXd>(f.data(), f.size()));
        seq.targets.push_back(Eigen::Vector2d(pair.u1, pair.u2));
    }
    std::vector<Sequence> out;
    out.reserve(order.size());
    for (const auto& key : order) out.push_back(std::move(grouped[key]));
    return out;
}

std::pair<RnnModel, TrainReport> train(const pipeline::TrainingDataset& dataset,
                                       const RnnConfig& cfg) {
    cfg.validate();
    if (dataset.pairs.empty()) throw InputError("rnn train: empty dataset");
    const auto start = std::chrono::steady_clock::now();

    std::vector<Sequence> sequences = sequences_from_dataset(dataset);
    const int input_dim = static_cast<int>(sequences.front().inputs.front().size());
    RnnModel model = RnnModel::init(cfg, input_dim, dataset.meta.model);

    // Per-feature standardization constants, frozen into the checkpoint.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(input_dim);
    long count = 0;
    for (const Sequence& seq : sequences) {
        for (const Eigen::VectorXd& x : seq.inputs) {
            mean += x;
            ++count;
        }
    }
    mean /= static_cast<double>(count);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(input_dim);
    for (const Sequence& seq : sequences) {
        for (const Eigen::VectorXd& x : seq.inputs) var += (x - mean).cwiseAbs2();
    }
    var /= static_cast<double>(count);
    model.feature_mean = mean;
    model.feature_std = var.cwiseSqrt().cwiseMax(1e-8);

    Grads adam_m = Grads::zeros_like(model);
    Grads adam_v = Grads::zeros_like(model);
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    long adam_t = 0;

    std::mt19937_64 rng(mix_seed(cfg.seed, 0x7247));
    std::bernoulli_distribution keep(1.0 - cfg.dropout_rate);
    const double keep_scale = 1.0 / (1.0 - cfg.dropout_rate);

    std::vector<int> index(sequences.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<int>(i);

    TrainReport report;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(index.begin(), index.end(), rng);
        double epoch_se = 0.0;
        long epoch_scalars = 0;

        for (std::size_t begin = 0; begin < index.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(index.size(), begin + cfg.batch_size);
            Grads grads = Grads::zeros_like(model);
            for (std::size_t k = begin; k < end; ++k) {
                const Sequence& seq = sequences[index[k]];
                std::vector<Eigen::VectorXd> masks(model.layers.size());
                for (auto& m : masks) {
                    m.resize(cfg.hidden_size);
                    for (int i = 0; i < cfg.hidden_size; ++i) {
                        m(i) = cfg.dropout_rate > 0.0 ? (keep(rng) ? keep_scale : 0.0) : 1.0;
                    }
                }
                Backprop masked{model, &masks};
                const double loss = masked.run(seq, &grads);
                epoch_se += loss * static_cast<double>(seq.inputs.size()) * 2.0;
                epoch_scalars += static_cast<long>(seq.inputs.size()) * 2;
            }
            grads.scale(1.0 / static_cast<double>(end - begin));

            ++adam_t;
            const double mc = 1.0 - std::pow(b1, static_cast<double>(adam_t));
            const double vc = 1.0 - std::pow(b2, static_cast<double>(adam_t));
            auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
                for (Eigen::Index i = 0; i < param.size(); ++i) {
                    m.data()[i] = b1 * m.data()[i] + (1.0 - b1) * g.data()[i];
                    v.data()[i] = b2 * v.data()[i] + (1.0 - b2) * g.data()[i] * g.data()[i];
                    const double m_hat = m.data()[i] / mc;
                    const double v_hat = v.data()[i] / vc;
                    param.data()[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + eps);
                }
            };
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                update(model.layers[l].w, grads.layers[l].w, adam_m.layers[l].w, adam_v.layers[l].w);
                update(model.layers[l].u, grads.layers[l].u, adam_m.layers[l].u, adam_v.layers[l].u);
                update(model.layers[l].b, grads.layers[l].b, adam_m.layers[l].b, adam_v.layers[l].b);
            }
            update(model.head_w, grads.head_w, adam_m.head_w, adam_v.head_w);
            update(model.head_b, grads.head_b, adam_m.head_b, adam_v.head_b);
        }

        const double epoch_loss = epoch_se / static_cast<double>(epoch_scalars);
        if (!std::isfinite(epoch_loss)) {
            throw NumericalError("rnn train: non-finite loss at epoch " + std::to_string(epoch));
        }
        report.loss_history.push_back(epoch_loss);
    }

    report.final_loss = report.loss_history.back();
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    model.reset_state();
    return {std::move(model), std::move(report)};
}

double gradient_check(const RnnModel& model, const std::vector<Sequence>& batch, int num_params,
                      std::uint64_t seed) {
    if (batch.empty()) throw InputError("gradient_check: empty batch");
    for (const Sequence& seq : batch) {
        if (seq.inputs.empty()) throw InputError("gradient_check: zero-length sequence");
    }

    Backprop bp{model, nullptr};
    Grads grads = Grads::zeros_like(model);
    for (const Sequence& seq : batch) bp.run(seq, &grads);
    grads.scale(1.0 / static_cast<double>(batch.size()));

    // Flatten analytic grads through the same indexing as get/set_parameter.
    RnnModel analytic = model;
    analytic.layers = grads.layers;
    analytic.head_w = grads.head_w;
    analytic.head_b = grads.head_b;

    RnnModel probe = model;
    Backprop probe_bp{probe, nullptr};
    auto batch_loss = [&]() {
        double total = 0.0;
        for (const Sequence& seq : batch) total += probe_bp.run(seq, nullptr);
        return total / static_cast<double>(batch.size());
    };

    const long n_params = model.parameter_count();
    std::mt19937_64 rng(mix_seed(seed, 0x6c));
    std::uniform_int_distribution<long> pick(0, n_params - 1);

    double max_rel = 0.0;
    const double h = 1e-6;
    for (int k = 0; k < num_params; ++k) {
        const long idx = pick(rng);
        const double theta = probe.get_parameter(idx);
        probe.set_parameter(idx, theta + h);
        const double up = batch_loss();
        probe.set_parameter(idx, theta - h);
        const double down = batch_loss();
        probe.set_parameter(idx, theta);

        const double numeric = (up - down) / (2.0 * h);
        const double exact = analytic.get_parameter(idx);
        const double rel = std::abs(numeric - exact) /
                           std::max({std::abs(numeric), std::abs(exact), 1e-8});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kCheckpointMagic = "rnnbo-rnn-checkpoint";
}

void save_model(const RnnModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    const RnnConfig& cfg = model.config();
    out << kCheckpointMagic << " 1\n";
    out << "model " << epi::to_string(model.model_kind()) << '\n';
    out << "input_dim " << model.input_dim() << '\n';
    out << "num_layers " << cfg.num_layers << '\n';
    out << "hidden_size " << cfg.hidden_size << '\n';
    out << "activation " << cfg.activation << '\n';
    out << "dropout_rate " << io::g17(cfg.dropout_rate) << '\n';
    out << "out_lower " << io::g17(cfg.out_lower) << '\n';
    out << "out_upper " << io::g17(cfg.out_upper) << '\n';
    out << "feature_mean";
    for (Eigen::Index i = 0; i < model.feature_mean.size(); ++i) {
        out << ' ' << io::g17(model.feature_mean(i));
    }
    out << "\nfeature_std";
    for (Eigen::Index i = 0; i < model.feature_std.size(); ++i) {
        out << ' ' << io::g17(model.feature_std(i));
    }
    const long n = model.parameter_count();
    out << "\nparams " << n << '\n';
    for (long i = 0; i < n; ++i) out << io::g17(model.get_parameter(i)) << '\n';
}

RnnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open checkpoint: " + path);

    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != kCheckpointMagic) throw InputError("checkpoint: bad magic");
    if (version != 1) throw InputError("checkpoint: unsupported version " + std::to_string(version));

    auto expect_key = [&in](const std::string& key) {
        std::string k;
        if (!(in >> k) || k != key) throw InputError("checkpoint: expected key '" + key + "'");
    };

    RnnConfig cfg;
    std::string model_name;
    int input_dim = 0;
    expect_key("model");
    in >> model_name;
    expect_key("input_dim");
    in >> input_dim;
    expect_key("num_layers");
    in >> cfg.num_layers;
    expect_key("hidden_size");
    in >> cfg.hidden_size;
    expect_key("activation");
    in >> cfg.activation;
    expect_key("dropout_rate");
    in >> cfg.dropout_rate;
    expect_key("out_lower");
    in >> cfg.out_lower;
    expect_key("out_upper");
    in >> cfg.out_upper;
    if (!in) throw InputError("checkpoint: truncated header");

    RnnModel model = RnnModel::init(cfg, input_dim, epi::model_kind_from_string(model_name));
    expect_key("feature_mean");
    for (Eigen::Index i = 0; i < model.feature_mean.size(); ++i) in >> model.feature_mean(i);
    expect_key("feature_std");
    for (Eigen::Index i = 0; i < model.feature_std.size(); ++i) in >> model.feature_std(i);

    expect_key("params");
    long n = 0;
    in >> n;
    if (!in || n != model.parameter_count()) {
        throw InputError("checkpoint: parameter count mismatch");
    }
    for (long i = 0; i < n; ++i) {
        double v = 0.0;
        if (!(in >> v)) throw InputError("checkpoint: truncated at parameter " + std::to_string(i));
        model.set_parameter(i, v);
    }
    model.reset_state();
    return model;
}

} // namespace rnnbo::rnn
