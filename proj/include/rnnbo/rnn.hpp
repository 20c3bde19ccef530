#pragma once

#include "rnnbo/data_pipeline.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace rnnbo::rnn {

struct RnnConfig {
    int num_layers = 4;   // stacked recurrent layers, 2..7
    int hidden_size = 32;
    double dropout_rate = 0.2; // inverted dropout on inter-layer activations
    std::string activation = "relu"; // or "tanh"
    int epochs = 12;
    int batch_size = 8; // sequences per Adam update
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    double out_lower = 0.0; // output squashing range (control bounds)
    double out_upper = 1.0;

    void validate() const;
};

/// One training sequence: a window's pairs in epoch order.
struct Sequence {
    std::vector<Eigen::VectorXd> inputs; // raw features
    std::vector<Eigen::Vector2d> targets;
};

/// Stacked one-to-one recurrent net. Layer l computes
/// h_l = act(W_l x_l + U_l h_l_prev + b_l) with x_1 the standardized input and
/// x_{l+1} = h_l; the output head squashes an affine map of the top hidden
/// state into [out_lower, out_upper] via a scaled logistic.
class RnnModel {
public:
    RnnModel() = default;
    static RnnModel init(const RnnConfig& cfg, int input_dim, epi::ModelKind kind);

    /// Advances the hidden state and returns (u1, u2). Inputs are raw features;
    /// standardization constants stored in the model are applied first.
    Eigen::Vector2d forward(const Eigen::VectorXd& raw_input);
    void reset_state();

    const RnnConfig& config() const { return cfg_; }
    int input_dim() const { return input_dim_; }
    epi::ModelKind model_kind() const { return kind_; }

    // Flat parameter access (gradient check, serialization).
    long parameter_count() const;
    double get_parameter(long index) const;
    void set_parameter(long index, double value);

    struct Layer {
        Eigen::MatrixXd w; // hidden x in
        Eigen::MatrixXd u; // hidden x hidden
        Eigen::VectorXd b;
    };

    std::vector<Layer> layers;
    Eigen::MatrixXd head_w; // 2 x hidden
    Eigen::Vector2d head_b;
    Eigen::VectorXd feature_mean;
    Eigen::VectorXd feature_std;

private:
    friend struct Backprop;
    RnnConfig cfg_;
    int input_dim_ = 0;
    epi::ModelKind kind_ = epi::ModelKind::Seir;
    std::vector<Eigen::VectorXd> hidden_; // per-layer carry
};

struct TrainReport {
    std::vector<double> loss_history; // training MSE per epoch
    double final_loss = 0.0;
    double wall_time_s = 0.0;
};

std::pair<RnnModel, TrainReport> train(const pipeline::TrainingDataset& dataset,
                                       const RnnConfig& cfg);

/// Max relative error between BPTT gradients and central finite differences
/// over `num_params` randomly chosen parameters (dropout off).
double gradient_check(const RnnModel& model, const std::vector<Sequence>& batch,
                      int num_params = 50, std::uint64_t seed = 0);

void save_model(const RnnModel& model, const std::string& path);
RnnModel load_model(const std::string& path);

std::vector<Sequence> sequences_from_dataset(const pipeline::TrainingDataset& dataset);

} // namespace rnnbo::rnn
