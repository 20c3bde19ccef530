#pragma once

#include "rnnbo/bo_engine.hpp"
#include "rnnbo/epidemic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rnnbo::pipeline {

struct InitialSetting {
    std::string label;
    epi::EpidemicState state;
    double beta = 0.3;

    void validate() const;
};

/// One supervised unit: system features at an epoch mapped to the control
/// applied there. Feature order is (S, E, I, R, beta) for SEIR, (S, I, beta)
/// for SIS.
struct TrainingPair {
    std::string label;
    int window = 0; // originating window index, 0-based
    int epoch = 0;
    epi::EpidemicState state;
    double beta = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;

    std::vector<double> features() const;
};

struct DatasetMeta {
    int schema = 1;
    epi::ModelKind model = epi::ModelKind::Seir;
    int window_dim = 0; // d
    int horizon = 0;    // total control epochs
};

struct TrainingDataset {
    DatasetMeta meta;
    std::vector<TrainingPair> pairs;

    int pairs_per_setting() const { return meta.window_dim * (meta.horizon - meta.window_dim + 1); }
    std::vector<std::string> labels() const;
};

/// Output of one setting's sliding-window sweep: the recorded pairs plus the
/// control trajectory actually applied over the full horizon (each window
/// contributes its first epoch; the last window contributes all d).
struct WindowedRun {
    std::vector<TrainingPair> pairs;
    std::vector<epi::ControlPair> applied_controls; // length = horizon
    epi::SimResult applied_trajectory;
    std::vector<bo::BoResult> window_results;
};

/// Sliding-window optimal-control sweep: window i starts from the state reached
/// at epoch t_i, solves the d-epoch control via optimize_window, records d
/// (state, control) pairs along that window's trajectory, and seeds window i+1
/// with the state at t_{i+1}. For SIS, `world_path` (generated from `seed` when
/// null) drives the realized trajectory while each window's objective averages
/// over its own common-random-numbers paths.
WindowedRun run_windowed_bo(const InitialSetting& setting, const epi::EpidemicParams& p,
                            const bo::BoConfig& bo_cfg, int replications,
                            std::uint64_t seed, const epi::NoisePath* world_path = nullptr);

std::vector<TrainingPair> collect_trajectory(const InitialSetting& setting,
                                             const epi::EpidemicParams& p,
                                             const bo::BoConfig& bo_cfg, int replications,
                                             std::uint64_t seed);

struct SettingsPlan {
    epi::ModelKind model = epi::ModelKind::Seir;
    std::vector<InitialSetting> explicit_list;
    // Random mode, used when explicit_list is empty: states drawn uniformly from
    // the simplex (R fixed at 0 for SEIR), beta drawn from `betas`.
    int random_count = 0;
    std::vector<double> betas;
    std::uint64_t seed = 0;
};

std::vector<InitialSetting> vary_settings(const SettingsPlan& plan);

// Window control vectors are channel-major: [u1(t_1..t_d), u2(t_1..t_d)].
std::vector<epi::ControlPair> unpack_controls(const Eigen::VectorXd& v);
Eigen::VectorXd pack_controls(std::span<const epi::ControlPair> controls);

void save_dataset(const TrainingDataset& ds, const std::string& path);
TrainingDataset load_dataset(const std::string& path);

} // namespace rnnbo::pipeline
