#pragma once

#include "rnnbo/acquisition.hpp"
#include "rnnbo/gp.hpp"
#include "rnnbo/local_search.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rnnbo::bo {

struct BoConfig {
    int window_dim = 10; // d: time epochs optimized per run
    int channels = 2;    // control channels per epoch (u1, u2)
    int n_init = 10;
    int n_iters = 50;
    gp::KernelConfig kernel;
    acq::LcbConfig lcb;
    acq::SamplerConfig sampler;
    ls::AdamConfig adam;
    std::uint64_t seed = 0;

    // Total optimization dimension. The channels are concatenated channel-major:
    // [u1(t_1..t_d), u2(t_1..t_d)].
    int dim() const { return window_dim * channels; }

    void validate() const;
};

struct BoResult {
    Eigen::VectorXd best_control;
    double best_value = 0.0;
    // Best-so-far: entry 0 after the initial design, one per BO iteration,
    // one after the local search. Nonincreasing; back() == best_value.
    std::vector<double> history;
    long evaluations = 0;
    bool error = false;
    std::string error_message;
};

/// One window of Bayesian optimization over [0,1]^dim: initial design, GP fit +
/// acquisition loop (bandit sampler vs. random search), then Adam local search
/// from the incumbent. Deterministic for a fixed config and seed.
BoResult optimize_window(const ls::Objective& objective, const BoConfig& cfg);

/// Full-horizon baseline: the same pipeline with the whole horizon as one window.
BoResult optimize_full(const ls::Objective& objective, const BoConfig& cfg);

} // namespace rnnbo::bo
