#pragma once

#include "rnnbo/gp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace rnnbo::acq {

struct LcbConfig {
    double weight_k = 2.0;

    void validate() const;
};

/// mean - k * sqrt(variance); smaller is better.
double lcb(const gp::Posterior& post, const LcbConfig& cfg);

struct SamplerConfig {
    int num_ranges = 5;
    int initial_reward = 5;
    int mab_rounds = 10;
    int n_random = 100; // random-search draws per iteration
    std::uint64_t seed = 0;
    double lower = 0.0;
    double upper = 1.0;

    void validate() const;
};

// Every range keeps at least one candidate draw per round.
inline constexpr int kRewardFloor = 1;

/// Bandit state over a partition of the scalar control range [lower, upper].
/// A range's candidates draw all coordinates uniformly within that sub-interval.
struct MabState {
    std::vector<double> edges; // num_ranges + 1 ascending edges covering [lower, upper]
    std::vector<int> rewards;  // per-range draw budget, >= kRewardFloor
    int rounds = 0;

    static MabState init(const SamplerConfig& cfg);
    int num_ranges() const { return static_cast<int>(rewards.size()); }
    void validate() const;
};

struct Candidate {
    Eigen::VectorXd point;
    double lcb_value = 0.0;
};

/// One bandit round: draws rewards[r] candidates from each range, scores all by
/// LCB, rewards the range that produced the largest LCB, penalizes the one that
/// produced the smallest (clamped at kRewardFloor), and returns the round's
/// minimum-LCB candidate. Mutates `state`; callers serialize access.
Candidate mab_round(MabState& state, const gp::GpModel& model, const LcbConfig& lcb_cfg,
                    std::mt19937_64& rng);

/// n_random i.i.d. uniform draws over the full box; returns the minimum-LCB one.
Candidate random_search(const gp::GpModel& model, const SamplerConfig& cfg,
                        const LcbConfig& lcb_cfg, std::mt19937_64& rng);

/// Picks the candidate with the smaller LCB; ties go to u_mab.
Eigen::VectorXd select_candidate(const Eigen::VectorXd& u_mab, const Eigen::VectorXd& u_rs,
                                 const gp::GpModel& model, const LcbConfig& lcb_cfg);

} // namespace rnnbo::acq
