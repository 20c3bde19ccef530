#include "rnnbo/acquisition.hpp"

#include "rnnbo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rnnbo::acq {

void LcbConfig::validate() const {
    if (weight_k < 0.0) throw InputError("lcb: weight_k must be >= 0");
}

double lcb(const gp::Posterior& post, const LcbConfig& cfg) {
    cfg.validate();
    if (post.variance < 0.0) throw InputError("lcb: negative variance");
    return post.mean - cfg.weight_k * std::sqrt(post.variance);
}

void SamplerConfig::validate() const {
    if (num_ranges < 1 || initial_reward < 1 || mab_rounds < 1 || n_random < 1) {
        throw InputError("sampler: counts must be >= 1");
    }
    if (!(lower < upper)) throw InputError("sampler: lower must be < upper");
}

MabState MabState::init(const SamplerConfig& cfg) {
    cfg.validate();
    MabState state;
    state.edges.resize(cfg.num_ranges + 1);
    const double width = (cfg.upper - cfg.lower) / cfg.num_ranges;
    for (int i = 0; i <= cfg.num_ranges; ++i) {
        state.edges[i] = cfg.lower + width * i;
    }
    state.edges.front() = cfg.lower; // exact endpoints regardless of rounding
    state.edges.back() = cfg.upper;
    state.rewards.assign(cfg.num_ranges, cfg.initial_reward);
    return state;
}

void MabState::validate() const {
    if (rewards.empty() || edges.size() != rewards.size() + 1) {
        throw InputError("mab: edges/rewards size mismatch");
    }
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i] < edges[i + 1])) throw InputError("mab: edges not ascending");
    }
    for (int r : rewards) {
        if (r < kRewardFloor) throw InputError("mab: reward below floor");
    }
}

Candidate mab_round(MabState& state, const gp::GpModel& model, const LcbConfig& lcb_cfg,
                    std::mt19937_64& rng) {
    state.validate();
    const int dim = model.dim();

    Candidate best;   // minimum LCB this round: the returned sample
    Candidate worst;  // maximum LCB: its range earns a reward
    best.lcb_value = std::numeric_limits<double>::infinity();
    worst.lcb_value = -std::numeric_limits<double>::infinity();
    int best_range = -1;
    int worst_range = -1;

    Eigen::VectorXd point(dim);
    for (int r = 0; r < state.num_ranges(); ++r) {
        std::uniform_real_distribution<double> coord(state.edges[r], state.edges[r + 1]);
        for (int s = 0; s < state.rewards[r]; ++s) {
            for (int k = 0; k < dim; ++k) point(k) = coord(rng);
            const double value = lcb(model.posterior(point), lcb_cfg);
            if (value < best.lcb_value) {
                best.point = point;
                best.lcb_value = value;
                best_range = r;
            }
            if (value > worst.lcb_value) {
                worst.point = point;
                worst.lcb_value = value;
                worst_range = r;
            }
        }
    }

    // The range that produced the largest LCB gains one draw, the one that
    // produced the smallest loses one; both clamped at the floor.
    state.rewards[worst_range] += 1;
    state.rewards[best_range] = std::max(kRewardFloor, state.rewards[best_range] - 1);
    state.rounds += 1;
    return best;
}

Candidate random_search(const gp::GpModel& model, const SamplerConfig& cfg,
                        const LcbConfig& lcb_cfg, std::mt19937_64& rng) {
    cfg.validate();
    const int dim = model.dim();
    std::uniform_real_distribution<double> coord(cfg.lower, cfg.upper);

    Candidate best;
    best.lcb_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd point(dim);
    for (int s = 0; s < cfg.n_random; ++s) {
        for (int k = 0; k < dim; ++k) point(k) = coord(rng);
        const double value = lcb(model.posterior(point), lcb_cfg);
        if (value < best.lcb_value) {
            best.point = point;
            best.lcb_value = value;
        }
    }
    return best;
}

Eigen::VectorXd select_candidate(const Eigen::VectorXd& u_mab, const Eigen::VectorXd& u_rs,
                                 const gp::GpModel& model, const LcbConfig& lcb_cfg) {
    const double mab_value = lcb(model.posterior(u_mab), lcb_cfg);
    const double rs_value = lcb(model.posterior(u_rs), lcb_cfg);
    return rs_value < mab_value ? u_rs : u_mab; // ties go to the bandit sample
}

} // namespace rnnbo::acq
