#pragma once

#include "rnnbo/data_pipeline.hpp"
#include "rnnbo/epidemic.hpp"
#include "rnnbo/rnn.hpp"

#include <span>
#include <string>
#include <vector>

namespace rnnbo::loop {

enum class Provenance { Predicted, Transplanted, BoReal, Null };

std::string to_string(Provenance p);

struct PolicyRollout {
    std::string label;
    Provenance provenance = Provenance::Null;
    epi::SimResult sim;
    // Identity of the evaluated setting, for compare_policies consistency checks.
    epi::EpidemicState initial_state;
    double beta = 0.0;

    double total_cost() const { return sim.total_cost; }
};

/// Closed-loop rollout: predict the control from the current state features,
/// apply it, step the dynamics; repeat over the full horizon.
PolicyRollout predict_rollout(rnn::RnnModel& model, const pipeline::InitialSetting& setting,
                              const epi::EpidemicParams& p,
                              const epi::NoisePath* path = nullptr);

/// Applies a foreign fixed control sequence to a (possibly different) setting.
PolicyRollout transplant_rollout(std::span<const epi::ControlPair> controls,
                                 const pipeline::InitialSetting& setting,
                                 const epi::EpidemicParams& p, const std::string& label,
                                 Provenance provenance = Provenance::Transplanted,
                                 const epi::NoisePath* path = nullptr);

/// Fresh windowed-BO control for this setting, applied over the horizon.
PolicyRollout bo_real_rollout(const pipeline::InitialSetting& setting,
                              const epi::EpidemicParams& p, const bo::BoConfig& bo_cfg,
                              int replications, std::uint64_t seed,
                              const epi::NoisePath* path = nullptr);

PolicyRollout null_rollout(const pipeline::InitialSetting& setting, const epi::EpidemicParams& p,
                           const epi::NoisePath* path = nullptr);

struct PolicySummary {
    std::string label;
    Provenance provenance = Provenance::Null;
    double total_cost = 0.0;
    double final_infected = 0.0;
    double cost_ratio_vs_null = 0.0; // 0 when no null rollout is present
};

struct Comparison {
    std::vector<PolicySummary> summaries;
    // series rows: (epoch, policy label, cumulative cost, I)
    struct Row {
        int epoch;
        std::string label;
        double cumulative_cost;
        double infected;
    };
    std::vector<Row> series;
};

/// All rollouts must share the initial setting and horizon.
Comparison compare_policies(const std::vector<PolicyRollout>& rollouts);

void write_comparison_csv(const Comparison& cmp, const std::string& path);
void write_summary_csv(const Comparison& cmp, const std::string& path);

} // namespace rnnbo::loop
