#include "rnnbo/closed_loop.hpp"

#include "rnnbo/errors.hpp"
#include "rnnbo/io.hpp"

#include <cmath>
#include <fstream>
#include <variant>

namespace rnnbo::loop {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Predicted: return "predicted";
        case Provenance::Transplanted: return "transplanted";
        case Provenance::BoReal: return "bo_real";
        case Provenance::Null: return "null";
    }
    return "unknown";
}

namespace {

std::vector<double> state_features(const epi::EpidemicState& state, double beta) {
    if (std::holds_alternative<epi::SeirState>(state)) {
        const auto& s = std::get<epi::SeirState>(state);
        return {s.S, s.E, s.I, s.R, beta};
    }
    const auto& s = std::get<epi::SisState>(state);
    return {s.S, s.I, beta};
}

PolicyRollout make_rollout(const pipeline::InitialSetting& setting, epi::SimResult sim,
                           const std::string& label, Provenance provenance) {
    PolicyRollout r;
    r.label = label;
    r.provenance = provenance;
    r.sim = std::move(sim);
    r.initial_state = setting.state;
    r.beta = setting.beta;
    return r;
}

} // namespace

PolicyRollout predict_rollout(rnn::RnnModel& model, const pipeline::InitialSetting& setting,
                              const epi::EpidemicParams& p, const epi::NoisePath* path) {
    setting.validate();
    const std::vector<double> probe = state_features(setting.state, setting.beta);
    if (static_cast<int>(probe.size()) != model.input_dim()) {
        throw InputError("predict: checkpoint feature schema does not match the model kind");
    }

    epi::EpidemicParams params = p;
    params.beta = setting.beta;
    const int horizon = params.horizon();
    const bool stochastic = kind_of(setting.state) == epi::ModelKind::Sis;
    if (stochastic && path && static_cast<int>(path->increments.size()) < horizon) {
        throw InputError("predict: noise path shorter than horizon");
    }

    model.reset_state();
    std::vector<epi::ControlPair> controls;
    controls.reserve(horizon);
    epi::EpidemicState state = setting.state;
    for (int i = 0; i < horizon; ++i) {
        const std::vector<double> f = state_features(state, setting.beta);
        const Eigen::Vector2d u =
            model.forward(Eigen::Map<const Eigen::VectorXd>(f.data(), f.size()));
        epi::ControlPair ctrl{u(0), u(1)};
        controls.push_back(ctrl);
        if (std::holds_alternative<epi::SeirState>(state)) {
            state = epi::seir_step(std::get<epi::SeirState>(state), ctrl, params);
        } else {
            const double db = stochastic && path ? path->increments[i] : 0.0;
            state = epi::sis_step(std::get<epi::SisState>(state), ctrl, params, db);
        }
    }

    // Re-simulate once for the cost bookkeeping; identical stepping, same path.
    epi::SimResult sim = epi::simulate(setting.state, controls, params, stochastic ? path : nullptr);
    return make_rollout(setting, std::move(sim), "predicted", Provenance::Predicted);
}

PolicyRollout transplant_rollout(std::span<const epi::ControlPair> controls,
                                 const pipeline::InitialSetting& setting,
                                 const epi::EpidemicParams& p, const std::string& label,
                                 Provenance provenance, const epi::NoisePath* path) {
    setting.validate();
    epi::EpidemicParams params = p;
    params.beta = setting.beta;
    if (static_cast<int>(controls.size()) != params.horizon()) {
        throw InputError("transplant: control sequence does not span the horizon");
    }
    epi::SimResult sim = epi::simulate(setting.state, controls, params, path);
    return make_rollout(setting, std::move(sim), label, provenance);
}

PolicyRollout bo_real_rollout(const pipeline::InitialSetting& setting,
                              const epi::EpidemicParams& p, const bo::BoConfig& bo_cfg,
                              int replications, std::uint64_t seed,
                              const epi::NoisePath* path) {
    const pipeline::WindowedRun run =
        pipeline::run_windowed_bo(setting, p, bo_cfg, replications, seed, path);
    PolicyRollout r = make_rollout(setting, run.applied_trajectory, "bo_real", Provenance::BoReal);
    return r;
}

PolicyRollout null_rollout(const pipeline::InitialSetting& setting, const epi::EpidemicParams& p,
                           const epi::NoisePath* path) {
    setting.validate();
    epi::EpidemicParams params = p;
    params.beta = setting.beta;
    const std::vector<epi::ControlPair> zeros(params.horizon(), epi::ControlPair{0.0, 0.0});
    epi::SimResult sim = epi::simulate(setting.state, zeros, params, path);
    return make_rollout(setting, std::move(sim), "null", Provenance::Null);
}

namespace {

bool same_state(const epi::EpidemicState& a, const epi::EpidemicState& b) {
    if (kind_of(a) != kind_of(b)) return false;
    if (std::holds_alternative<epi::SeirState>(a)) {
        const auto& x = std::get<epi::SeirState>(a);
        const auto& y = std::get<epi::SeirState>(b);
        return x.S == y.S && x.E == y.E && x.I == y.I && x.R == y.R;
    }
    const auto& x = std::get<epi::SisState>(a);
    const auto& y = std::get<epi::SisState>(b);
    return x.S == y.S && x.I == y.I;
}

} // namespace

Comparison compare_policies(const std::vector<PolicyRollout>& rollouts) {
    if (rollouts.empty()) throw InputError("compare: no rollouts");
    const PolicyRollout& first = rollouts.front();
    for (const PolicyRollout& r : rollouts) {
        if (!same_state(r.initial_state, first.initial_state) || r.beta != first.beta ||
            r.sim.rows.size() != first.sim.rows.size()) {
            throw InputError("compare: rollouts do not share the initial setting");
        }
    }

    double null_cost = 0.0;
    bool have_null = false;
    for (const PolicyRollout& r : rollouts) {
        if (r.provenance == Provenance::Null) {
            null_cost = r.total_cost();
            have_null = true;
            break;
        }
    }

    Comparison cmp;
    for (const PolicyRollout& r : rollouts) {
        PolicySummary s;
        s.label = r.label;
        s.provenance = r.provenance;
        s.total_cost = r.total_cost();
        s.final_infected = infected_fraction(r.sim.final_state);
        s.cost_ratio_vs_null = have_null && null_cost != 0.0 ? r.total_cost() / null_cost : 0.0;
        cmp.summaries.push_back(std::move(s));

        for (const epi::TrajectoryRow& row : r.sim.rows) {
            cmp.series.push_back({row.epoch, r.label, row.cum_cost,
                                  infected_fraction(row.state)});
        }
    }
    return cmp;
}

void write_comparison_csv(const Comparison& cmp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "epoch,policy_label,cumulative_cost,I\n";
    for (const Comparison::Row& row : cmp.series) {
        out << row.epoch << ',' << row.label << ',' << io::g17(row.cumulative_cost) << ','
            << io::g17(row.infected) << '\n';
    }
}

void write_summary_csv(const Comparison& cmp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "policy_label,provenance,total_cost,final_I,cost_ratio_vs_null\n";
    for (const PolicySummary& s : cmp.summaries) {
        out << s.label << ',' << to_string(s.provenance) << ',' << io::g17(s.total_cost) << ','
            << io::g17(s.final_infected) << ',' << io::g17(s.cost_ratio_vs_null) << '\n';
    }
}

} // namespace rnnbo::loop
