#include "rnnbo/data_pipeline.hpp"

#include "rnnbo/errors.hpp"
#include "rnnbo/io.hpp"
#include "rnnbo/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace rnnbo::pipeline {

void InitialSetting::validate() const {
    if (label.empty()) throw InputError("setting: empty label");
    if (!(beta > 0.0)) throw InputError("setting: beta must be > 0");
    std::visit([](const auto& s) { s.validate(); }, state);
}

std::vector<double> TrainingPair::features() const {
    if (std::holds_alternative<epi::SeirState>(state)) {
        const auto& s = std::get<epi::SeirState>(state);
        return {s.S, s.E, s.I, s.R, beta};
    }
    const auto& s = std::get<epi::SisState>(state);
    return {s.S, s.I, beta};
}

std::vector<std::string> TrainingDataset::labels() const {
    std::vector<std::string> out;
    for (const TrainingPair& pair : pairs) {
        if (std::find(out.begin(), out.end(), pair.label) == out.end()) out.push_back(pair.label);
    }
    return out;
}

std::vector<epi::ControlPair> unpack_controls(const Eigen::VectorXd& v) {
    if (v.size() % 2 != 0) throw InputError("control vector length must be even");
    const int d = static_cast<int>(v.size()) / 2;
    std::vector<epi::ControlPair> controls(d);
    for (int j = 0; j < d; ++j) {
        controls[j].u1 = v(j);
        controls[j].u2 = v(d + j);
    }
    return controls;
}

Eigen::VectorXd pack_controls(std::span<const epi::ControlPair> controls) {
    const int d = static_cast<int>(controls.size());
    Eigen::VectorXd v(2 * d);
    for (int j = 0; j < d; ++j) {
        v(j) = controls[j].u1;
        v(d + j) = controls[j].u2;
    }
    return v;
}

WindowedRun run_windowed_bo(const InitialSetting& setting, const epi::EpidemicParams& p,
                            const bo::BoConfig& bo_cfg, int replications, std::uint64_t seed,
                            const epi::NoisePath* world_path) {
    setting.validate();
    p.validate();
    const int horizon = p.horizon();
    const int d = bo_cfg.window_dim;
    if (d < 1 || d > horizon) throw InputError("window_dim must lie in [1, horizon]");
    const bool stochastic = kind_of(setting.state) == epi::ModelKind::Sis;

    epi::NoisePath generated_world;
    if (stochastic && !world_path) {
        generated_world = epi::NoisePath::generate(mix_seed(seed, 0xb0), horizon, p.dt);
        world_path = &generated_world;
    }
    if (stochastic && static_cast<int>(world_path->increments.size()) < horizon) {
        throw InputError("world noise path shorter than horizon");
    }

    WindowedRun run;
    const int num_windows = horizon - d + 1;
    run.pairs.reserve(static_cast<std::size_t>(num_windows) * d);
    run.applied_controls.reserve(horizon);
    run.window_results.reserve(num_windows);

    epi::EpidemicState state = setting.state;
    for (int w = 0; w < num_windows; ++w) {
        epi::EpidemicParams pw = p;
        pw.beta = setting.beta;
        pw.t1 = p.t1 + w;
        pw.tf = pw.t1 + d;

        // Objective noise: per-window common random numbers, so every candidate
        // control in this window sees identical paths.
        epi::SisNoise crn;
        if (stochastic) crn = epi::SisNoise::generate(mix_seed(seed, w), replications, d, p.dt);

        const epi::EpidemicState window_start = state;
        const auto objective = [&](const Eigen::VectorXd& v) {
            const std::vector<epi::ControlPair> controls = unpack_controls(v);
            return epi::window_objective(window_start, controls, pw,
                                          stochastic ? &crn : nullptr, replications);
        };

        bo::BoConfig cfg = bo_cfg;
        cfg.seed = mix_seed(seed, 0x10000 + static_cast<std::uint64_t>(w));
        bo::BoResult result = bo::optimize_window(objective, cfg);
        if (result.error) {
            throw NumericalError("windowed bo failed in window " + std::to_string(w) + ": " +
                                 result.error_message);
        }

        const std::vector<epi::ControlPair> controls = unpack_controls(result.best_control);

        // The realized d-epoch trajectory under the window's optimal control;
        // its state at t_{w+1} seeds the next window.
        epi::NoisePath segment;
        const epi::NoisePath* segment_ptr = nullptr;
        if (stochastic) {
            segment.increments.assign(world_path->increments.begin() + w,
                                      world_path->increments.begin() + w + d);
            segment_ptr = &segment;
        }
        const epi::SimResult window_sim = epi::simulate(window_start, controls, pw, segment_ptr);

        for (int j = 0; j < d; ++j) {
            TrainingPair pair;
            pair.label = setting.label;
            pair.window = w;
            pair.epoch = pw.t1 + j;
            pair.state = window_sim.rows[j].state;
            pair.beta = setting.beta;
            pair.u1 = controls[j].u1;
            pair.u2 = controls[j].u2;
            run.pairs.push_back(std::move(pair));
        }

        if (w < num_windows - 1) {
            run.applied_controls.push_back(controls.front());
            state = window_sim.rows.size() > 1 ? window_sim.rows[1].state : window_sim.final_state;
        } else {
            run.applied_controls.insert(run.applied_controls.end(), controls.begin(),
                                        controls.end());
        }
        run.window_results.push_back(std::move(result));
    }

    epi::EpidemicParams pfull = p;
    pfull.beta = setting.beta;
    run.applied_trajectory = epi::simulate(setting.state, run.applied_controls, pfull,
                                           stochastic ? world_path : nullptr);
    return run;
}

std::vector<TrainingPair> collect_trajectory(const InitialSetting& setting,
                                             const epi::EpidemicParams& p,
                                             const bo::BoConfig& bo_cfg, int replications,
                                             std::uint64_t seed) {
    return run_windowed_bo(setting, p, bo_cfg, replications, seed).pairs;
}

std::vector<InitialSetting> vary_settings(const SettingsPlan& plan) {
    if (!plan.explicit_list.empty()) {
        for (const InitialSetting& s : plan.explicit_list) s.validate();
        return plan.explicit_list;
    }
    if (plan.random_count < 1) throw InputError("settings plan: empty");
    if (plan.betas.empty()) throw InputError("settings plan: no beta values");

    std::mt19937_64 rng(plan.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::uniform_int_distribution<std::size_t> beta_pick(0, plan.betas.size() - 1);

    std::vector<InitialSetting> out;
    out.reserve(plan.random_count);
    for (int i = 0; i < plan.random_count; ++i) {
        InitialSetting s;
        s.label = "rand" + std::to_string(i);
        s.beta = plan.betas[beta_pick(rng)];
        if (plan.model == epi::ModelKind::Seir) {
            // Dirichlet(1,1,1) over (S, E, I); R starts at 0.
            double a = expo(rng), b = expo(rng), c = expo(rng);
            const double sum = a + b + c;
            s.state = epi::SeirState{a / sum, b / sum, c / sum, 0.0};
        } else {
            const double share = unit(rng);
            s.state = epi::SisState{share, 1.0 - share};
        }
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

std::string header_value(const std::string& line, const std::string& key, int line_no) {
    const std::string prefix = "#" + key + "=";
    if (line.rfind(prefix, 0) != 0) {
        throw InputError("dataset line " + std::to_string(line_no) + ": expected " + prefix +
                         "...");
    }
    return line.substr(prefix.size());
}

} // namespace

void save_dataset(const TrainingDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "#schema=" << ds.meta.schema << '\n';
    out << "#model=" << epi::to_string(ds.meta.model) << '\n';
    out << "#d=" << ds.meta.window_dim << '\n';
    out << "#horizon=" << ds.meta.horizon << '\n';
    out << "label,window,epoch,S,E,I,R,beta,u1,u2\n";
    for (const TrainingPair& pair : ds.pairs) {
        out << pair.label << ',' << pair.window << ',' << pair.epoch << ',';
        if (std::holds_alternative<epi::SeirState>(pair.state)) {
            const auto& s = std::get<epi::SeirState>(pair.state);
            out << io::g17(s.S) << ',' << io::g17(s.E) << ',' << io::g17(s.I) << ','
                << io::g17(s.R) << ',';
        } else {
            const auto& s = std::get<epi::SisState>(pair.state);
            out << io::g17(s.S) << ",," << io::g17(s.I) << ",,";
        }
        out << io::g17(pair.beta) << ',' << io::g17(pair.u1) << ',' << io::g17(pair.u2) << '\n';
    }
}

TrainingDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset: " + path);

    TrainingDataset ds;
    std::string line;
    int line_no = 0;

    auto next_line = [&]() {
        if (!std::getline(in, line)) {
            throw InputError("dataset line " + std::to_string(line_no + 1) + ": unexpected EOF");
        }
        ++line_no;
    };

    next_line();
    ds.meta.schema = static_cast<int>(io::parse_long(header_value(line, "schema", line_no),
                                                     "dataset line " + std::to_string(line_no)));
    if (ds.meta.schema != 1) {
        throw InputError("dataset line 1: unsupported schema version " +
                         std::to_string(ds.meta.schema));
    }
    next_line();
    ds.meta.model = epi::model_kind_from_string(header_value(line, "model", line_no));
    next_line();
    ds.meta.window_dim = static_cast<int>(io::parse_long(header_value(line, "d", line_no),
                                                         "dataset line " + std::to_string(line_no)));
    next_line();
    ds.meta.horizon = static_cast<int>(io::parse_long(header_value(line, "horizon", line_no),
                                                      "dataset line " + std::to_string(line_no)));
    next_line();
    if (line != "label,window,epoch,S,E,I,R,beta,u1,u2") {
        throw InputError("dataset line " + std::to_string(line_no) + ": bad column header");
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = io::split_csv(line);
        const std::string ctx = "dataset line " + std::to_string(line_no);
        if (cells.size() != 10) throw InputError(ctx + ": expected 10 columns");

        TrainingPair pair;
        pair.label = cells[0];
        pair.window = static_cast<int>(io::parse_long(cells[1], ctx));
        pair.epoch = static_cast<int>(io::parse_long(cells[2], ctx));
        if (ds.meta.model == epi::ModelKind::Seir) {
            epi::SeirState s;
            s.S = io::parse_double(cells[3], ctx);
            s.E = io::parse_double(cells[4], ctx);
            s.I = io::parse_double(cells[5], ctx);
            s.R = io::parse_double(cells[6], ctx);
            pair.state = s;
        } else {
            if (!cells[4].empty() || !cells[6].empty()) {
                throw InputError(ctx + ": E and R must be empty for sis");
            }
            epi::SisState s;
            s.S = io::parse_double(cells[3], ctx);
            s.I = io::parse_double(cells[5], ctx);
            pair.state = s;
        }
        pair.beta = io::parse_double(cells[7], ctx);
        pair.u1 = io::parse_double(cells[8], ctx);
        pair.u2 = io::parse_double(cells[9], ctx);
        ds.pairs.push_back(std::move(pair));
    }
    return ds;
}

} // namespace rnnbo::pipeline
