// Command-line front end: simulate | optimize | collect | train | predict | benchmark.
// Exit codes: 0 success, 2 config/input error, 3 numerical failure.

#include "rnnbo/benchmarks.hpp"
#include "rnnbo/closed_loop.hpp"
#include "rnnbo/data_pipeline.hpp"
#include "rnnbo/errors.hpp"
#include "rnnbo/io.hpp"
#include "rnnbo/run_config.hpp"
#include "rnnbo/seeding.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace rnnbo;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<long> seed;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--out", opts.out_dir, "output directory (default: config 'out')");
}

RunConfig load_config(const CommonOpts& opts) {
    RunConfig cfg = opts.config_path.empty() ? RunConfig{} : RunConfig::load(opts.config_path);
    if (opts.seed) cfg.seed = static_cast<std::uint64_t>(*opts.seed);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::vector<pipeline::InitialSetting> planned_settings(const RunConfig& cfg) {
    pipeline::SettingsPlan plan = cfg.settings;
    plan.model = cfg.model;
    return pipeline::vary_settings(plan);
}

pipeline::InitialSetting pick_setting(const RunConfig& cfg, const std::string& label) {
    const auto settings = planned_settings(cfg);
    if (label.empty()) return settings.front();
    for (const auto& s : settings) {
        if (s.label == label) return s;
    }
    throw InputError("no setting labeled '" + label + "' in the config");
}

pipeline::InitialSetting parse_inline_setting(const RunConfig& cfg, const std::string& spec) {
    const std::vector<std::string> cells = io::split_csv(spec);
    pipeline::InitialSetting s;
    s.label = "inline";
    if (cfg.model == epi::ModelKind::Seir) {
        if (cells.size() != 5) throw InputError("--state expects S,E,I,R,beta for seir");
        s.state = epi::SeirState{io::parse_double(cells[0], "--state"),
                                 io::parse_double(cells[1], "--state"),
                                 io::parse_double(cells[2], "--state"),
                                 io::parse_double(cells[3], "--state")};
        s.beta = io::parse_double(cells[4], "--state");
    } else {
        if (cells.size() != 3) throw InputError("--state expects S,I,beta for sis");
        s.state = epi::SisState{io::parse_double(cells[0], "--state"),
                                io::parse_double(cells[1], "--state")};
        s.beta = io::parse_double(cells[2], "--state");
    }
    s.validate();
    return s;
}

std::vector<epi::ControlPair> read_controls_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open controls file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "epoch,u1,u2") {
        throw InputError("controls file: expected header 'epoch,u1,u2'");
    }
    std::vector<epi::ControlPair> controls;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = io::split_csv(line);
        const std::string ctx = "controls line " + std::to_string(line_no);
        if (cells.size() != 3) throw InputError(ctx + ": expected 3 columns");
        controls.push_back({io::parse_double(cells[1], ctx), io::parse_double(cells[2], ctx)});
    }
    return controls;
}

void write_controls_csv(std::span<const epi::ControlPair> controls, int t1,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "epoch,u1,u2\n";
    for (std::size_t i = 0; i < controls.size(); ++i) {
        out << t1 + static_cast<int>(i) << ',' << io::g17(controls[i].u1) << ','
            << io::g17(controls[i].u2) << '\n';
    }
}

void write_history_csv(const bo::BoResult& result, int n_init, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "iteration,best_value,evaluations\n";
    for (std::size_t i = 0; i < result.history.size(); ++i) {
        // entry 0: after the initial design; last entry: after local search
        long evals = n_init + static_cast<long>(i);
        if (i + 1 == result.history.size()) evals = result.evaluations;
        out << i << ',' << io::g17(result.history[i]) << ',' << evals << '\n';
    }
}

int cmd_simulate(const RunConfig& cfg, const std::string& setting_label,
                 const std::string& controls_spec) {
    const pipeline::InitialSetting setting = pick_setting(cfg, setting_label);
    epi::EpidemicParams p = cfg.epidemic;
    p.beta = setting.beta;

    std::vector<epi::ControlPair> controls;
    if (controls_spec == "null" || controls_spec.empty()) {
        controls.assign(p.horizon(), {0.0, 0.0});
    } else if (controls_spec.rfind("constant:", 0) == 0) {
        const auto cells = io::split_csv(controls_spec.substr(9));
        if (cells.size() != 2) throw InputError("--controls constant:U1,U2 expects two values");
        controls.assign(p.horizon(), {io::parse_double(cells[0], "--controls"),
                                      io::parse_double(cells[1], "--controls")});
    } else if (controls_spec.rfind("file:", 0) == 0) {
        controls = read_controls_csv(controls_spec.substr(5));
        if (static_cast<int>(controls.size()) != p.horizon()) {
            throw InputError("controls file does not span the horizon");
        }
    } else {
        throw InputError("--controls must be null, constant:U1,U2, or file:PATH");
    }

    epi::NoisePath path;
    const epi::NoisePath* path_ptr = nullptr;
    if (cfg.model == epi::ModelKind::Sis) {
        path = epi::NoisePath::generate(mix_seed(cfg.seed, 0x51), p.horizon(), p.dt);
        path_ptr = &path;
    }
    const epi::SimResult sim = epi::simulate(setting.state, controls, p, path_ptr);
    epi::write_trajectory_csv(sim, (fs::path(cfg.out_dir) / "trajectory.csv").string());
    std::cout << "total_cost " << io::g17(sim.total_cost) << "\n";
    return 0;
}

int cmd_optimize(const RunConfig& cfg, const std::string& setting_label, bool full) {
    const pipeline::InitialSetting setting = pick_setting(cfg, setting_label);
    epi::EpidemicParams p = cfg.epidemic;
    p.beta = setting.beta;

    bo::BoConfig bo_cfg = cfg.bo;
    bo_cfg.channels = 2;
    if (full) bo_cfg.window_dim = p.horizon();
    if (bo_cfg.window_dim > p.horizon()) throw InputError("window_dim exceeds the horizon");
    bo_cfg.seed = mix_seed(cfg.seed, 0x09);

    epi::EpidemicParams pw = p;
    pw.tf = pw.t1 + bo_cfg.window_dim;

    epi::SisNoise crn;
    const bool stochastic = cfg.model == epi::ModelKind::Sis;
    if (stochastic) {
        crn = epi::SisNoise::generate(mix_seed(cfg.seed, 0xc), cfg.replications,
                                      bo_cfg.window_dim, p.dt);
    }
    const auto objective = [&](const Eigen::VectorXd& v) {
        return epi::window_objective(setting.state, pipeline::unpack_controls(v), pw,
                                     stochastic ? &crn : nullptr, cfg.replications);
    };

    const bo::BoResult result = bo::optimize_window(objective, bo_cfg);
    if (result.error) throw NumericalError("optimize failed: " + result.error_message);

    write_history_csv(result, bo_cfg.n_init, (fs::path(cfg.out_dir) / "bo_history.csv").string());
    write_controls_csv(pipeline::unpack_controls(result.best_control), pw.t1,
                       (fs::path(cfg.out_dir) / "optimized_controls.csv").string());
    std::cout << "best_value " << io::g17(result.best_value) << "\n";
    return 0;
}

int cmd_collect(const RunConfig& cfg, bool resume) {
    const auto settings = planned_settings(cfg);
    const std::string out_path = (fs::path(cfg.out_dir) / "dataset.csv").string();

    pipeline::TrainingDataset ds;
    ds.meta.model = cfg.model;
    ds.meta.window_dim = cfg.bo.window_dim;
    ds.meta.horizon = cfg.epidemic.horizon();

    std::vector<std::string> done;
    if (resume && fs::exists(out_path)) {
        const pipeline::TrainingDataset existing = pipeline::load_dataset(out_path);
        if (existing.meta.window_dim == ds.meta.window_dim &&
            existing.meta.horizon == ds.meta.horizon && existing.meta.model == ds.meta.model) {
            for (const std::string& label : existing.labels()) {
                long count = 0;
                for (const auto& pair : existing.pairs) count += pair.label == label ? 1 : 0;
                if (count == ds.pairs_per_setting()) done.push_back(label);
            }
            ds.pairs = existing.pairs;
        }
    }

    for (std::size_t i = 0; i < settings.size(); ++i) {
        const auto& setting = settings[i];
        if (std::find(done.begin(), done.end(), setting.label) != done.end()) {
            std::cerr << "collect: skipping completed label '" << setting.label << "'\n";
            continue;
        }
        epi::EpidemicParams p = cfg.epidemic;
        const auto pairs = pipeline::collect_trajectory(setting, p, cfg.bo, cfg.replications,
                                                        mix_seed(cfg.seed, i));
        ds.pairs.insert(ds.pairs.end(), pairs.begin(), pairs.end());
        std::cerr << "collect: " << setting.label << " -> " << pairs.size() << " pairs\n";
    }

    pipeline::save_dataset(ds, out_path);
    std::cout << "pairs " << ds.pairs.size() << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& dataset_path,
              const std::vector<int>& layers_list, const std::vector<int>& epochs_list,
              const std::string& eval_label) {
    const std::string path =
        dataset_path.empty() ? (fs::path(cfg.out_dir) / "dataset.csv").string() : dataset_path;
    const pipeline::TrainingDataset ds = pipeline::load_dataset(path);
    if (ds.pairs.empty()) throw InputError("train: dataset is empty");

    rnn::RnnConfig base = cfg.rnn;
    base.seed = cfg.seed;
    base.out_lower = cfg.epidemic.u_lower;
    base.out_upper = cfg.epidemic.u_upper;

    const bool sweep = layers_list.size() > 1 || epochs_list.size() > 1;
    if (!sweep) {
        rnn::RnnConfig run_cfg = base;
        if (!layers_list.empty()) run_cfg.num_layers = layers_list.front();
        if (!epochs_list.empty()) run_cfg.epochs = epochs_list.front();
        auto [model, report] = rnn::train(ds, run_cfg);

        rnn::save_model(model, (fs::path(cfg.out_dir) / "rnn_checkpoint.txt").string());
        std::ofstream out((fs::path(cfg.out_dir) / "train_report.csv").string());
        out << "epoch,loss\n";
        for (std::size_t e = 0; e < report.loss_history.size(); ++e) {
            out << e << ',' << io::g17(report.loss_history[e]) << '\n';
        }
        std::cout << "final_loss " << io::g17(report.final_loss) << "\n";
        std::cerr << "train: wall time " << report.wall_time_s << " s\n";
        return 0;
    }

    const std::vector<int> layers = layers_list.empty() ? std::vector<int>{base.num_layers}
                                                        : layers_list;
    const std::vector<int> epochs = epochs_list.empty() ? std::vector<int>{base.epochs}
                                                        : epochs_list;
    int max_epochs = 0;
    for (int e : epochs) max_epochs = std::max(max_epochs, e);

    std::ofstream out((fs::path(cfg.out_dir) / "train_sweep.csv").string());
    out << "layers,epochs,final_loss";
    if (!eval_label.empty()) out << ",rollout_cost";
    for (int e = 0; e < max_epochs; ++e) out << ",loss_epoch_" << e;
    out << '\n';

    for (int layer_count : layers) {
        for (int epoch_count : epochs) {
            rnn::RnnConfig run_cfg = base;
            run_cfg.num_layers = layer_count;
            run_cfg.epochs = epoch_count;
            auto [model, report] = rnn::train(ds, run_cfg);
            out << layer_count << ',' << epoch_count << ',' << io::g17(report.final_loss);
            if (!eval_label.empty()) {
                const pipeline::InitialSetting setting = pick_setting(cfg, eval_label);
                epi::NoisePath path;
                const epi::NoisePath* path_ptr = nullptr;
                if (cfg.model == epi::ModelKind::Sis) {
                    path = epi::NoisePath::generate(mix_seed(cfg.seed, 0x5a),
                                                    cfg.epidemic.horizon(), cfg.epidemic.dt);
                    path_ptr = &path;
                }
                const loop::PolicyRollout roll =
                    loop::predict_rollout(model, setting, cfg.epidemic, path_ptr);
                out << ',' << io::g17(roll.total_cost());
            }
            for (int e = 0; e < max_epochs; ++e) {
                out << ',';
                if (e < static_cast<int>(report.loss_history.size())) {
                    out << io::g17(report.loss_history[e]);
                }
            }
            out << '\n';
        }
    }
    std::cout << "sweep_rows " << layers.size() * epochs.size() << "\n";
    return 0;
}

int cmd_predict(const RunConfig& cfg, const std::string& checkpoint_path,
                const std::string& setting_label, const std::string& inline_state, bool compare) {
    const std::string ckpt = checkpoint_path.empty()
                                 ? (fs::path(cfg.out_dir) / "rnn_checkpoint.txt").string()
                                 : checkpoint_path;
    rnn::RnnModel model = rnn::load_model(ckpt);
    if (model.model_kind() != cfg.model) {
        throw InputError("predict: checkpoint model kind does not match the config");
    }

    const pipeline::InitialSetting target = inline_state.empty()
                                                ? pick_setting(cfg, setting_label)
                                                : parse_inline_setting(cfg, inline_state);

    epi::NoisePath path;
    const epi::NoisePath* path_ptr = nullptr;
    if (cfg.model == epi::ModelKind::Sis) {
        path = epi::NoisePath::generate(mix_seed(cfg.seed, 0x5a), cfg.epidemic.horizon(),
                                        cfg.epidemic.dt);
        path_ptr = &path;
    }

    loop::PolicyRollout predicted = loop::predict_rollout(model, target, cfg.epidemic, path_ptr);
    epi::write_trajectory_csv(predicted.sim,
                              (fs::path(cfg.out_dir) / "predicted_rollout.csv").string());
    std::cout << "predicted_cost " << io::g17(predicted.total_cost()) << "\n";

    if (!compare) return 0;

    std::vector<loop::PolicyRollout> rollouts;
    rollouts.push_back(loop::null_rollout(target, cfg.epidemic, path_ptr));
    rollouts.push_back(std::move(predicted));
    rollouts.push_back(loop::bo_real_rollout(target, cfg.epidemic, cfg.bo, cfg.replications,
                                             mix_seed(cfg.seed, 0xbea1), path_ptr));

    for (const auto& source : planned_settings(cfg)) {
        if (source.label == target.label) continue;
        const pipeline::WindowedRun run =
            pipeline::run_windowed_bo(source, cfg.epidemic, cfg.bo, cfg.replications,
                                      mix_seed(cfg.seed, std::hash<std::string>{}(source.label)));
        rollouts.push_back(loop::transplant_rollout(run.applied_controls, target, cfg.epidemic,
                                                    "transplant_" + source.label,
                                                    loop::Provenance::Transplanted, path_ptr));
    }

    const loop::Comparison cmp = loop::compare_policies(rollouts);
    loop::write_comparison_csv(cmp, (fs::path(cfg.out_dir) / "comparison.csv").string());
    loop::write_summary_csv(cmp, (fs::path(cfg.out_dir) / "comparison_summary.csv").string());
    return 0;
}

int cmd_benchmark(const RunConfig& cfg, const std::vector<std::string>& functions_flag,
                  int dimension_flag, int runs_flag, bool timings) {
    std::vector<std::string> names = functions_flag.empty() ? cfg.benchmark.functions
                                                            : functions_flag;
    if (names.empty()) names = bench::function_names();
    const int dimension = dimension_flag > 0 ? dimension_flag : cfg.benchmark.dimension;
    const int runs = runs_flag > 0 ? runs_flag : cfg.benchmark.runs;

    std::vector<std::uint64_t> seeds(runs);
    for (int r = 0; r < runs; ++r) seeds[r] = mix_seed(cfg.seed, r);

    std::vector<bench::BenchmarkStats> stats;
    for (const std::string& name : names) {
        const bench::SyntheticFunction f = bench::make_function(name, dimension);
        stats.push_back(bench::run_benchmark(f, cfg.bo, runs, seeds));
        std::cerr << "benchmark: " << name << " mean_best " << stats.back().mean_best << " ("
                  << stats.back().mean_seconds << " s/run)\n";
    }
    bench::write_benchmark_csv(stats, (fs::path(cfg.out_dir) / "benchmark.csv").string(),
                               timings);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Windowed Bayesian optimization + recurrent prediction for epidemic control"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* simulate = app.add_subcommand("simulate", "roll the model forward and write a trajectory");
    add_common(simulate, opts);
    std::string controls_spec = "null";
    std::string setting_label;
    simulate->add_option("--controls", controls_spec, "null | constant:U1,U2 | file:PATH");
    simulate->add_option("--setting", setting_label, "setting label (default: first)");

    auto* optimize = app.add_subcommand("optimize", "run one window (or full-horizon) of BO");
    add_common(optimize, opts);
    bool full = false;
    optimize->add_flag("--full", full, "optimize the full horizon as one window");
    optimize->add_option("--setting", setting_label, "setting label (default: first)");

    auto* collect = app.add_subcommand("collect", "sliding-window data collection");
    add_common(collect, opts);
    bool resume = false;
    collect->add_flag("--resume", resume, "skip settings already complete in the output dataset");

    auto* train = app.add_subcommand("train", "train the recurrent predictor");
    add_common(train, opts);
    std::string dataset_path, eval_label;
    std::vector<int> layers_list, epochs_list;
    train->add_option("--dataset", dataset_path, "dataset CSV (default: OUT/dataset.csv)");
    train->add_option("--layers", layers_list, "layer counts (list sweeps)")->delimiter(',');
    train->add_option("--epochs", epochs_list, "epoch counts (list sweeps)")->delimiter(',');
    train->add_option("--eval-setting", eval_label, "evaluate each sweep model on this setting");

    auto* predict = app.add_subcommand("predict", "closed-loop rollout from a checkpoint");
    add_common(predict, opts);
    std::string checkpoint_path, inline_state;
    bool compare = false;
    predict->add_option("--checkpoint", checkpoint_path, "checkpoint (default: OUT/rnn_checkpoint.txt)");
    predict->add_option("--setting", setting_label, "setting label (default: first)");
    predict->add_option("--state", inline_state, "inline setting: S,E,I,R,beta (seir) or S,I,beta (sis)");
    predict->add_flag("--compare", compare, "also run null, fresh-BO, and transplant policies");

    auto* benchmark = app.add_subcommand("benchmark", "synthetic-function suite");
    add_common(benchmark, opts);
    std::vector<std::string> functions_flag;
    int dimension_flag = 0, runs_flag = 0;
    bool timings = false;
    benchmark->add_option("--functions", functions_flag, "subset of functions")->delimiter(',');
    benchmark->add_option("--dimension", dimension_flag, "override dimension");
    benchmark->add_option("--runs", runs_flag, "override run count");
    benchmark->add_flag("--timings", timings, "write wall-clock column (breaks byte determinism)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = load_config(opts);
        if (simulate->parsed()) return cmd_simulate(cfg, setting_label, controls_spec);
        if (optimize->parsed()) return cmd_optimize(cfg, setting_label, full);
        if (collect->parsed()) return cmd_collect(cfg, resume);
        if (train->parsed()) return cmd_train(cfg, dataset_path, layers_list, epochs_list, eval_label);
        if (predict->parsed()) {
            return cmd_predict(cfg, checkpoint_path, setting_label, inline_state, compare);
        }
        if (benchmark->parsed()) {
            return cmd_benchmark(cfg, functions_flag, dimension_flag, runs_flag, timings);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
