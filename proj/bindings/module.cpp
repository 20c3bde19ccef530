// Python bindings for the core operations: GP surrogate, LCB, Adam local
// search, the BO engine, the epidemic steppers/objectives, benchmarks, and the
// recurrent predictor.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rnnbo/benchmarks.hpp"
#include "rnnbo/bo_engine.hpp"
#include "rnnbo/closed_loop.hpp"
#include "rnnbo/data_pipeline.hpp"
#include "rnnbo/epidemic.hpp"
#include "rnnbo/errors.hpp"
#include "rnnbo/gp.hpp"
#include "rnnbo/local_search.hpp"
#include "rnnbo/rnn.hpp"

#include <array>

namespace py = pybind11;
using namespace rnnbo;

namespace {

epi::EpidemicState make_state(epi::ModelKind kind, const std::vector<double>& values) {
    if (kind == epi::ModelKind::Seir) {
        if (values.size() != 4) throw InputError("seir state needs (S, E, I, R)");
        return epi::SeirState{values[0], values[1], values[2], values[3]};
    }
    if (values.size() != 2) throw InputError("sis state needs (S, I)");
    return epi::SisState{values[0], values[1]};
}

std::vector<epi::ControlPair> controls_from_matrix(const Eigen::MatrixXd& m) {
    if (m.cols() != 2) throw InputError("controls must be an (n, 2) array");
    std::vector<epi::ControlPair> out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = {m(i, 0), m(i, 1)};
    return out;
}

py::dict sim_to_dict(const epi::SimResult& sim) {
    const bool seir = sim.rows.empty() || std::holds_alternative<epi::SeirState>(sim.rows.front().state);
    const Eigen::Index n = static_cast<Eigen::Index>(sim.rows.size());
    const Eigen::Index k = seir ? 4 : 2;
    Eigen::MatrixXd states(n + 1, k);
    Eigen::MatrixXd controls(n, 2);
    Eigen::VectorXd inst(n);
    auto fill = [&](Eigen::Index row, const epi::EpidemicState& s) {
        if (seir) {
            const auto& x = std::get<epi::SeirState>(s);
            states.row(row) << x.S, x.E, x.I, x.R;
        } else {
            const auto& x = std::get<epi::SisState>(s);
            states.row(row) << x.S, x.I;
        }
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        fill(i, sim.rows[i].state);
        controls(i, 0) = sim.rows[i].control.u1;
        controls(i, 1) = sim.rows[i].control.u2;
        inst(i) = sim.rows[i].inst_cost;
    }
    fill(n, sim.final_state);

    py::dict out;
    out["states"] = states;
    out["controls"] = controls;
    out["inst_cost"] = inst;
    out["total_cost"] = sim.total_cost;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Windowed Bayesian optimization + recurrent prediction for epidemic control";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalFailure", PyExc_RuntimeError);

    // --- Gaussian process -----------------------------------------------
    m.def(
        "matern52",
        [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, double length_scale) {
            return gp::matern52(a, b, {length_scale, 0.0});
        },
        py::arg("a"), py::arg("b"), py::arg("length_scale") = 0.5);

    py::class_<gp::GpModel>(m, "GpModel")
        .def_static(
            "fit",
            [](const Eigen::MatrixXd& points, const Eigen::VectorXd& targets, double length_scale,
               double jitter) {
                gp::GpDataset ds;
                ds.points = points;
                ds.targets = targets;
                return gp::GpModel::fit(std::move(ds), {length_scale, jitter});
            },
            py::arg("points"), py::arg("targets"), py::arg("length_scale") = 0.5,
            py::arg("jitter") = 1e-8)
        .def(
            "posterior",
            [](const gp::GpModel& model, const Eigen::VectorXd& x) {
                const gp::Posterior p = model.posterior(x);
                return py::make_tuple(p.mean, p.variance);
            },
            py::arg("x"))
        .def_property_readonly("prior_mean", &gp::GpModel::prior_mean)
        .def_property_readonly("effective_jitter", &gp::GpModel::effective_jitter)
        .def_property_readonly("dim", &gp::GpModel::dim);

    m.def(
        "lcb",
        [](double mean, double variance, double k) {
            return acq::lcb({mean, variance}, {k});
        },
        py::arg("mean"), py::arg("variance"), py::arg("k") = 2.0);

    // --- Local search ------------------------------------------------------
    py::class_<ls::AdamResult>(m, "AdamResult")
        .def_readonly("best_point", &ls::AdamResult::best_point)
        .def_readonly("best_value", &ls::AdamResult::best_value)
        .def_readonly("evaluations", &ls::AdamResult::evaluations)
        .def_readonly("non_finite", &ls::AdamResult::non_finite);

    m.def(
        "adam_descend",
        [](const std::function<double(const Eigen::VectorXd&)>& objective,
           const Eigen::VectorXd& x0, double step_size, int max_iters, double fd_step,
           double tolerance, double lower, double upper) {
            ls::AdamConfig cfg;
            cfg.step_size = step_size;
            cfg.max_iters = max_iters;
            cfg.fd_step = fd_step;
            cfg.tolerance = tolerance;
            cfg.lower = lower;
            cfg.upper = upper;
            return ls::adam_descend(objective, x0, cfg);
        },
        py::arg("objective"), py::arg("x0"), py::arg("step_size") = 0.01,
        py::arg("max_iters") = 2000, py::arg("fd_step") = 1e-4, py::arg("tolerance") = 1e-6,
        py::arg("lower") = 0.0, py::arg("upper") = 1.0);

    // --- BO engine -----------------------------------------------------------
    py::class_<bo::BoResult>(m, "BoResult")
        .def_readonly("best_control", &bo::BoResult::best_control)
        .def_readonly("best_value", &bo::BoResult::best_value)
        .def_readonly("history", &bo::BoResult::history)
        .def_readonly("evaluations", &bo::BoResult::evaluations)
        .def_readonly("error", &bo::BoResult::error);

    m.def(
        "optimize",
        [](const std::function<double(const Eigen::VectorXd&)>& objective, int window_dim,
           int channels, int n_init, int n_iters, std::uint64_t seed, double length_scale,
           double lcb_k, int adam_max_iters) {
            bo::BoConfig cfg;
            cfg.window_dim = window_dim;
            cfg.channels = channels;
            cfg.n_init = n_init;
            cfg.n_iters = n_iters;
            cfg.seed = seed;
            cfg.kernel.length_scale = length_scale;
            cfg.lcb.weight_k = lcb_k;
            cfg.adam.max_iters = adam_max_iters;
            return bo::optimize_window(objective, cfg);
        },
        py::arg("objective"), py::arg("window_dim"), py::arg("channels") = 1,
        py::arg("n_init") = 10, py::arg("n_iters") = 50, py::arg("seed") = 0,
        py::arg("length_scale") = 0.5, py::arg("lcb_k") = 2.0, py::arg("adam_max_iters") = 2000);

    // --- Epidemic models -----------------------------------------------------
    py::class_<epi::EpidemicParams>(m, "EpidemicParams")
        .def(py::init<>())
        .def_readwrite("tau", &epi::EpidemicParams::tau)
        .def_readwrite("beta", &epi::EpidemicParams::beta)
        .def_readwrite("alpha", &epi::EpidemicParams::alpha)
        .def_readwrite("gamma", &epi::EpidemicParams::gamma)
        .def_readwrite("sigma", &epi::EpidemicParams::sigma)
        .def_readwrite("c1", &epi::EpidemicParams::c1)
        .def_readwrite("c2", &epi::EpidemicParams::c2)
        .def_readwrite("u_lower", &epi::EpidemicParams::u_lower)
        .def_readwrite("u_upper", &epi::EpidemicParams::u_upper)
        .def_readwrite("t1", &epi::EpidemicParams::t1)
        .def_readwrite("tf", &epi::EpidemicParams::tf)
        .def_readwrite("dt", &epi::EpidemicParams::dt)
        .def_readwrite("cost", &epi::EpidemicParams::cost);

    m.def(
        "seir_step",
        [](const std::vector<double>& state, std::pair<double, double> ctrl,
           const epi::EpidemicParams& p) {
            const auto s = std::get<epi::SeirState>(make_state(epi::ModelKind::Seir, state));
            const epi::SeirState next = epi::seir_step(s, {ctrl.first, ctrl.second}, p);
            return py::make_tuple(next.S, next.E, next.I, next.R);
        },
        py::arg("state"), py::arg("control"), py::arg("params"));

    m.def(
        "sis_step",
        [](const std::vector<double>& state, std::pair<double, double> ctrl,
           const epi::EpidemicParams& p, double dB) {
            const auto s = std::get<epi::SisState>(make_state(epi::ModelKind::Sis, state));
            const epi::SisState next = epi::sis_step(s, {ctrl.first, ctrl.second}, p, dB);
            return py::make_tuple(next.S, next.I);
        },
        py::arg("state"), py::arg("control"), py::arg("params"), py::arg("dB"));

    m.def(
        "control_cost",
        [](double u1, double u2, int epoch, const std::string& name) {
            return epi::control_cost({u1, u2}, epoch, name);
        },
        py::arg("u1"), py::arg("u2"), py::arg("epoch") = 0, py::arg("name") = "ripple");

    m.def(
        "simulate_seir",
        [](const std::vector<double>& state, const Eigen::MatrixXd& controls,
           const epi::EpidemicParams& p) {
            return sim_to_dict(epi::simulate(make_state(epi::ModelKind::Seir, state),
                                             controls_from_matrix(controls), p));
        },
        py::arg("state"), py::arg("controls"), py::arg("params"));

    m.def(
        "simulate_sis",
        [](const std::vector<double>& state, const Eigen::MatrixXd& controls,
           const epi::EpidemicParams& p, std::uint64_t seed) {
            const auto ctrl = controls_from_matrix(controls);
            const epi::NoisePath path =
                epi::NoisePath::generate(seed, static_cast<int>(ctrl.size()), p.dt);
            return sim_to_dict(epi::simulate(make_state(epi::ModelKind::Sis, state), ctrl, p, &path));
        },
        py::arg("state"), py::arg("controls"), py::arg("params"), py::arg("seed") = 0);

    m.def(
        "window_objective_seir",
        [](const std::vector<double>& state, const Eigen::MatrixXd& controls,
           const epi::EpidemicParams& p) {
            return epi::window_objective(make_state(epi::ModelKind::Seir, state),
                                         controls_from_matrix(controls), p);
        },
        py::arg("state"), py::arg("controls"), py::arg("params"));

    m.def(
        "window_objective_sis",
        [](const std::vector<double>& state, const Eigen::MatrixXd& controls,
           const epi::EpidemicParams& p, int replications, std::uint64_t seed) {
            return epi::window_objective(make_state(epi::ModelKind::Sis, state),
                                         controls_from_matrix(controls), p, nullptr, replications,
                                         seed);
        },
        py::arg("state"), py::arg("controls"), py::arg("params"), py::arg("replications") = 8,
        py::arg("seed") = 0);

    // --- Benchmarks -----------------------------------------------------------
    m.def(
        "eval_benchmark",
        [](const std::string& name, const Eigen::VectorXd& x) {
            return bench::eval_function(bench::make_function(name, static_cast<int>(x.size())), x);
        },
        py::arg("name"), py::arg("x"));

    // --- Recurrent predictor ---------------------------------------------------
    py::class_<rnn::RnnModel>(m, "RnnModel")
        .def_static("load", &rnn::load_model, py::arg("path"))
        .def("save", [](const rnn::RnnModel& model, const std::string& path) {
            rnn::save_model(model, path);
        })
        .def("reset_state", &rnn::RnnModel::reset_state)
        .def(
            "forward",
            [](rnn::RnnModel& model, const Eigen::VectorXd& features) {
                const Eigen::Vector2d u = model.forward(features);
                return py::make_tuple(u(0), u(1));
            },
            py::arg("features"))
        .def_property_readonly("input_dim", &rnn::RnnModel::input_dim)
        .def_property_readonly("model_kind", [](const rnn::RnnModel& model) {
            return epi::to_string(model.model_kind());
        });

    m.def(
        "train_rnn",
        [](const std::string& dataset_csv, const std::string& checkpoint_out, int num_layers,
           int hidden_size, double dropout, const std::string& activation, int epochs,
           int batch_size, double learning_rate, std::uint64_t seed) {
            const pipeline::TrainingDataset ds = pipeline::load_dataset(dataset_csv);
            rnn::RnnConfig cfg;
            cfg.num_layers = num_layers;
            cfg.hidden_size = hidden_size;
            cfg.dropout_rate = dropout;
            cfg.activation = activation;
            cfg.epochs = epochs;
            cfg.batch_size = batch_size;
            cfg.learning_rate = learning_rate;
            cfg.seed = seed;
            auto [model, report] = rnn::train(ds, cfg);
            if (!checkpoint_out.empty()) rnn::save_model(model, checkpoint_out);
            return report.loss_history;
        },
        py::arg("dataset_csv"), py::arg("checkpoint_out") = "", py::arg("num_layers") = 4,
        py::arg("hidden_size") = 32, py::arg("dropout") = 0.2, py::arg("activation") = "relu",
        py::arg("epochs") = 12, py::arg("batch_size") = 8, py::arg("learning_rate") = 1e-3,
        py::arg("seed") = 0);

    m.def(
        "predict_rollout",
        [](rnn::RnnModel& model, const std::vector<double>& state, double beta,
           const epi::EpidemicParams& p, std::uint64_t seed) {
            pipeline::InitialSetting setting;
            setting.label = "python";
            setting.state = make_state(model.model_kind(), state);
            setting.beta = beta;
            epi::NoisePath path;
            const epi::NoisePath* path_ptr = nullptr;
            if (model.model_kind() == epi::ModelKind::Sis) {
                path = epi::NoisePath::generate(seed, p.horizon(), p.dt);
                path_ptr = &path;
            }
            const loop::PolicyRollout roll = loop::predict_rollout(model, setting, p, path_ptr);
            return sim_to_dict(roll.sim);
        },
        py::arg("model"), py::arg("state"), py::arg("beta"), py::arg("params"),
        py::arg("seed") = 0);
}
