#include "rnnbo/bo_engine.hpp"

#include "rnnbo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rnnbo::bo {

void BoConfig::validate() const {
    if (window_dim < 1) throw InputError("bo: window_dim must be >= 1");
    if (channels < 1) throw InputError("bo: channels must be >= 1");
    if (n_init < 1) throw InputError("bo: n_init must be >= 1");
    if (n_iters < 0) throw InputError("bo: n_iters must be >= 0");
    kernel.validate();
    lcb.validate();
    sampler.validate();
    adam.validate();
}

namespace {

struct Incumbent {
    Eigen::VectorXd point;
    double value = std::numeric_limits<double>::infinity();

    void offer(const Eigen::VectorXd& p, double v) {
        if (v < value) {
            value = v;
            point = p;
        }
    }
};

} // namespace

BoResult optimize_window(const ls::Objective& objective, const BoConfig& cfg) {
    cfg.validate();
    const int dim = cfg.dim();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(cfg.sampler.lower, cfg.sampler.upper);

    BoResult result;
    gp::GpDataset data;
    Incumbent incumbent;

    auto evaluate = [&](const Eigen::VectorXd& point) {
        const double value = objective(point);
        ++result.evaluations;
        if (!std::isfinite(value)) {
            throw NumericalError("bo: objective returned a non-finite value");
        }
        data.append(point, value);
        incumbent.offer(point, value);
        return value;
    };

    try {
        Eigen::VectorXd point(dim);
        for (int i = 0; i < cfg.n_init; ++i) {
            for (int k = 0; k < dim; ++k) point(k) = unit(rng);
            evaluate(point);
        }
        result.history.push_back(incumbent.value);

        acq::MabState mab = acq::MabState::init(cfg.sampler);
        for (int it = 0; it < cfg.n_iters; ++it) {
            const gp::GpModel model = gp::GpModel::fit(data, cfg.kernel);

            acq::Candidate u_mab;
            u_mab.lcb_value = std::numeric_limits<double>::infinity();
            for (int round = 0; round < cfg.sampler.mab_rounds; ++round) {
                const acq::Candidate c = acq::mab_round(mab, model, cfg.lcb, rng);
                if (c.lcb_value < u_mab.lcb_value) u_mab = c;
            }
            const acq::Candidate u_rs = acq::random_search(model, cfg.sampler, cfg.lcb, rng);

            const Eigen::VectorXd chosen =
                acq::select_candidate(u_mab.point, u_rs.point, model, cfg.lcb);
            evaluate(chosen);
            result.history.push_back(incumbent.value);
        }

        ls::AdamConfig adam = cfg.adam;
        adam.lower = cfg.sampler.lower;
        adam.upper = cfg.sampler.upper;
        const ls::AdamResult local = ls::adam_descend(objective, incumbent.point, adam);
        result.evaluations += local.evaluations;
        incumbent.offer(local.best_point, local.best_value);
        result.history.push_back(incumbent.value);
    } catch (const std::exception& e) {
        result.error = true;
        result.error_message = e.what();
    }

    result.best_control = incumbent.point;
    result.best_value = incumbent.value;
    return result;
}

BoResult optimize_full(const ls::Objective& objective, const BoConfig& cfg) {
    // The baseline treats the whole horizon as a single window; the config
    // already carries the full dimension, so the pipeline is identical.
    return optimize_window(objective, cfg);
}

} // namespace rnnbo::bo
