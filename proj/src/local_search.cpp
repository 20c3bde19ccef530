#include "rnnbo/local_search.hpp"

#include "rnnbo/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rnnbo::ls {

void AdamConfig::validate() const {
    if (!(step_size > 0.0)) throw InputError("adam: step_size must be > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw InputError("adam: beta1, beta2 must lie in (0,1)");
    }
    if (!(epsilon > 0.0)) throw InputError("adam: epsilon must be > 0");
    if (max_iters < 1) throw InputError("adam: max_iters must be >= 1");
    if (!(fd_step > 0.0)) throw InputError("adam: fd_step must be > 0");
    if (tolerance < 0.0) throw InputError("adam: tolerance must be >= 0");
    if (!(lower < upper)) throw InputError("adam: lower must be < upper");
}

Eigen::VectorXd finite_diff_grad(const Objective& objective, const Eigen::VectorXd& u,
                                 double fd_step, double lower, double upper) {
    const Eigen::Index n = u.size();
    Eigen::VectorXd grad(n);
    Eigen::VectorXd probe = u;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = u(i);
        const double up = std::min(xi + fd_step, upper);
        const double down = std::max(xi - fd_step, lower);
        probe(i) = up;
        const double f_up = objective(probe);
        probe(i) = down;
        const double f_down = objective(probe);
        probe(i) = xi;
        grad(i) = (f_up - f_down) / (up - down);
    }
    return grad;
}

AdamResult adam_descend(const Objective& objective, const Eigen::VectorXd& u0,
                        const AdamConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = u0.size();

    AdamResult result;
    result.best_point = u0.cwiseMax(cfg.lower).cwiseMin(cfg.upper);
    result.best_value = objective(result.best_point);
    result.evaluations = 1;
    if (!std::isfinite(result.best_value)) {
        result.non_finite = true;
        return result;
    }

    Eigen::VectorXd x = result.best_point;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);

    long fd_evals = 0;
    auto counted = [&](const Eigen::VectorXd& p) {
        ++fd_evals;
        return objective(p);
    };

    for (int t = 1; t <= cfg.max_iters; ++t) {
        Eigen::VectorXd grad = finite_diff_grad(counted, x, cfg.fd_step, cfg.lower, cfg.upper);
        if (!grad.allFinite()) {
            result.non_finite = true;
            break;
        }
        if (grad.lpNorm<Eigen::Infinity>() < cfg.tolerance) {
            result.iterations = t - 1;
            break;
        }

        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad).eval();
        const double m_corr = 1.0 - std::pow(cfg.beta1, t);
        const double v_corr = 1.0 - std::pow(cfg.beta2, t);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double m_hat = m(i) / m_corr;
            const double v_hat = v(i) / v_corr;
            x(i) -= cfg.step_size * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
        x = x.cwiseMax(cfg.lower).cwiseMin(cfg.upper).eval();

        const double value = objective(x);
        ++result.evaluations;
        result.iterations = t;
        if (!std::isfinite(value)) {
            result.non_finite = true;
            break;
        }
        if (value < result.best_value) {
            result.best_value = value;
            result.best_point = x;
        }
    }

    result.evaluations += fd_evals;
    return result;
}

} // namespace rnnbo::ls
