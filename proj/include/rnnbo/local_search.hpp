#pragma once

#include <Eigen/Dense>

#include <functional>

namespace rnnbo::ls {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct AdamConfig {
    double step_size = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_iters = 2000;
    double fd_step = 1e-4;
    double tolerance = 1e-6; // stop when gradient inf-norm drops below
    double lower = 0.0;
    double upper = 1.0;

    void validate() const;
};

/// Central differences per coordinate, switching to one-sided at the box bounds.
Eigen::VectorXd finite_diff_grad(const Objective& objective, const Eigen::VectorXd& u,
                                 double fd_step, double lower, double upper);

struct AdamResult {
    Eigen::VectorXd best_point;
    double best_value = 0.0;
    long evaluations = 0;    // objective calls consumed, finite-difference probes included
    int iterations = 0;
    bool non_finite = false; // objective went non-finite; best seen so far returned
};

/// Adam with bias-corrected moments and coordinatewise projection to the box.
/// The reported best never exceeds objective(u0).
AdamResult adam_descend(const Objective& objective, const Eigen::VectorXd& u0,
                        const AdamConfig& cfg);

} // namespace rnnbo::ls
