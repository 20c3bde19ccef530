#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace rnnbo::gp {

struct KernelConfig {
    double length_scale = 0.5;
    double jitter = 1e-8;

    void validate() const;
};

/// Training inputs (rows of `points`) and their objective values.
struct GpDataset {
    Eigen::MatrixXd points;  // n x d, each coordinate in [lower, upper]
    Eigen::VectorXd targets; // n

    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }

    void append(const Eigen::VectorXd& point, double target);
    void validate() const;
};

struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
};

double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelConfig& cfg);

/// Immutable after fit(); posterior queries are pure and thread-safe.
class GpModel {
public:
    static GpModel fit(GpDataset dataset, const KernelConfig& cfg);

    Posterior posterior(const Eigen::VectorXd& u_new) const;

    const GpDataset& dataset() const { return dataset_; }
    const KernelConfig& kernel() const { return kernel_; }
    const Eigen::MatrixXd& factor() const { return chol_; }
    double prior_mean() const { return prior_mean_; }
    // Jitter actually used; fit() doubles the configured value on factorization failure.
    double effective_jitter() const { return effective_jitter_; }
    int dim() const { return dataset_.dim(); }

private:
    GpModel() = default;

    GpDataset dataset_;
    KernelConfig kernel_;
    Eigen::MatrixXd chol_;  // lower-triangular L with L L^T = K + jitter I
    Eigen::VectorXd alpha_; // (K + jitter I)^{-1} (targets - prior_mean)
    double prior_mean_ = 0.0;
    double effective_jitter_ = 0.0;
};

// In-place lower Cholesky; returns the failing pivot index, or -1 on success.
int cholesky_lower(Eigen::MatrixXd& a);

} // namespace rnnbo::gp
