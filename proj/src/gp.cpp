#include "rnnbo/gp.hpp"

#include "rnnbo/errors.hpp"

#include <cmath>
#include <string>

namespace rnnbo::gp {

void KernelConfig::validate() const {
    if (!(length_scale > 0.0)) throw InputError("kernel: length_scale must be > 0");
    if (jitter < 0.0) throw InputError("kernel: jitter must be >= 0");
}

void GpDataset::append(const Eigen::VectorXd& point, double target) {
    if (points.rows() > 0 && point.size() != points.cols()) {
        throw InputError("dataset: point dimension mismatch");
    }
    if (points.rows() == 0 && points.cols() != point.size()) {
        points.resize(0, point.size());
    }
    points.conservativeResize(points.rows() + 1, Eigen::NoChange);
    points.row(points.rows() - 1) = point.transpose();
    targets.conservativeResize(targets.size() + 1);
    targets(targets.size() - 1) = target;
}

void GpDataset::validate() const {
    if (points.rows() != targets.size()) throw InputError("dataset: |points| != |targets|");
    if (points.rows() == 0) throw InputError("dataset: empty");
}

double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelConfig& cfg) {
    cfg.validate();
    if (a.size() != b.size()) throw InputError("matern52: dimension mismatch");
    const double r = (a - b).norm();
    const double z = std::sqrt(5.0) * r / cfg.length_scale;
    return (1.0 + z + z * z / 3.0) * std::exp(-z);
}

int cholesky_lower(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = a(j, j) - a.row(j).head(j).squaredNorm();
        if (!(d > 0.0) || !std::isfinite(d)) return static_cast<int>(j);
        d = std::sqrt(d);
        a(j, j) = d;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            a(i, j) = (a(i, j) - a.row(i).head(j).dot(a.row(j).head(j))) / d;
        }
    }
    // zero the strict upper triangle so L is usable as a full matrix
    a.triangularView<Eigen::StrictlyUpper>().setZero();
    return -1;
}

GpModel GpModel::fit(GpDataset dataset, const KernelConfig& cfg) {
    cfg.validate();
    dataset.validate();
    const int n = dataset.size();

    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i) {
        k(i, i) = 1.0; // matern52(u, u) = 1
        for (int j = 0; j < i; ++j) {
            const double v = matern52(dataset.points.row(i), dataset.points.row(j), cfg);
            k(i, j) = v;
            k(j, i) = v;
        }
    }

    // Escalate jitter on factorization failure: configured value doubled up to
    // six times before giving up.
    double jitter = cfg.jitter;
    int pivot = -1;
    Eigen::MatrixXd chol;
    for (int attempt = 0; attempt <= 6; ++attempt) {
        chol = k;
        chol.diagonal().array() += jitter;
        pivot = cholesky_lower(chol);
        if (pivot < 0) break;
        jitter *= 2.0;
    }
    if (pivot >= 0) {
        throw NumericalError("gp fit: kernel matrix not positive definite at pivot " +
                                 std::to_string(pivot),
                             pivot);
    }

    GpModel model;
    model.prior_mean_ = dataset.targets.mean();
    Eigen::VectorXd centered = dataset.targets.array() - model.prior_mean_;
    // alpha = (K + jitter I)^{-1} (y - m) via two triangular solves
    Eigen::VectorXd alpha = chol.triangularView<Eigen::Lower>().solve(centered);
    chol.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha);

    model.dataset_ = std::move(dataset);
    model.kernel_ = cfg;
    model.chol_ = std::move(chol);
    model.alpha_ = std::move(alpha);
    model.effective_jitter_ = jitter;
    return model;
}

Posterior GpModel::posterior(const Eigen::VectorXd& u_new) const {
    if (u_new.size() != dataset_.dim()) throw InputError("posterior: dimension mismatch");
    const int n = dataset_.size();
    Eigen::VectorXd kvec(n);
    for (int i = 0; i < n; ++i) {
        kvec(i) = matern52(u_new, dataset_.points.row(i), kernel_);
    }
    Posterior post;
    post.mean = prior_mean_ + kvec.dot(alpha_);
    const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(kvec);
    post.variance = std::max(0.0, 1.0 - v.squaredNorm()); // k(u,u) = 1
    return post;
}

} // namespace rnnbo::gp
