#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rnnbo/data_pipeline.hpp"
#include "rnnbo/epidemic.hpp"
#include "rnnbo/errors.hpp"
#include "rnnbo/local_search.hpp"

#include <cmath>

using namespace rnnbo;

TEST_CASE("finite differences on closed forms") {
    SUBCASE("constant function") {
        const auto f = [](const Eigen::VectorXd&) { return 4.2; };
        const Eigen::VectorXd g =
            ls::finite_diff_grad(f, Eigen::VectorXd::Constant(3, 0.5), 1e-4, 0.0, 1.0);
        CHECK(g.isZero(1e-12));
    }

    SUBCASE("sphere gradient at the midpoint") {
        const auto f = [](const Eigen::VectorXd& u) { return u.squaredNorm(); };
        const Eigen::VectorXd g =
            ls::finite_diff_grad(f, Eigen::VectorXd::Constant(4, 0.5), 1e-4, 0.0, 1.0);
        for (int i = 0; i < 4; ++i) CHECK(g(i) == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("one-sided at the bounds") {
        const auto f = [](const Eigen::VectorXd& u) { return u.squaredNorm(); };
        Eigen::VectorXd u(2);
        u << 0.0, 1.0;
        const Eigen::VectorXd g = ls::finite_diff_grad(f, u, 1e-4, 0.0, 1.0);
        CHECK(g(0) == doctest::Approx(0.0).epsilon(1e-3)); // forward difference near 0
        CHECK(g(1) == doctest::Approx(2.0).epsilon(1e-3));
    }
}

TEST_CASE("finite differences match a richer stencil on the windowed objective") {
    epi::EpidemicParams p;
    p.tf = 5;
    const epi::EpidemicState s0 = epi::SeirState{0.5, 0.2, 0.3, 0.0};
    const auto objective = [&](const Eigen::VectorXd& v) {
        return epi::window_objective(s0, pipeline::unpack_controls(v), p);
    };

    Eigen::VectorXd u(10);
    u << 0.41, 0.52, 0.67, 0.30, 0.22, 0.18, 0.73, 0.55, 0.44, 0.61;
    const double h = 1e-4;
    const Eigen::VectorXd g = ls::finite_diff_grad(objective, u, h, 0.0, 1.0);

    // oracle: 5-point stencil (-f2 + 8 f1 - 8 fm1 + fm2) / (12 h)
    for (int i = 0; i < u.size(); ++i) {
        auto probe = [&](double delta) {
            Eigen::VectorXd q = u;
            q(i) += delta;
            return objective(q);
        };
        const double rich =
            (-probe(2 * h) + 8.0 * probe(h) - 8.0 * probe(-h) + probe(-2 * h)) / (12.0 * h);
        CHECK(std::abs(g(i) - rich) / std::max(1.0, std::abs(rich)) < 1e-3);
    }
}

TEST_CASE("adam descends a 1-D quadratic") {
    const auto f = [](const Eigen::VectorXd& u) {
        return (u(0) - 0.3) * (u(0) - 0.3);
    };
    ls::AdamConfig cfg;
    const ls::AdamResult res = ls::adam_descend(f, Eigen::VectorXd::Constant(1, 0.9), cfg);
    CHECK(std::abs(res.best_point(0) - 0.3) < 1e-3);
    CHECK_FALSE(res.non_finite);
    CHECK(res.best_value <= f(Eigen::VectorXd::Constant(1, 0.9)));
}

TEST_CASE("adam respects the box when the minimizer is outside") {
    const auto f = [](const Eigen::VectorXd& u) {
        return (u(0) + 0.5) * (u(0) + 0.5);
    };
    ls::AdamConfig cfg;
    const ls::AdamResult res = ls::adam_descend(f, Eigen::VectorXd::Zero(1), cfg);
    CHECK(res.best_point(0) == 0.0); // projected stationary point at the bound
}

TEST_CASE("adam makes progress on the boxed rosenbrock") {
    const auto f = [](const Eigen::VectorXd& u) {
        const double a = u(1) - u(0) * u(0);
        const double b = 1.0 - u(0);
        return 100.0 * a * a + b * b;
    };
    ls::AdamConfig cfg;
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(2);
    const ls::AdamResult res = ls::adam_descend(f, u0, cfg);
    CHECK(res.best_value < f(u0));
    for (int i = 0; i < 2; ++i) {
        CHECK(res.best_point(i) >= 0.0);
        CHECK(res.best_point(i) <= 1.0);
    }
}

TEST_CASE("adam converges on strictly convex quadratics within budget") {
    ls::AdamConfig cfg; // defaults: 2000 iterations, step 0.01
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd target(3);
        target << 0.2 + 0.1 * trial, 0.7, 0.45;
        const auto f = [&](const Eigen::VectorXd& u) { return (u - target).squaredNorm(); };
        const ls::AdamResult res = ls::adam_descend(f, Eigen::VectorXd::Constant(3, 0.95), cfg);
        CHECK((res.best_point - target).lpNorm<Eigen::Infinity>() < 1e-3);
        CHECK(res.iterations <= 2000);
    }
}

TEST_CASE("non-finite objective sets the warning flag and keeps the best") {
    int calls = 0;
    const auto f = [&](const Eigen::VectorXd& u) {
        ++calls;
        if (calls > 12) return std::numeric_limits<double>::quiet_NaN();
        return u.squaredNorm();
    };
    ls::AdamConfig cfg;
    const ls::AdamResult res = ls::adam_descend(f, Eigen::VectorXd::Constant(2, 0.8), cfg);
    CHECK(res.non_finite);
    CHECK(std::isfinite(res.best_value));
    CHECK(res.best_value <= 2 * 0.8 * 0.8);
}

TEST_CASE("evaluation accounting is exact") {
    long calls = 0;
    const auto f = [&](const Eigen::VectorXd& u) {
        ++calls;
        return (u.array() - 0.5).matrix().squaredNorm();
    };
    ls::AdamConfig cfg;
    cfg.max_iters = 37;
    cfg.tolerance = 0.0; // run the full budget
    const ls::AdamResult res = ls::adam_descend(f, Eigen::VectorXd::Constant(3, 0.9), cfg);
    CHECK(res.evaluations == calls);
    CHECK(res.evaluations == 1 + 37 * (2 * 3 + 1));
}

TEST_CASE("config validation") {
    ls::AdamConfig cfg;
    cfg.beta1 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.fd_step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
}
