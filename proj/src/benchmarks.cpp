#include "rnnbo/benchmarks.hpp"

#include "rnnbo/errors.hpp"
#include "rnnbo/io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

namespace rnnbo::bench {

std::vector<std::string> function_names() {
    return {"rastrigin", "rosenbrock", "styblinski_tang"};
}

SyntheticFunction make_function(const std::string& name, int dimension) {
    if (dimension < 1) throw InputError("benchmark: dimension must be >= 1");
    SyntheticFunction f;
    f.name = name;
    f.dimension = dimension;
    if (name == "rastrigin") {
        f.lower = -5.12;
        f.upper = 5.12;
        f.known_optimum_value = 0.0;
        f.known_optimizer = Eigen::VectorXd::Zero(dimension);
    } else if (name == "rosenbrock") {
        // conventional evaluation box; the sampler needs finite bounds
        f.lower = -2.048;
        f.upper = 2.048;
        f.known_optimum_value = 0.0;
        f.known_optimizer = Eigen::VectorXd::Ones(dimension);
    } else if (name == "styblinski_tang") {
        f.lower = -5.0;
        f.upper = 5.0;
        const double xstar = -2.9035340277711769;   // root of 4x^3 - 32x + 5
        const double per_coord = -39.166165703771412;
        f.known_optimum_value = per_coord * dimension;
        f.known_optimizer = Eigen::VectorXd::Constant(dimension, xstar);
    } else {
        throw InputError("unknown benchmark function: '" + name + "'");
    }
    return f;
}

double eval_function(const SyntheticFunction& f, const Eigen::VectorXd& x) {
    if (x.size() != f.dimension) throw InputError("benchmark: dimension mismatch");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < f.lower || x(i) > f.upper) throw InputError("benchmark: point out of domain");
    }
    using std::numbers::pi;
    if (f.name == "rastrigin") {
        double sum = 10.0 * f.dimension;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            sum += x(i) * x(i) - 10.0 * std::cos(2.0 * pi * x(i));
        }
        return sum;
    }
    if (f.name == "rosenbrock") {
        double sum = 0.0;
        for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
            const double a = x(i + 1) - x(i) * x(i);
            const double b = 1.0 - x(i);
            sum += 100.0 * a * a + b * b;
        }
        return sum;
    }
    if (f.name == "styblinski_tang") {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double x2 = x(i) * x(i);
            sum += x2 * x2 - 16.0 * x2 + 5.0 * x(i);
        }
        return 0.5 * sum;
    }
    throw InputError("unknown benchmark function: '" + f.name + "'");
}

BenchmarkStats run_benchmark(const SyntheticFunction& f, bo::BoConfig cfg, int runs,
                             std::span<const std::uint64_t> seeds) {
    if (runs < 1) throw InputError("benchmark: runs must be >= 1");
    if (static_cast<int>(seeds.size()) < runs) throw InputError("benchmark: not enough seeds");

    cfg.window_dim = f.dimension;
    cfg.channels = 1;

    const double width = f.upper - f.lower;
    const auto objective = [&](const Eigen::VectorXd& u) {
        const Eigen::VectorXd x = (u.array() * width + f.lower).matrix();
        return eval_function(f, x);
    };

    BenchmarkStats stats;
    stats.function = f.name;
    stats.dimension = f.dimension;
    stats.runs = runs;
    stats.run_bests.reserve(runs);

    double eval_sum = 0.0;
    double seconds_sum = 0.0;
    for (int r = 0; r < runs; ++r) {
        bo::BoConfig run_cfg = cfg;
        run_cfg.seed = seeds[r];
        const auto start = std::chrono::steady_clock::now();
        const bo::BoResult result = bo::optimize_full(objective, run_cfg);
        seconds_sum += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (result.error) throw NumericalError("benchmark run failed: " + result.error_message);
        stats.run_bests.push_back(result.best_value);
        eval_sum += static_cast<double>(result.evaluations);
    }

    double mean = 0.0;
    for (double v : stats.run_bests) mean += v;
    mean /= runs;
    double var = 0.0;
    for (double v : stats.run_bests) var += (v - mean) * (v - mean);
    stats.mean_best = mean;
    stats.std_best = runs > 1 ? std::sqrt(var / (runs - 1)) : 0.0;
    stats.mean_evals = eval_sum / runs;
    stats.mean_seconds = seconds_sum / runs;
    return stats;
}

void write_benchmark_csv(std::span<const BenchmarkStats> stats, const std::string& path,
                         bool include_timings) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "function,dimension,runs,mean_best,std_best,mean_evals,mean_seconds\n";
    for (const BenchmarkStats& s : stats) {
        // mean_seconds is zeroed by default so reruns stay byte-identical
        out << s.function << ',' << s.dimension << ',' << s.runs << ',' << io::g17(s.mean_best)
            << ',' << io::g17(s.std_best) << ',' << io::g17(s.mean_evals) << ','
            << io::g17(include_timings ? s.mean_seconds : 0.0) << '\n';
    }
}

} // namespace rnnbo::bench
