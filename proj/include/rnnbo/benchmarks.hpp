#pragma once

#include "rnnbo/bo_engine.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rnnbo::bench {

struct SyntheticFunction {
    std::string name;
    int dimension = 2;
    double lower = -1.0; // same interval per coordinate
    double upper = 1.0;
    double known_optimum_value = 0.0;
    Eigen::VectorXd known_optimizer;
};

/// name: rastrigin | rosenbrock | styblinski_tang. Rosenbrock uses the
/// conventional [-2.048, 2.048] box; the sampler needs finite bounds.
SyntheticFunction make_function(const std::string& name, int dimension);

std::vector<std::string> function_names();

double eval_function(const SyntheticFunction& f, const Eigen::VectorXd& x);

struct BenchmarkStats {
    std::string function;
    int dimension = 0;
    int runs = 0;
    double mean_best = 0.0;
    double std_best = 0.0;
    double mean_evals = 0.0;
    double mean_seconds = 0.0;
    std::vector<double> run_bests;
};

/// Runs optimize_full once per seed (the unit box mapped onto the function's
/// domain) and aggregates.
BenchmarkStats run_benchmark(const SyntheticFunction& f, bo::BoConfig cfg, int runs,
                             std::span<const std::uint64_t> seeds);

void write_benchmark_csv(std::span<const BenchmarkStats> stats, const std::string& path,
                         bool include_timings = false);

} // namespace rnnbo::bench
