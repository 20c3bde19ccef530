#pragma once

#include "rnnbo/bo_engine.hpp"
#include "rnnbo/data_pipeline.hpp"
#include "rnnbo/epidemic.hpp"
#include "rnnbo/rnn.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rnnbo {

struct BenchmarkConfig {
    std::vector<std::string> functions; // default: all three
    int dimension = 2;
    int runs = 10;
};

/// Everything one run needs, loadable from a sectioned key=value file.
/// Command-line flags override file values.
struct RunConfig {
    int schema = 1;
    epi::ModelKind model = epi::ModelKind::Seir;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int replications = 8; // SIS objective noise replications

    epi::EpidemicParams epidemic;
    bo::BoConfig bo;
    rnn::RnnConfig rnn;
    pipeline::SettingsPlan settings;
    BenchmarkConfig benchmark;

    void validate() const;

    /// Parses the config file; throws InputError with a line number on bad input.
    static RunConfig load(const std::string& path);
};

} // namespace rnnbo
