#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rnnbo/errors.hpp"
#include "rnnbo/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <string>

using namespace rnnbo;

namespace {

const char* kFullConfig = R"(# example run configuration
schema = 1
model = seir
seed = 42
out = out_test
replications = 4

[epidemic]
tau = 0.0005
beta = 0.25
alpha = 0.2
gamma = 0.1
sigma = 0.05
c1 = 400
c2 = 100
t1 = 0
tf = 50
dt = 1
cost = ripple

[bo]
window_dim = 5
n_init = 8
n_iters = 20
length_scale = 0.4
jitter = 1e-8
lcb_k = 1.5

[sampler]
num_ranges = 4
initial_reward = 3
mab_rounds = 6
n_random = 40

[adam]
step_size = 0.02
max_iters = 500
fd_step = 1e-4
tolerance = 1e-6

[rnn]
num_layers = 3
hidden_size = 16
dropout = 0.1
activation = relu
epochs = 8
batch_size = 4
learning_rate = 0.002

[settings]
setting = A,0.4,0.13,0.47,0.0,0.25
setting = B,0.8,0.0,0.2,0.0,0.25

[benchmark]
functions = rastrigin,rosenbrock
dimension = 2
runs = 5
)";

std::string write_temp(const std::string& body, const std::string& name) {
    std::ofstream out(name);
    out << body;
    return name;
}

} // namespace

TEST_CASE("full config loads with every section applied") {
    const std::string path = write_temp(kFullConfig, "cfg_full_test.cfg");
    const RunConfig cfg = RunConfig::load(path);

    CHECK(cfg.model == epi::ModelKind::Seir);
    CHECK(cfg.seed == 42);
    CHECK(cfg.out_dir == "out_test");
    CHECK(cfg.replications == 4);
    CHECK(cfg.epidemic.beta == 0.25);
    CHECK(cfg.epidemic.tf == 50);
    CHECK(cfg.bo.window_dim == 5);
    CHECK(cfg.bo.kernel.length_scale == 0.4);
    CHECK(cfg.bo.lcb.weight_k == 1.5);
    CHECK(cfg.bo.sampler.num_ranges == 4);
    CHECK(cfg.bo.adam.step_size == 0.02);
    CHECK(cfg.rnn.num_layers == 3);
    CHECK(cfg.rnn.learning_rate == 0.002);
    REQUIRE(cfg.settings.explicit_list.size() == 2);
    CHECK(cfg.settings.explicit_list[0].label == "A");
    CHECK(std::get<epi::SeirState>(cfg.settings.explicit_list[0].state).I == 0.47);
    CHECK(cfg.settings.explicit_list[1].beta == 0.25);
    CHECK(cfg.settings.seed == 42); // inherits the global seed
    REQUIRE(cfg.benchmark.functions.size() == 2);
    CHECK(cfg.benchmark.functions[1] == "rosenbrock");
    CHECK(cfg.benchmark.runs == 5);

    std::remove(path.c_str());
}

TEST_CASE("defaults survive an empty config") {
    const std::string path = write_temp("model = sis\n", "cfg_min_test.cfg");
    const RunConfig cfg = RunConfig::load(path);
    CHECK(cfg.model == epi::ModelKind::Sis);
    CHECK(cfg.bo.window_dim == 10);
    CHECK(cfg.epidemic.horizon() == 100);
    CHECK(cfg.rnn.hidden_size == 32);
    std::remove(path.c_str());
}

TEST_CASE("sis settings use the short arity") {
    const std::string path = write_temp(
        "model = sis\n[settings]\nsetting = X,0.6,0.4,0.3\n", "cfg_sis_test.cfg");
    const RunConfig cfg = RunConfig::load(path);
    REQUIRE(cfg.settings.explicit_list.size() == 1);
    CHECK(std::get<epi::SisState>(cfg.settings.explicit_list[0].state).I == 0.4);
    std::remove(path.c_str());
}

TEST_CASE("config errors carry line numbers") {
    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)RunConfig::load("no_such_file.cfg"), InputError);
    }

    SUBCASE("unknown key") {
        const std::string path =
            write_temp("model = seir\n[bo]\nwobble = 3\n", "cfg_bad1_test.cfg");
        try {
            (void)RunConfig::load(path);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
            CHECK(std::string(e.what()).find("wobble") != std::string::npos);
        }
        std::remove(path.c_str());
    }

    SUBCASE("unknown section") {
        const std::string path = write_temp("[banana]\nx = 1\n", "cfg_bad2_test.cfg");
        CHECK_THROWS_AS((void)RunConfig::load(path), InputError);
        std::remove(path.c_str());
    }

    SUBCASE("wrong setting arity") {
        const std::string path = write_temp(
            "model = seir\n[settings]\nsetting = A,0.5,0.5\n", "cfg_bad3_test.cfg");
        CHECK_THROWS_AS((void)RunConfig::load(path), InputError);
        std::remove(path.c_str());
    }

    SUBCASE("unsupported schema") {
        const std::string path = write_temp("schema = 2\n", "cfg_bad4_test.cfg");
        CHECK_THROWS_AS((void)RunConfig::load(path), InputError);
        std::remove(path.c_str());
    }

    SUBCASE("invalid numeric value") {
        const std::string path = write_temp("[epidemic]\nbeta = fast\n", "cfg_bad5_test.cfg");
        try {
            (void)RunConfig::load(path);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
        std::remove(path.c_str());
    }

    SUBCASE("validation failures surface") {
        const std::string path = write_temp("[rnn]\nnum_layers = 9\n", "cfg_bad6_test.cfg");
        CHECK_THROWS_AS((void)RunConfig::load(path), InputError);
        std::remove(path.c_str());
    }
}
