#include "rnnbo/run_config.hpp"

#include "rnnbo/errors.hpp"
#include "rnnbo/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace rnnbo {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;

    std::string context() const { return "config line " + std::to_string(line); }
    double as_double() const { return io::parse_double(value, context()); }
    long as_long() const { return io::parse_long(value, context()); }
    std::uint64_t as_seed() const {
        return static_cast<std::uint64_t>(io::parse_long(value, context()));
    }
};

} // namespace

void RunConfig::validate() const {
    if (schema != 1) throw InputError("config: unsupported schema version");
    if (replications < 1) throw InputError("config: replications must be >= 1");
    epidemic.validate();
    bo.validate();
    rnn.validate();
    if (benchmark.dimension < 1 || benchmark.runs < 1) {
        throw InputError("config: benchmark dimension and runs must be >= 1");
    }
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);

    std::vector<Entry> entries;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw InputError("config line " + std::to_string(line_no) + ": unterminated section");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        entries.push_back({section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), line_no});
    }

    RunConfig cfg;

    // model kind first; the settings entries depend on it
    for (const Entry& e : entries) {
        if (e.section.empty() && e.key == "model") {
            cfg.model = epi::model_kind_from_string(e.value);
        }
    }
    cfg.settings.model = cfg.model;

    std::vector<Entry> setting_entries;
    for (const Entry& e : entries) {
        if (e.section.empty()) {
            if (e.key == "schema") cfg.schema = static_cast<int>(e.as_long());
            else if (e.key == "model") continue;
            else if (e.key == "seed") cfg.seed = e.as_seed();
            else if (e.key == "out") cfg.out_dir = e.value;
            else if (e.key == "replications") cfg.replications = static_cast<int>(e.as_long());
            else throw InputError(e.context() + ": unknown key '" + e.key + "'");
        } else if (e.section == "epidemic") {
            auto& p = cfg.epidemic;
            if (e.key == "tau") p.tau = e.as_double();
            else if (e.key == "beta") p.beta = e.as_double();
            else if (e.key == "alpha") p.alpha = e.as_double();
            else if (e.key == "gamma") p.gamma = e.as_double();
            else if (e.key == "sigma") p.sigma = e.as_double();
            else if (e.key == "c1") p.c1 = e.as_double();
            else if (e.key == "c2") p.c2 = e.as_double();
            else if (e.key == "u_lower") p.u_lower = e.as_double();
            else if (e.key == "u_upper") p.u_upper = e.as_double();
            else if (e.key == "t1") p.t1 = static_cast<int>(e.as_long());
            else if (e.key == "tf") p.tf = static_cast<int>(e.as_long());
            else if (e.key == "dt") p.dt = e.as_double();
            else if (e.key == "cost") p.cost = e.value;
            else throw InputError(e.context() + ": unknown key '" + e.key + "'");
        } else if (e.section == "bo") {
            auto& b = cfg.bo;
            if (e.key == "window_dim") b.window_dim = static_cast<int>(e.as_long());
            else if (e.key == "n_init") b.n_init = static_cast<int>(e.as_long());
            else if (e.key == "n_iters") b.n_iters = static_cast<int>(e.as_long());
            else if (e.key == "length_scale") b.kernel.length_scale = e.as_double();
            else if (e.key == "jitter") b.kernel.jitter = e.as_double();
            else if (e.key == "lcb_k") b.lcb.weight_k = e.as_double();
            else throw InputError(e.context() + ": unknown key '" + e.key + "'");
        } else if (e.section == "sampler") {
            auto& s = cfg.bo.sampler;
            if (e.key == "num_ranges") s.num_ranges = static_cast<int>(e.as_long());
            else if (e.key == "initial_reward") s.initial_reward = static_cast<int>(e.as_long());
            else if (e.key == "mab_rounds") s.mab_rounds = static_cast<int>(e.as_long());
            else if (e.key == "n_random") s.n_random = static_cast<int>(e.as_long());
            else throw InputError(e.context() + ": unknown key '" + e.key + "'");
        } else if (e.section == "adam") {
            auto& a = cfg.bo.adam;
            if (e.key == "step_size") a.step_size = e.as_double();
            else if (e.key == "beta1") a.beta1 = e.as_double();
            else if (e.key == "beta2") a.beta2 = e.as_double();
            else if (e.key == "epsilon") a.epsilon = e.as_double();
            else if (e.key == "max_iters") a.max_iters = static_cast<int>(e.as_long());
            else if (e.key == "fd_step") a.fd_step = e.as_double();
            else if (e.key == "tolerance") a.tolerance = e.as_double();
            else throw InputError(e.context() + ": unknown key '" + e.key + "'");
        } else if (e.section == "rnn") {
            auto& r = cfg.rnn;
            if (e.key == "num_layers") r.num_layers = static_cast<int>(e.as_long());
            else if (e.key == "hidden_size") r.hidden_size = static_cast<int>(e.as_long());
            else if (e.key == "dropout") r.dropout_rate = e.as_double();
            else if (e.key == "activation") r.activation = e.value;
            else if (e.key == "epochs") r.epochs = static_cast<int>(e.as_long());
            else if (e.key == "batch_size") r.batch_size = static_cast<int>(e.as_long());
            else if (e.key == "learning_rate") r.learning_rate = e.as_double();
            else throw InputError(e.context() + ": unknown key '" + e.key + "'");
        } else if (e.section == "settings") {
            auto& plan = cfg.settings;
            if (e.key == "setting") setting_entries.push_back(e);
            else if (e.key == "count") plan.random_count = static_cast<int>(e.as_long());
            else if (e.key == "seed") plan.seed = e.as_seed();
            else if (e.key == "betas") {
                plan.betas.clear();
                for (const std::string& b : split_list(e.value)) {
                    plan.betas.push_back(io::parse_double(b, e.context()));
                }
            } else {
                throw InputError(e.context() + ": unknown key '" + e.key + "'");
            }
        } else if (e.section == "benchmark") {
            auto& b = cfg.benchmark;
            if (e.key == "functions") b.functions = split_list(e.value);
            else if (e.key == "dimension") b.dimension = static_cast<int>(e.as_long());
            else if (e.key == "runs") b.runs = static_cast<int>(e.as_long());
            else throw InputError(e.context() + ": unknown key '" + e.key + "'");
        } else {
            throw InputError(e.context() + ": unknown section [" + e.section + "]");
        }
    }

    for (const Entry& e : setting_entries) {
        const std::vector<std::string> cells = split_list(e.value);
        pipeline::InitialSetting s;
        if (cfg.model == epi::ModelKind::Seir) {
            if (cells.size() != 6) {
                throw InputError(e.context() + ": seir setting needs label,S,E,I,R,beta");
            }
            s.label = cells[0];
            s.state = epi::SeirState{io::parse_double(cells[1], e.context()),
                                     io::parse_double(cells[2], e.context()),
                                     io::parse_double(cells[3], e.context()),
                                     io::parse_double(cells[4], e.context())};
            s.beta = io::parse_double(cells[5], e.context());
        } else {
            if (cells.size() != 4) {
                throw InputError(e.context() + ": sis setting needs label,S,I,beta");
            }
            s.label = cells[0];
            s.state = epi::SisState{io::parse_double(cells[1], e.context()),
                                    io::parse_double(cells[2], e.context())};
            s.beta = io::parse_double(cells[3], e.context());
        }
        cfg.settings.explicit_list.push_back(std::move(s));
    }
    if (cfg.settings.seed == 0) cfg.settings.seed = cfg.seed;

    cfg.validate();
    return cfg;
}

} // namespace rnnbo
