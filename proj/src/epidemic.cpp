#include "rnnbo/epidemic.hpp"

#include "rnnbo/errors.hpp"
#include "rnnbo/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

namespace rnnbo::epi {

std::string to_string(ModelKind kind) {
    return kind == ModelKind::Seir ? "seir" : "sis";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "seir") return ModelKind::Seir;
    if (name == "sis") return ModelKind::Sis;
    throw InputError("unknown model kind: '" + name + "' (expected seir or sis)");
}

void SeirState::validate(double tol) const {
    for (double x : {S, E, I, R}) {
        if (!(x >= -tol && x <= 1.0 + tol)) throw InputError("seir state: fraction out of [0,1]");
    }
    if (std::abs(sum() - 1.0) > tol) throw InputError("seir state: S+E+I+R != 1");
}

void SisState::validate(double tol) const {
    for (double x : {S, I}) {
        if (!(x >= -tol && x <= 1.0 + tol)) throw InputError("sis state: fraction out of [0,1]");
    }
    if (std::abs(sum() - 1.0) > tol) throw InputError("sis state: S+I != 1");
}

double infected_fraction(const EpidemicState& state) {
    return std::visit([](const auto& s) { return s.I; }, state);
}

ModelKind kind_of(const EpidemicState& state) {
    return std::holds_alternative<SeirState>(state) ? ModelKind::Seir : ModelKind::Sis;
}

void EpidemicParams::validate() const {
    for (double rate : {tau, beta, alpha, gamma, sigma, c1, c2}) {
        if (rate < 0.0) throw InputError("epidemic: rates and cost weights must be >= 0");
    }
    if (!(u_lower < u_upper)) throw InputError("epidemic: u_lower must be < u_upper");
    if (t1 >= tf) throw InputError("epidemic: t1 must be < tf");
    if (!(dt > 0.0)) throw InputError("epidemic: dt must be > 0");
}

NoisePath NoisePath::generate(std::uint64_t seed, int length, double dt) {
    NoisePath path;
    path.seed = seed;
    path.increments.resize(length);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    for (double& db : path.increments) db = normal(rng);
    return path;
}

SisNoise SisNoise::generate(std::uint64_t seed, int replications, int length, double dt) {
    SisNoise noise;
    noise.paths.reserve(replications);
    for (int r = 0; r < replications; ++r) {
        // splitmix-style stream separation per replication
        const std::uint64_t stream = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(r) + 1);
        noise.paths.push_back(NoisePath::generate(stream, length, dt));
    }
    return noise;
}

namespace {

double ripple_cost(double u1, double u2, int /*epoch*/) {
    using std::numbers::pi;
    return u1 * u1 + u2 * u2 + 0.3 * (1.0 - std::cos(3.0 * pi * u1) * std::cos(3.0 * pi * u2));
}

double quadratic_cost(double u1, double u2, int /*epoch*/) {
    return u1 * u1 + u2 * u2;
}

std::map<std::string, CostFn>& cost_registry() {
    static std::map<std::string, CostFn> registry = {
        {"ripple", ripple_cost},
        {"quadratic", quadratic_cost},
    };
    return registry;
}

} // namespace

void register_cost_function(const std::string& name, CostFn fn) {
    cost_registry()[name] = std::move(fn);
}

double control_cost(const ControlPair& ctrl, int epoch, const std::string& name) {
    const auto& registry = cost_registry();
    const auto it = registry.find(name);
    if (it == registry.end()) throw InputError("unknown cost function: '" + name + "'");
    return it->second(ctrl.u1, ctrl.u2, epoch);
}

namespace {

struct SeirDeriv {
    double dS, dE, dI, dR;
};

SeirDeriv seir_rhs(const SeirState& s, const ControlPair& u, const EpidemicParams& p) {
    const double infection = (1.0 - u.u1) * p.beta * s.S * s.I;
    SeirDeriv d;
    d.dS = p.tau - infection - p.tau * s.S;
    d.dE = infection - (p.tau + p.alpha) * s.E;
    d.dI = p.alpha * s.E - (p.tau + p.gamma) * s.I - u.u2 * s.I;
    d.dR = p.gamma * s.I - p.tau * s.R + u.u2 * s.I;
    return d;
}

SeirState seir_advance(const SeirState& s, const SeirDeriv& d, double h) {
    return {s.S + h * d.dS, s.E + h * d.dE, s.I + h * d.dI, s.R + h * d.dR};
}

} // namespace

SeirState seir_step(const SeirState& state, const ControlPair& ctrl, const EpidemicParams& p) {
    const double h = p.dt;
    const SeirDeriv k1 = seir_rhs(state, ctrl, p);
    const SeirDeriv k2 = seir_rhs(seir_advance(state, k1, h / 2.0), ctrl, p);
    const SeirDeriv k3 = seir_rhs(seir_advance(state, k2, h / 2.0), ctrl, p);
    const SeirDeriv k4 = seir_rhs(seir_advance(state, k3, h), ctrl, p);

    SeirState next;
    next.S = state.S + h / 6.0 * (k1.dS + 2.0 * k2.dS + 2.0 * k3.dS + k4.dS);
    next.E = state.E + h / 6.0 * (k1.dE + 2.0 * k2.dE + 2.0 * k3.dE + k4.dE);
    next.I = state.I + h / 6.0 * (k1.dI + 2.0 * k2.dI + 2.0 * k3.dI + k4.dI);
    next.R = state.R + h / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR);

    const double drift = next.sum() - 1.0;
    if (std::abs(drift) > 1e-9) {
        const double scale = 1.0 / next.sum();
        next.S *= scale;
        next.E *= scale;
        next.I *= scale;
        next.R *= scale;
    }
    return next;
}

SisState sis_step(const SisState& state, const ControlPair& ctrl, const EpidemicParams& p,
                  double dB) {
    const double drift = ((1.0 - ctrl.u1) * p.beta * state.S * state.I -
                          (p.tau + p.gamma) * state.I - ctrl.u2 * state.I) *
                         p.dt;
    const double noise = p.sigma * state.S * state.I * dB;
    double i_next = state.I + drift + noise;
    i_next = std::clamp(i_next, 0.0, 1.0);
    return {1.0 - i_next, i_next};
}

namespace {

void check_controls(std::span<const ControlPair> controls, const EpidemicParams& p) {
    for (const ControlPair& u : controls) {
        if (u.u1 < p.u_lower || u.u1 > p.u_upper || u.u2 < p.u_lower || u.u2 > p.u_upper) {
            throw InputError("controls out of bounds");
        }
    }
}

} // namespace

SimResult simulate(const EpidemicState& initial, std::span<const ControlPair> controls,
                   const EpidemicParams& p, const NoisePath* path) {
    p.validate();
    check_controls(controls, p);
    if (path && static_cast<int>(path->increments.size()) < static_cast<int>(controls.size())) {
        throw InputError("noise path shorter than control sequence");
    }

    SimResult sim;
    sim.rows.reserve(controls.size());
    EpidemicState state = initial;
    double cum = 0.0;
    for (std::size_t i = 0; i < controls.size(); ++i) {
        const ControlPair u = controls[i];
        const int epoch = p.t1 + static_cast<int>(i);
        const double inst =
            (p.c1 * infected_fraction(state) + p.c2 * control_cost(u, epoch, p.cost)) * p.dt;
        cum += inst;
        sim.rows.push_back({epoch, state, u, inst, cum});

        if (std::holds_alternative<SeirState>(state)) {
            state = seir_step(std::get<SeirState>(state), u, p);
        } else {
            const double db = path ? path->increments[i] : 0.0;
            state = sis_step(std::get<SisState>(state), u, p, db);
        }
    }
    sim.final_state = state;
    sim.total_cost = cum;
    return sim;
}

double window_objective(const EpidemicState& initial, std::span<const ControlPair> controls,
                        const EpidemicParams& p, const SisNoise* noise, int replications,
                        std::uint64_t seed) {
    if (std::holds_alternative<SeirState>(initial)) {
        return simulate(initial, controls, p).total_cost;
    }

    SisNoise generated;
    if (!noise) {
        if (replications < 1) throw InputError("window_objective: replications must be >= 1");
        generated = SisNoise::generate(seed, replications, static_cast<int>(controls.size()), p.dt);
        noise = &generated;
    }
    if (noise->paths.empty()) throw InputError("window_objective: empty noise bundle");

    double total = 0.0;
    for (const NoisePath& path : noise->paths) {
        total += simulate(initial, controls, p, &path).total_cost;
    }
    return total / static_cast<double>(noise->paths.size());
}

void write_trajectory_csv(const SimResult& sim, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);

    const bool seir = sim.rows.empty() || std::holds_alternative<SeirState>(sim.rows.front().state);
    if (seir) {
        out << "epoch,S,E,I,R,u1,u2,instantaneous_cost,cumulative_cost\n";
    } else {
        out << "epoch,S,I,u1,u2,instantaneous_cost,cumulative_cost\n";
    }
    for (const TrajectoryRow& row : sim.rows) {
        out << row.epoch << ',';
        if (seir) {
            const auto& s = std::get<SeirState>(row.state);
            out << io::g17(s.S) << ',' << io::g17(s.E) << ',' << io::g17(s.I) << ','
                << io::g17(s.R) << ',';
        } else {
            const auto& s = std::get<SisState>(row.state);
            out << io::g17(s.S) << ',' << io::g17(s.I) << ',';
        }
        out << io::g17(row.control.u1) << ',' << io::g17(row.control.u2) << ','
            << io::g17(row.inst_cost) << ',' << io::g17(row.cum_cost) << '\n';
    }
}

} // namespace rnnbo::epi
