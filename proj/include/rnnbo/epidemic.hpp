#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rnnbo::epi {

enum class ModelKind { Seir, Sis };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Population fractions; S+E+I+R stays on the simplex.
struct SeirState {
    double S = 0.0;
    double E = 0.0;
    double I = 0.0;
    double R = 0.0;

    double sum() const { return S + E + I + R; }
    void validate(double tol = 1e-6) const;
};

struct SisState {
    double S = 0.0;
    double I = 0.0;

    double sum() const { return S + I; }
    void validate(double tol = 1e-9) const;
};

using EpidemicState = std::variant<SeirState, SisState>;

double infected_fraction(const EpidemicState& state);
ModelKind kind_of(const EpidemicState& state);

struct ControlPair {
    double u1 = 0.0; // prevention: scales the contact rate by (1 - u1)
    double u2 = 0.0; // intervention: adds u2 * I recovery flow
};

struct EpidemicParams {
    double tau = 3e-4;   // birth/death rate per epoch
    double beta = 0.3;   // natural contact rate
    double alpha = 0.2;  // E -> I transfer rate (SEIR only)
    double gamma = 0.1;  // natural recovery rate
    double sigma = 0.05; // contact-rate noise intensity (SIS only)
    double c1 = 400.0;   // epidemic cost weight
    double c2 = 100.0;   // control cost weight
    double u_lower = 0.0;
    double u_upper = 1.0;
    int t1 = 0;
    int tf = 100;
    double dt = 1.0;
    std::string cost = "ripple";

    int horizon() const { return tf - t1; }
    void validate() const;
};

/// Brownian increments, one per epoch, N(0, dt). Regenerable from the seed.
struct NoisePath {
    std::vector<double> increments;
    std::uint64_t seed = 0;

    static NoisePath generate(std::uint64_t seed, int length, double dt);
};

/// Common-random-numbers bundle: one path per replication.
struct SisNoise {
    std::vector<NoisePath> paths;

    static SisNoise generate(std::uint64_t seed, int replications, int length, double dt);
    int replications() const { return static_cast<int>(paths.size()); }
};

// Per-epoch control cost f(u1, u2, t). The default "ripple" form is
// u1^2 + u2^2 + 0.3*(1 - cos(3 pi u1) cos(3 pi u2)): nonnegative, zero at zero
// control, non-convex. Alternatives register by name.
using CostFn = std::function<double(double, double, int)>;
void register_cost_function(const std::string& name, CostFn fn);
double control_cost(const ControlPair& ctrl, int epoch, const std::string& name = "ripple");

/// One RK4 step of size dt with the controls held constant over the step.
SeirState seir_step(const SeirState& state, const ControlPair& ctrl, const EpidemicParams& p);

/// One Euler-Maruyama step; dB is a N(0, dt) draw. I is clamped to [0,1] and
/// S = 1 - I afterwards.
SisState sis_step(const SisState& state, const ControlPair& ctrl, const EpidemicParams& p,
                  double dB);

struct TrajectoryRow {
    int epoch = 0;           // t1 + offset
    EpidemicState state;     // at epoch start
    ControlPair control;     // applied over this epoch
    double inst_cost = 0.0;  // (c1 I + c2 f) dt
    double cum_cost = 0.0;
};

struct SimResult {
    std::vector<TrajectoryRow> rows;
    EpidemicState final_state;
    double total_cost = 0.0;
};

/// Rolls the model forward one epoch per control. SIS consumes one increment of
/// `path` per epoch (nullptr = zero noise).
SimResult simulate(const EpidemicState& initial, std::span<const ControlPair> controls,
                   const EpidemicParams& p, const NoisePath* path = nullptr);

/// Windowed objective V = sum_t (c1 I(t) + c2 f(u1,u2,t)) dt, left-rectangle.
/// For SIS the value is averaged over the replication paths in `noise`, or over
/// `replications` paths generated from `seed` when `noise` is null.
double window_objective(const EpidemicState& initial, std::span<const ControlPair> controls,
                        const EpidemicParams& p, const SisNoise* noise = nullptr,
                        int replications = 8, std::uint64_t seed = 0);

/// Trajectory CSV: epoch,S,E,I,R,u1,u2,instantaneous_cost,cumulative_cost
/// (SIS omits the E and R columns).
void write_trajectory_csv(const SimResult& sim, const std::string& path);

} // namespace rnnbo::epi
