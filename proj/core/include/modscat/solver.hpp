#pragma once

#include <functional>
#include <string>
#include <vector>

#include "modscat/grid.hpp"

namespace modscat {

// lambdas[k] multiplies |u|^{2(k+1)} u. All-zero is the free mode.
struct NonlinearitySpec {
    RVec lambdas{0.0};

    NonlinearitySpec() = default;
    explicit NonlinearitySpec(RVec l);
    double lambda(int k) const { return k >= 1 && k <= degree() ? lambdas[k - 1] : 0.0; }
    int degree() const { return static_cast<int>(lambdas.size()); }
    bool free_mode() const;
    void validate() const;
};

struct SimulationState {
    double t = 1.0;
    SpatialField u;
    RVec chi; // lambda_1 * int_1^t |f_hat(s)|^2 / s ds, on the xi grid
    long long step_count = 0;
};

struct SolverConfig {
    double dt_base = 0.005;
    double t0 = 1.0;
    double T = 10.0;
    double ratio = 1.189207115002721; // 2^{1/4}
    bool richardson_check = false;
    // Extra output times merged into the geometric sequence (restart points).
    RVec checkpoints;
    // Multiplies the number of steps in every segment (Richardson refinement).
    int step_multiplier = 1;
    double alias_threshold = 1e-8;

    void validate() const;
};

std::vector<double> output_times(const SolverConfig& cfg);
double scheduled_dt(const SolverConfig& cfg, double t);

struct InitialNorms {
    double u1_h10 = 0.0;
    double f1_h03 = 0.0;
};

SimulationState initial_data_gaussian(double eps, double w, const GridSpec& grid,
                                      InitialNorms* norms = nullptr);
// f1 sampled on the grid; u1 = e^{i Delta/2} f1.
SimulationState initial_data_tabulated(const SpatialField& f1, InitialNorms* norms = nullptr);

struct StepOptions {
    bool kinetic = true; // test hook: false leaves only the nonlinear rotation
};

SimulationState step(const SimulationState& s, double dt, const NonlinearitySpec& nl,
                     const StepOptions& opt = {});

// Advances s to t_end with ns uniform Strang steps, accumulating chi.
void advance_uniform(SimulationState& s, double t_end, long long ns, const NonlinearitySpec& nl,
                     const StepOptions& opt = {});

struct ConservedQuantities {
    double mass = 0.0;
    double energy = 0.0;
};

ConservedQuantities conserved_quantities(const SpatialField& u, const NonlinearitySpec& nl);

struct AliasReport {
    double x_fraction = 0.0;  // mass fraction in the outer 10% of the x grid
    double xi_fraction = 0.0; // same on the xi grid
};

AliasReport aliasing(const SpatialField& u);

struct Snapshot {
    double t = 1.0;
    long long step_count = 0;
    SpatialField u;
    SpectralField f_hat;
    SpectralField w_hat;
    RVec chi;
    ConservedQuantities conserved;
    AliasReport alias;
};

Snapshot make_snapshot(const SimulationState& s, const NonlinearitySpec& nl);

struct Trajectory {
    GridSpec grid;
    NonlinearitySpec nl;
    SolverConfig cfg;
    std::vector<Snapshot> snaps;
    bool alias_flag = false;
    double richardson_ratio = -1.0; // set when cfg.richardson_check
    const Snapshot& at(double t) const; // exact output time, throws otherwise
};

using SnapshotSink = std::function<void(const Snapshot&)>;

// Integrates from s0 through every output time after s0.t. A state that sits
// on an output time continues with exactly the steps an unbroken run uses.
Trajectory run(const SimulationState& s0, const SolverConfig& cfg, const NonlinearitySpec& nl,
               const SnapshotSink& sink = {});

} // namespace modscat
