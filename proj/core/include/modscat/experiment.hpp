#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "modscat/expansion.hpp"
#include "modscat/norms.hpp"
#include "modscat/oracle.hpp"
#include "modscat/solver.hpp"

namespace modscat {

struct OracleConfig {
    std::size_t n = 8192;
    double half_width = 1024.0;
    double amplitude = 1.0;
    double decay = 1.0; // f_hat(xi) = amplitude * exp(-decay * xi^2)
    RVec t_list{5.0, 7.0710678118654755, 10.0, 14.142135623730951, 20.0, 28.284271247461902, 40.0};
    RVec xi_samples{-1.0, -0.5, 0.0, 0.5, 1.0};
    double doubling_t_max = 20.0; // resolution doubling is checked up to this t
};

struct ExperimentConfig {
    std::string source;
    NonlinearitySpec nl;
    std::string family = "gaussian"; // gaussian | tabulated
    double amplitude = 0.1;
    double width = 1.0;
    std::string table; // CSV (x, re, im) sampled on the grid, for tabulated data
    std::size_t n = 4096;
    double half_width = 0.0; // 0 means 20 * width
    SolverConfig solver;
    ExtractionOptions extraction;
    FitOptions fit;
    int order = 1;
    OracleConfig oracle;

    GridSpec grid() const;
    // Stable key = value listing of every effective setting.
    std::vector<std::pair<std::string, std::string>> canonical() const;
    // 16 hex digits of FNV-1a over the simulation-relevant canonical entries.
    std::string hash() const;
};

ExperimentConfig parse_experiment(const std::string& text, const std::string& source);
ExperimentConfig load_experiment(const std::filesystem::path& path);

// MODSCAT_RUNS_DIR, or ./runs.
std::filesystem::path runs_root();
std::filesystem::path run_dir(const ExperimentConfig& cfg, const std::filesystem::path& root);

SimulationState initial_state(const ExperimentConfig& cfg, InitialNorms* norms = nullptr);

struct RunOutput {
    std::filesystem::path dir;
    Trajectory trajectory;
    bool from_cache = false;
};

// Runs (or reloads a finished run from) root/<hash>: snapshots/, results/, summary.json.
RunOutput simulate(const ExperimentConfig& cfg, const std::filesystem::path& root, bool reuse = true);

// Rebuilds the trajectory from the snapshot files of a finished run.
Trajectory load_trajectory(const ExperimentConfig& cfg, const std::filesystem::path& dir);

// Continues a run from a snapshot file through the remaining output times.
Trajectory resume(const ExperimentConfig& cfg, const std::filesystem::path& snapshot,
                  const SnapshotSink& sink = {});

struct ExpansionOutput {
    ScatteringData sd;
    ExpansionOrder1 coeffs;
    Order1Fit fit;
    RVec t;            // snapshot times in the remainder window
    RVec err_order0;   // ||u - u_asym(order 0)||_inf
    RVec err_order1;
    RateFit rate0, rate1;
};

ExpansionOutput expand(const ExperimentConfig& cfg, const Trajectory& tr, const AppendixOptions& aopt = {});

// Writes results/coeff_*.csv and expansion.json into dir.
void emit_expansion(const ExpansionOutput& e, const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct OracleRow {
    double t, xi;
    cplx value;
    double residual0, residual1;
};

std::vector<OracleRow> run_oracle(const OracleConfig& oc);
SpectralField oracle_profile(const OracleConfig& oc);

const char* build_id();

} // namespace modscat
