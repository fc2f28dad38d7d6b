#pragma once

#include "modscat/grid.hpp"
#include "modscat/solver.hpp"

namespace modscat {

struct BootstrapReport {
    double t = 0.0;
    double h1_norm = 0.0;   // ||u||_{H^{1,0}}
    RVec weighted;          // ||<x>^j f||_{L^2}, j = 0..2N+1
    RVec weighted_scaled;   // t^{-alpha_j} ||<x>^j f||
    RVec w_sup;             // ||d^k w_hat||_inf, k = 0..2N
    double decay = 0.0;     // t^{1/2} ||u||_inf
    RVec alphas;
};

// alpha_{2N+1} = 0.9/(16d+8), ratio 6 downwards.
RVec default_alphas(int N, int d);

BootstrapReport bootstrap_report(const Snapshot& s, const RVec& alphas, int N = 1);

// ||u||_{H^{1,0}} through the spectral multiplier (1 + xi^2)^{1/2}.
double h10_norm(const SpatialField& u);

} // namespace modscat
