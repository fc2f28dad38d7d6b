#pragma once

#include <cstddef>

#include "modscat/fit.hpp"
#include "modscat/grid.hpp"

namespace modscat {

struct OracleInput {
    SpectralField f_hat; // fixed test profile
    double t = 1.0;
    int n = 1;
    RVec xi_samples; // snapped to the nearest xi node
};

struct OracleOptions {
    std::size_t max_nodes_per_dim = 4096; // 4096^2 nodes in total
    double truncation = 1e-12;            // relative level defining the support radius
    int refine = 0;                        // halve the node spacing this many extra times
};

struct OracleResult {
    RVec xi;            // the grid nodes actually used
    CVec value;         // P^1(t, xi)
    RVec d_eta;         // node spacing used per sample
    std::size_t max_nodes = 0;
};

// Radius R beyond which |f_hat| <= truncation * max|f_hat|.
double truncation_radius(const SpectralField& f_hat, double truncation);

// (1/2pi) int int e^{i t eta1 eta2} f(xi - eta2) conj f(xi - eta1 - eta2) f(xi - eta1)
// by the rectangle rule on a sub-lattice of the field's xi grid.
OracleResult direct_p1(const OracleInput& in, const OracleOptions& opt = {});

// Stationary-phase coefficients for (n, k) in {(1,0), (1,1), (2,0)}.
SpectralField stationary_coeff(const SpectralField& f_hat, int n, int k);

// Slope of log ||direct - sum_{k<r} t^{-k-1} P_k||_inf against log t (n = 1 only).
RateFit remainder_rate(const SpectralField& f_hat, int n, int r, const RVec& t_list,
                       const RVec& xi_samples, const OracleOptions& opt = {});

} // namespace modscat
