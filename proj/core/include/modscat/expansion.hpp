#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modscat/fit.hpp"
#include "modscat/grid.hpp"
#include "modscat/profile.hpp"
#include "modscat/solver.hpp"

namespace modscat {

struct ScatteringData {
    SpectralField w00;
    RVec nu;  // lambda_1 |w00|^2
    RVec phi; // limit of chi - nu ln t
    double extraction_error = 0.0; // ||w(T) - w(T/2)||_inf
    double phi_error = 0.0;        // same tail variation for chi - nu ln t
    bool unconverged = false;
    double lambda1 = 0.0;
    double T = 0.0;
    double fit_condition = 0.0;
};

struct ExtractionOptions {
    double window_fraction = 0.1; // fit over [fraction * T, T]
    bool require_long_run = true; // T >= 500 with >= 8 snapshots in [T/4, T]
};

// w00 is the intercept of a per-xi fit of w(t) on {1, 1/t, ln t/t, 1/t^2, ln t/t^2};
// phi the intercept of chi - nu ln t on {1, 1/t, ln t/t}.
ScatteringData extract_scattering_data(const Trajectory& tr, const ExtractionOptions& opt = {});

struct ExpansionOrder1 {
    SpectralField w10, w11, w12;
    CVec F10, F11; // F = i chi; F11 vanishes identically in exact arithmetic
    SpectralField f10, f11, f12;
    SpectralField u10, u11, u12;
    std::vector<std::uint8_t> mask; // rho >= floor * max rho
};

struct AppendixOptions {
    double rho_floor = 1e-8;
    bool flip_w11_sign = false; // mutation fixture for the verify suite
};

ExpansionOrder1 appendix_coeffs(const ScatteringData& sd, double lambda1, double lambda2,
                                const AppendixOptions& opt = {});

// Same coefficients assembled from rho = |w00| and the unwrapped phase zeta.
ExpansionOrder1 appendix_coeffs_polar(const ScatteringData& sd, double lambda1, double lambda2,
                                      const AppendixOptions& opt = {});

// Phase of z unwrapped outward from the grid center.
RVec unwrap_phase(const CVec& z);

struct FitOptions {
    double window_fraction = 0.1;
    bool nuisance = true;      // add 1/t^2, ln t/t^2 columns
    bool three_basis = false;  // add a ln^2 t / t column
    double max_condition = 1e8;
};

struct Order1Fit {
    SpectralField w10_emp, w11_emp, w12_emp; // w12_emp only with three_basis
    RVec w12_se;                             // standard error of w12_emp per node
    RateFit residual_rate;
    double condition = 0.0;
    std::size_t samples = 0;
};

Order1Fit fit_order1(const Trajectory& tr, const ScatteringData& sd, const FitOptions& opt = {});

// Interior window where rho >= frac * max rho.
std::vector<std::uint8_t> interior_window(const SpectralField& w00, double frac = 0.1);

double relative_sup_distance(const CVec& a, const CVec& ref, const std::vector<std::uint8_t>& mask);

// e^{ix^2/2t - i nu ln t - i phi}(it)^{-1/2} [w00 + (u10 + u11 ln t + u12 ln^2 t)/t] at x/t.
MaskedField u_asymptotic(const ScatteringData& sd, const ExpansionOrder1* exp1, double t,
                         const GridSpec& grid, int order);

struct JinSegurCoeffs {
    RVec eta; // rescaled frequency eta = sqrt(2) xi
    RVec h;   // rho(eta / sqrt(2))
    RVec h10, h11, h12;
    RVec theta20_h, theta21_h, theta22_h; // theta_{2,k} * h
    double alpha = 0.0;
    bool general_alpha = false; // lambda_1 not in {-2, 2}
    std::vector<std::uint8_t> mask;
};

JinSegurCoeffs jin_segur_coeffs(const ScatteringData& sd, const ExpansionOrder1& exp1, double lambda1,
                                double lambda2);

// 4 alpha (3 h h'^2 + h^2 h'') with derivatives taken on the eta grid.
RVec jin_segur_h11_from_h(const JinSegurCoeffs& js);

} // namespace modscat
