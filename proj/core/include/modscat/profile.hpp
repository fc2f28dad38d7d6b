#pragma once

#include <cstdint>
#include <vector>

#include "modscat/grid.hpp"

namespace modscat {

// Fraction of t * xi_max kept when evaluating asymptotic formulas at x / t.
inline constexpr double kAsymptoticWindow = 0.8;

struct ProfileSnapshot {
    double t = 1.0;
    SpectralField f_hat;
    SpectralField w_hat;
    RVec chi; // F = i chi, Theta = e^{i chi}
};

// f_hat(xi) = e^{i t xi^2 / 2} u_hat(xi)
SpectralField profile_of(const SpatialField& u, double t);

// w_hat = e^{i chi} f_hat
SpectralField modified_profile(const SpectralField& f_hat, const RVec& chi);

struct MaskedField {
    SpatialField field;
    std::vector<std::uint8_t> mask; // 1 where the asymptotic formula was evaluated
};

// Leading stationary-phase evaluation e^{ix^2/2t} (it)^{-1/2} f_hat(x/t).
MaskedField reconstruct_u_asymptotic_order0(const SpectralField& f_hat, double t, const GridSpec& grid);

// Sup of |a - b| over the common mask.
double masked_sup_diff(const CVec& a, const CVec& b, const std::vector<std::uint8_t>& mask);

} // namespace modscat
