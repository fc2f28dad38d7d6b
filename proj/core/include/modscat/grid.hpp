#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "modscat/error.hpp"

namespace modscat {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

// Periodic box [-L, L) with n nodes, and its dual frequency grid in sorted order.
struct GridSpec {
    std::size_t n = 0;
    double L = 0.0;

    GridSpec() = default;
    GridSpec(std::size_t n_points, double half_width);

    double dx() const { return 2.0 * L / static_cast<double>(n); }
    double dxi() const { return std::numbers::pi / L; }
    double x(std::size_t j) const { return -L + static_cast<double>(j) * dx(); }
    double xi(std::size_t k) const {
        return (static_cast<double>(k) - static_cast<double>(n / 2)) * dxi();
    }
    double xi_max() const { return xi(n - 1); }
    RVec x_nodes() const;
    RVec xi_nodes() const;

    bool operator==(const GridSpec& o) const { return n == o.n && L == o.L; }
};

struct SpatialField {
    GridSpec grid;
    CVec values;

    SpatialField() = default;
    explicit SpatialField(const GridSpec& g) : grid(g), values(g.n) {}
    SpatialField(const GridSpec& g, CVec v);
};

struct SpectralField {
    GridSpec grid;
    CVec values;
    // Set by xi_derivative when the input does not decay near the grid edges.
    bool tail_warning = false;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), values(g.n) {}
    SpectralField(const GridSpec& g, CVec v);
};

SpectralField forward_transform(const SpatialField& field);
SpatialField inverse_transform(const SpectralField& field);

// Centered 4th-order finite differences on the xi grid (one-sided at the two
// outermost nodes per side).
SpectralField xi_derivative(const SpectralField& field, int order);

// Same stencils on raw arrays with spacing h.
CVec fd_derivative(const CVec& f, double h, int order);
RVec fd_derivative(const RVec& f, double h, int order);

// Max of |f| over the outer 10% on each side, relative to the global max.
double edge_ratio(const CVec& f);

double weighted_l2_norm(const SpatialField& field, double m);
double l2_norm(const CVec& v, double h);
double sup_norm(const CVec& v);

// 4-point Lagrange interpolation of samples on a uniform grid starting at x0.
// Returns false outside [x0, x0 + (n-1) h].
bool lagrange4(const CVec& f, double x0, double h, double q, cplx& out);
bool lagrange4(const RVec& f, double x0, double h, double q, double& out);

void require_finite(const CVec& v, const char* what);

} // namespace modscat
