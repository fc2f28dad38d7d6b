#include "modscat/profile.hpp"

#include <cmath>

namespace modscat {

SpectralField profile_of(const SpatialField& u, double t) {
    if (!(t >= 1.0)) throw Error(Errc::invalid_argument, "profile_of: t must be >= 1");
    SpectralField f = forward_transform(u);
    for (std::size_t k = 0; k < f.grid.n; ++k) {
        double xi = f.grid.xi(k);
        f.values[k] *= std::polar(1.0, 0.5 * t * xi * xi);
    }
    return f;
}

SpectralField modified_profile(const SpectralField& f_hat, const RVec& chi) {
    if (chi.size() != f_hat.values.size())
        throw Error(Errc::invalid_argument, "modified_profile: shape mismatch");
    SpectralField w(f_hat.grid);
    for (std::size_t k = 0; k < chi.size(); ++k) w.values[k] = std::polar(1.0, chi[k]) * f_hat.values[k];
    return w;
}

MaskedField reconstruct_u_asymptotic_order0(const SpectralField& f_hat, double t, const GridSpec& grid) {
    if (!(t > 0.0)) throw Error(Errc::invalid_argument, "asymptotic: t must be positive");
    const GridSpec& fg = f_hat.grid;
    const double xmax = kAsymptoticWindow * t * fg.xi_max();
    MaskedField out{SpatialField(grid), std::vector<std::uint8_t>(grid.n, 0)};
    const cplx pref = 1.0 / std::sqrt(cplx(0.0, t));
    std::size_t used = 0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        double x = grid.x(j);
        if (std::abs(x) > xmax) continue;
        cplx f;
        if (!lagrange4(f_hat.values, fg.xi(0), fg.dxi(), x / t, f)) continue;
        out.field.values[j] = std::polar(1.0, x * x / (2.0 * t)) * pref * f;
        out.mask[j] = 1;
        ++used;
    }
    if (used == 0) throw Error(Errc::empty_window, "asymptotic: evaluation window is empty");
    return out;
}

double masked_sup_diff(const CVec& a, const CVec& b, const std::vector<std::uint8_t>& mask) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (mask[j]) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

} // namespace modscat
