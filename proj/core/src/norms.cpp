#include "modscat/norms.hpp"

#include <cmath>

namespace modscat {

RVec default_alphas(int N, int d) {
    if (N < 0 || d < 1 || d > 4) throw Error(Errc::invalid_argument, "default_alphas: need N >= 0, 1 <= d <= 4");
    const int top = 2 * N + 1;
    RVec a(top + 1);
    a[top] = 0.9 / (16.0 * d + 8.0);
    for (int j = top - 1; j >= 0; --j) a[j] = a[j + 1] / 6.0;
    return a;
}

double h10_norm(const SpatialField& u) {
    SpectralField uh = forward_transform(u);
    double s = 0.0;
    for (std::size_t k = 0; k < u.grid.n; ++k) {
        double xi = u.grid.xi(k);
        s += (1.0 + xi * xi) * std::norm(uh.values[k]);
    }
    return std::sqrt(s * u.grid.dxi());
}

BootstrapReport bootstrap_report(const Snapshot& s, const RVec& alphas, int N) {
    const int top = 2 * N + 1;
    if (static_cast<int>(alphas.size()) != top + 1)
        throw Error(Errc::invalid_argument, "bootstrap_report: need 2N+2 exponents");
    BootstrapReport r;
    r.t = s.t;
    r.alphas = alphas;
    r.h1_norm = h10_norm(s.u);
    SpatialField f = inverse_transform(s.f_hat);
    for (int j = 0; j <= top; ++j) {
        double v = weighted_l2_norm(f, static_cast<double>(j));
        r.weighted.push_back(v);
        r.weighted_scaled.push_back(std::pow(s.t, -alphas[j]) * v);
    }
    r.w_sup.push_back(sup_norm(s.w_hat.values));
    for (int k = 1; k <= 2 * N; ++k) r.w_sup.push_back(sup_norm(xi_derivative(s.w_hat, k).values));
    r.decay = std::sqrt(s.t) * sup_norm(s.u.values);
    return r;
}

} // namespace modscat
