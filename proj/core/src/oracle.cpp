#include "modscat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace modscat {

double truncation_radius(const SpectralField& f_hat, double truncation) {
    const GridSpec& g = f_hat.grid;
    double mx = sup_norm(f_hat.values);
    if (mx == 0.0) return 0.0;
    double R = 0.0;
    for (std::size_t k = 0; k < g.n; ++k)
        if (std::abs(f_hat.values[k]) > truncation * mx) R = std::max(R, std::abs(g.xi(k)));
    return R;
}

namespace {

std::size_t nearest_node(const GridSpec& g, double xi) {
    double s = std::round(xi / g.dxi()) + static_cast<double>(g.n / 2);
    if (s < 0.0 || s > static_cast<double>(g.n - 1))
        throw Error(Errc::invalid_argument, "oracle: xi sample outside the grid");
    return static_cast<std::size_t>(s);
}

} // namespace

OracleResult direct_p1(const OracleInput& in, const OracleOptions& opt) {
    if (in.n != 1)
        throw Error(Errc::not_implemented, "direct quadrature exists only for n = 1");
    if (!(in.t >= 1.0)) throw Error(Errc::invalid_argument, "oracle: t must be >= 1");
    const SpectralField& f = in.f_hat;
    const GridSpec& g = f.grid;
    OracleResult res;
    const double mx = sup_norm(f.values);
    if (edge_ratio(f.values) > opt.truncation)
        throw Error(Errc::invalid_argument, "oracle: profile does not decay within the outer 10% of the grid");
    const double R = truncation_radius(f, opt.truncation);
    const long n = static_cast<long>(g.n);

    for (double xs : in.xi_samples) {
        const long kx = static_cast<long>(nearest_node(g, xs));
        const double xi = g.xi(static_cast<std::size_t>(kx));
        res.xi.push_back(xi);
        if (mx == 0.0) {
            res.value.push_back(0.0);
            res.d_eta.push_back(0.0);
            continue;
        }
        const double eta_max = R + std::abs(xi);
        const double bound = std::numbers::pi / (4.0 * in.t * eta_max);
        long stride = 1;
        while (static_cast<double>(2 * stride) * g.dxi() <= bound) stride *= 2;
        if (static_cast<double>(stride) * g.dxi() > bound) {
            std::ostringstream os;
            os << "oracle: xi grid spacing " << g.dxi() << " cannot resolve the phase at t=" << in.t
               << " (need d_eta <= " << bound << "); use a larger box or smaller t";
            throw Error(Errc::under_resolved, os.str());
        }
        for (int r = 0; r < opt.refine; ++r) {
            if (stride == 1)
                throw Error(Errc::under_resolved, "oracle: refinement below the field's xi spacing");
            stride /= 2;
        }
        const double deta = static_cast<double>(stride) * g.dxi();
        // eta values are m * deta; f(xi - eta) needs |xi - eta| <= R.
        const long m_lo = static_cast<long>(std::floor((xi - R) / deta)) - 1;
        const long m_hi = static_cast<long>(std::ceil((xi + R) / deta)) + 1;
        const auto count = static_cast<std::size_t>(m_hi - m_lo + 1);
        if (count > opt.max_nodes_per_dim) {
            std::ostringstream os;
            os << "oracle: " << count << "^2 quadrature nodes exceed the cap of " << opt.max_nodes_per_dim
               << "^2 at t=" << in.t << "; use a smaller t or a tighter truncation";
            throw Error(Errc::memory_cap, os.str());
        }
        res.max_nodes = std::max(res.max_nodes, count);
        auto at = [&](long k) -> cplx { return k >= 0 && k < n ? f.values[k] : cplx(0.0); };

        cplx total{};
        for (long m1 = m_lo; m1 <= m_hi; ++m1) {
            const cplx c = at(kx - m1 * stride);
            if (c == 0.0) continue;
            const double eta1 = static_cast<double>(m1) * deta;
            const double w = in.t * eta1 * deta;
            const cplx z = std::polar(1.0, w);
            cplx inner{};
            cplx ph{};
            for (long m2 = m_lo; m2 <= m_hi; ++m2) {
                // Re-seed the phasor recurrence periodically to bound drift.
                if (((m2 - m_lo) & 63) == 0) ph = std::polar(1.0, w * static_cast<double>(m2));
                const long k3 = kx - (m1 + m2) * stride;
                if (k3 >= 0 && k3 < n) inner += at(kx - m2 * stride) * std::conj(f.values[k3]) * ph;
                ph *= z;
            }
            total += c * inner;
        }
        res.value.push_back(total * deta * deta / (2.0 * std::numbers::pi));
        res.d_eta.push_back(deta);
    }
    return res;
}

SpectralField stationary_coeff(const SpectralField& f_hat, int n, int k) {
    const CVec& f = f_hat.values;
    SpectralField out(f_hat.grid);
    if (n == 1 && k == 0) {
        for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = std::norm(f[i]) * f[i];
        return out;
    }
    if (n == 2 && k == 0) {
        for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = std::norm(f[i]) * std::norm(f[i]) * f[i];
        return out;
    }
    if (n == 1 && k == 1) {
        // From int int e^{i t a b} g(a, b) ~ (2pi/t)(g(0) + (i/t) d_a d_b g(0)); the
        // sign of the i was confirmed by the t^{-3} decay of the direct residual.
        SpectralField d1 = xi_derivative(f_hat, 1);
        SpectralField d2 = xi_derivative(f_hat, 2);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const cplx a = f[i], b = d1.values[i], c = d2.values[i];
            out.values[i] = cplx(0.0, 1.0) * (2.0 * a * std::norm(b) + b * b * std::conj(a) + a * a * std::conj(c));
        }
        out.tail_warning = d1.tail_warning || d2.tail_warning;
        return out;
    }
    std::ostringstream os;
    os << "stationary_coeff: (n,k)=(" << n << "," << k << ") not implemented at order N>1";
    throw Error(Errc::not_implemented, os.str());
}

RateFit remainder_rate(const SpectralField& f_hat, int n, int r, const RVec& t_list,
                       const RVec& xi_samples, const OracleOptions& opt) {
    if (n != 1) throw Error(Errc::not_implemented, "remainder_rate: direct path exists only for n = 1");
    if (r < 1 || r > 2) throw Error(Errc::not_implemented, "remainder_rate: r must be 1 or 2");
    SpectralField p0 = stationary_coeff(f_hat, 1, 0);
    SpectralField p1 = r >= 2 ? stationary_coeff(f_hat, 1, 1) : SpectralField();
    RVec ts, ys;
    for (double t : t_list) {
        OracleInput in{f_hat, t, 1, xi_samples};
        OracleResult d;
        try {
            d = direct_p1(in, opt);
        } catch (const Error& e) {
            if (e.code() == Errc::memory_cap || e.code() == Errc::under_resolved) continue;
            throw;
        }
        double sup = 0.0;
        for (std::size_t i = 0; i < d.xi.size(); ++i) {
            std::size_t k = nearest_node(f_hat.grid, d.xi[i]);
            cplx rem = d.value[i] - p0.values[k] / t;
            if (r >= 2) rem -= p1.values[k] / (t * t);
            sup = std::max(sup, std::abs(rem));
        }
        ts.push_back(t);
        ys.push_back(sup);
    }
    return fit_rate(ts, ys, 4);
}

} // namespace modscat
