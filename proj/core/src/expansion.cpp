#include "modscat/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace modscat {

namespace {

const cplx I(0.0, 1.0);

// Snapshot nearest to t in log time.
const Snapshot& nearest_snapshot(const Trajectory& tr, double t) {
    const Snapshot* best = &tr.snaps.front();
    for (const auto& s : tr.snaps)
        if (std::abs(std::log(s.t / t)) < std::abs(std::log(best->t / t))) best = &s;
    return *best;
}

std::vector<const Snapshot*> window_snaps(const Trajectory& tr, double t_lo) {
    std::vector<const Snapshot*> out;
    for (const auto& s : tr.snaps)
        if (s.t >= t_lo * (1.0 - 1e-12)) out.push_back(&s);
    return out;
}

double log_over_t(double t) { return std::log(t) / t; }

} // namespace

ScatteringData extract_scattering_data(const Trajectory& tr, const ExtractionOptions& opt) {
    if (tr.snaps.empty()) throw Error(Errc::too_few_points, "extract: empty trajectory");
    const Snapshot& last = tr.snaps.back();
    const double T = last.t;
    const std::size_t n = tr.grid.n;
    if (opt.require_long_run) {
        std::size_t late = window_snaps(tr, T / 4).size();
        if (T < 500.0 || late < 8) {
            std::ostringstream os;
            os << "extract: need T >= 500 with >= 8 snapshots in [T/4, T]; have T=" << T << ", " << late;
            throw Error(Errc::too_few_points, os.str());
        }
    }
    auto win = window_snaps(tr, opt.window_fraction * T);
    RVec ts;
    for (auto* s : win) ts.push_back(s->t);

    ScatteringData sd;
    sd.lambda1 = tr.nl.lambda(1);
    sd.T = T;
    sd.w00 = SpectralField(tr.grid);
    sd.nu.assign(n, 0.0);
    sd.phi.assign(n, 0.0);

    TimeBasisFit wfit(ts, {[](double) { return 1.0; }, [](double t) { return 1.0 / t; }, log_over_t,
                           [](double t) { return 1.0 / (t * t); },
                           [](double t) { return std::log(t) / (t * t); }});
    sd.fit_condition = wfit.condition();
    if (wfit.condition() > 1e8)
        throw Error(Errc::ill_conditioned, "extract: w00 fit condition number exceeds 1e8");
    CVec y(ts.size());
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < win.size(); ++i) y[i] = win[i]->w_hat.values[k];
        sd.w00.values[k] = wfit.solve(y)[0];
        sd.nu[k] = sd.lambda1 * std::norm(sd.w00.values[k]);
    }
    if (sd.lambda1 != 0.0) {
        TimeBasisFit pfit(ts, {[](double) { return 1.0; }, [](double t) { return 1.0 / t; }, log_over_t});
        RVec yr(ts.size());
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < win.size(); ++i) yr[i] = win[i]->chi[k] - sd.nu[k] * std::log(ts[i]);
            sd.phi[k] = pfit.solve(yr)[0];
        }
    }
    const Snapshot& half = nearest_snapshot(tr, T / 2);
    for (std::size_t k = 0; k < n; ++k) {
        sd.extraction_error = std::max(sd.extraction_error, std::abs(last.w_hat.values[k] - half.w_hat.values[k]));
        double a = last.chi[k] - sd.nu[k] * std::log(last.t);
        double b = half.chi[k] - sd.nu[k] * std::log(half.t);
        sd.phi_error = std::max(sd.phi_error, std::abs(a - b));
    }
    sd.unconverged = sd.extraction_error > 0.1 * sup_norm(sd.w00.values);
    return sd;
}

RVec unwrap_phase(const CVec& z) {
    const std::size_t n = z.size();
    RVec p(n);
    const std::size_t c = n / 2;
    p[c] = std::arg(z[c]);
    auto wrap = [](double a) { return a - 2.0 * std::numbers::pi * std::round(a / (2.0 * std::numbers::pi)); };
    for (std::size_t k = c + 1; k < n; ++k) p[k] = p[k - 1] + wrap(std::arg(z[k]) - std::arg(z[k - 1]));
    for (std::size_t k = c; k-- > 0;) p[k] = p[k + 1] + wrap(std::arg(z[k]) - std::arg(z[k + 1]));
    return p;
}

namespace {

std::vector<std::uint8_t> rho_mask(const CVec& w, double floor) {
    double mx = sup_norm(w);
    std::vector<std::uint8_t> m(w.size(), 0);
    for (std::size_t k = 0; k < w.size(); ++k) m[k] = mx > 0.0 && std::abs(w[k]) >= floor * mx;
    return m;
}

void apply_mask(ExpansionOrder1& e) {
    for (std::size_t k = 0; k < e.mask.size(); ++k) {
        if (e.mask[k]) continue;
        for (SpectralField* f : {&e.w10, &e.w11, &e.w12, &e.f10, &e.f11, &e.f12, &e.u10, &e.u11, &e.u12})
            f->values[k] = 0.0;
        e.F10[k] = 0.0;
        e.F11[k] = 0.0;
    }
}

ExpansionOrder1 blank(const GridSpec& g) {
    ExpansionOrder1 e;
    for (SpectralField* f : {&e.w10, &e.w11, &e.w12, &e.f10, &e.f11, &e.f12, &e.u10, &e.u11, &e.u12})
        *f = SpectralField(g);
    e.F10.assign(g.n, 0.0);
    e.F11.assign(g.n, 0.0);
    return e;
}

// Real ingredients of the polar form: e^{-i zeta} times each coefficient.
struct Reduced {
    RVec rho, zeta;
    CVec w10, w11, f10, f11, u10, u11, u12;
    RVec chi10;
};

Reduced reduced_coeffs(const ScatteringData& sd, double l1, double l2) {
    const GridSpec& g = sd.w00.grid;
    const std::size_t n = g.n;
    const double h = g.dxi();
    Reduced r;
    r.rho.resize(n);
    for (std::size_t k = 0; k < n; ++k) r.rho[k] = std::abs(sd.w00.values[k]);
    r.zeta = unwrap_phase(sd.w00.values);
    RVec rp = fd_derivative(r.rho, h, 1), rpp = fd_derivative(r.rho, h, 2);
    RVec zp = fd_derivative(r.zeta, h, 1), zpp = fd_derivative(r.zeta, h, 2);
    RVec pp1 = fd_derivative(sd.phi, h, 1), pp2 = fd_derivative(sd.phi, h, 2);
    RVec np1 = fd_derivative(sd.nu, h, 1), np2 = fd_derivative(sd.nu, h, 2);
    for (CVec* v : {&r.w10, &r.w11, &r.f10, &r.f11, &r.u10, &r.u11, &r.u12}) v->assign(n, 0.0);
    r.chi10.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double p = r.rho[k], p3 = p * p * p;
        const double a = 3.0 * p * rp[k] * rp[k] + p * p * rpp[k];
        r.w10[k] = -l1 * (a + I * (-zpp[k] + pp2[k] + np2[k]) * p3) + I * l2 * p3 * p * p;
        r.w11[k] = -I * l1 * np2[k] * p3;
        r.chi10[k] = 2.0 * l1 * l1 * p * a;
        r.f10[k] = r.w10[k] - I * r.chi10[k] * p;
        r.f11[k] = r.w11[k];
        const double dz = zp[k] - pp1[k];
        r.u10[k] = r.f10[k] - 0.5 * I * rpp[k] + dz * rp[k] + 0.5 * (zpp[k] - pp2[k]) * p + 0.5 * I * dz * dz * p;
        r.u11[k] = r.f11[k] - np1[k] * rp[k] - 0.5 * np2[k] * p - I * np1[k] * dz * p;
        r.u12[k] = 0.5 * I * np1[k] * np1[k] * p;
    }
    return r;
}

} // namespace

ExpansionOrder1 appendix_coeffs(const ScatteringData& sd, double l1, double l2, const AppendixOptions& opt) {
    const GridSpec& g = sd.w00.grid;
    const std::size_t n = g.n;
    const double h = g.dxi();
    ExpansionOrder1 e = blank(g);
    e.mask = rho_mask(sd.w00.values, opt.rho_floor);
    if (std::none_of(e.mask.begin(), e.mask.end(), [](std::uint8_t m) { return m != 0; }))
        throw Error(Errc::empty_window, "appendix: rho floor leaves no evaluation window");
    const CVec& w0 = sd.w00.values;
    CVec wp = fd_derivative(w0, h, 1), wpp = fd_derivative(w0, h, 2);
    RVec p1 = fd_derivative(sd.phi, h, 1), p2 = fd_derivative(sd.phi, h, 2);
    RVec n1 = fd_derivative(sd.nu, h, 1), n2 = fd_derivative(sd.nu, h, 2);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx w = w0[k], a = wp[k], b = wpp[k];
        const double r2 = std::norm(w);
        const cplx Pw = 2.0 * w * std::norm(a) + a * a * std::conj(w) + w * w * std::conj(b);
        cplx w10 = -l1 * (Pw + I * p2[k] * r2 * w + I * n2[k] * r2 * w) + I * l2 * r2 * r2 * w;
        cplx w11 = -I * l1 * n2[k] * r2 * w;
        if (opt.flip_w11_sign) w11 = -w11;
        // chi = nu ln t + phi + (chi10 + chi11 ln t)/t + ..., from integrating
        // lambda_1 |w|^2 / s with |w|^2 = |w00|^2 + 2 Re(conj(w00)(w10 + w11 ln s))/s.
        const double c10 = -2.0 * l1 * (std::real(std::conj(w) * w10) + std::real(std::conj(w) * w11));
        const double c11 = -2.0 * l1 * std::real(std::conj(w) * w11);
        e.w10.values[k] = w10;
        e.w11.values[k] = w11;
        e.F10[k] = I * c10;
        e.F11[k] = I * c11;
        const cplx f10 = w10 - I * c10 * w;
        const cplx f11 = w11 - I * c11 * w;
        e.f10.values[k] = f10;
        e.f11.values[k] = f11;
        // Second-order stationary phase of e^{it Delta/2} acting on e^{-i(nu ln t + phi)} w00.
        e.u10.values[k] = f10 - 0.5 * I * b - p1[k] * a - 0.5 * p2[k] * w + 0.5 * I * p1[k] * p1[k] * w;
        e.u11.values[k] = f11 - n1[k] * a - 0.5 * n2[k] * w + I * p1[k] * n1[k] * w;
        e.u12.values[k] = 0.5 * I * n1[k] * n1[k] * w;
    }
    apply_mask(e);
    return e;
}

ExpansionOrder1 appendix_coeffs_polar(const ScatteringData& sd, double l1, double l2, const AppendixOptions& opt) {
    const GridSpec& g = sd.w00.grid;
    ExpansionOrder1 e = blank(g);
    e.mask = rho_mask(sd.w00.values, opt.rho_floor);
    if (std::none_of(e.mask.begin(), e.mask.end(), [](std::uint8_t m) { return m != 0; }))
        throw Error(Errc::empty_window, "appendix: rho floor leaves no evaluation window");
    Reduced r = reduced_coeffs(sd, l1, l2);
    for (std::size_t k = 0; k < g.n; ++k) {
        const cplx ez = std::polar(1.0, r.zeta[k]);
        e.w10.values[k] = ez * r.w10[k];
        e.w11.values[k] = ez * (opt.flip_w11_sign ? -r.w11[k] : r.w11[k]);
        e.F10[k] = I * r.chi10[k];
        e.f10.values[k] = ez * r.f10[k];
        e.f11.values[k] = ez * r.f11[k];
        e.u10.values[k] = ez * r.u10[k];
        e.u11.values[k] = ez * r.u11[k];
        e.u12.values[k] = ez * r.u12[k];
    }
    apply_mask(e);
    return e;
}

std::vector<std::uint8_t> interior_window(const SpectralField& w00, double frac) {
    return rho_mask(w00.values, frac);
}

double relative_sup_distance(const CVec& a, const CVec& ref, const std::vector<std::uint8_t>& mask) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!mask[k]) continue;
        num = std::max(num, std::abs(a[k] - ref[k]));
        den = std::max(den, std::abs(ref[k]));
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
    return num / den;
}

Order1Fit fit_order1(const Trajectory& tr, const ScatteringData& sd, const FitOptions& opt) {
    const double T = tr.snaps.back().t;
    auto win = window_snaps(tr, opt.window_fraction * T);
    std::size_t late = 0;
    for (auto* s : win) late += s->t >= 20.0;
    if (late < 10)
        throw Error(Errc::too_few_points, "fit_order1: need >= 10 snapshots with t >= 20 in the window");
    RVec ts;
    for (auto* s : win) ts.push_back(s->t);
    std::vector<BasisFn> basis{[](double t) { return 1.0 / t; }, log_over_t};
    if (opt.three_basis) basis.push_back([](double t) { return std::log(t) * std::log(t) / t; });
    if (opt.nuisance) {
        basis.push_back([](double t) { return 1.0 / (t * t); });
        basis.push_back([](double t) { return std::log(t) / (t * t); });
    }
    TimeBasisFit fit(ts, basis);
    if (fit.condition() > opt.max_condition) {
        std::ostringstream os;
        os << "fit_order1: condition number " << fit.condition() << " exceeds " << opt.max_condition
           << "; widen the window";
        throw Error(Errc::ill_conditioned, os.str());
    }
    const std::size_t n = tr.grid.n;
    Order1Fit out;
    out.condition = fit.condition();
    out.samples = ts.size();
    out.w10_emp = SpectralField(tr.grid);
    out.w11_emp = SpectralField(tr.grid);
    out.w12_emp = SpectralField(tr.grid);
    if (opt.three_basis) out.w12_se.assign(n, 0.0);
    CVec y(ts.size());
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < win.size(); ++i) y[i] = win[i]->w_hat.values[k] - sd.w00.values[k];
        CVec c = fit.solve(y);
        out.w10_emp.values[k] = c[0];
        out.w11_emp.values[k] = c[1];
        if (opt.three_basis) {
            out.w12_emp.values[k] = c[2];
            out.w12_se[k] = fit.standard_errors(y)[2];
        }
    }
    auto mask = interior_window(sd.w00);
    RVec res(ts.size(), 0.0);
    for (std::size_t i = 0; i < win.size(); ++i) {
        const double t = ts[i];
        for (std::size_t k = 0; k < n; ++k) {
            if (!mask[k]) continue;
            cplx model = sd.w00.values[k] + out.w10_emp.values[k] / t + out.w11_emp.values[k] * std::log(t) / t;
            res[i] = std::max(res[i], std::abs(win[i]->w_hat.values[k] - model));
        }
    }
    // An exact model leaves no positive residuals to regress; keep the empty rate then.
    if (std::count_if(res.begin(), res.end(), [](double r) { return r > 0.0; }) >= 2)
        out.residual_rate = fit_rate(ts, res);
    return out;
}

MaskedField u_asymptotic(const ScatteringData& sd, const ExpansionOrder1* exp1, double t, const GridSpec& grid,
                         int order) {
    if (order < 0 || order > 1) throw Error(Errc::not_implemented, "u_asymptotic: order must be 0 or 1");
    if (order == 1 && !exp1) throw Error(Errc::invalid_argument, "u_asymptotic: order 1 needs coefficients");
    const GridSpec& fg = sd.w00.grid;
    const double x0 = fg.xi(0), h = fg.dxi();
    const double xmax = kAsymptoticWindow * t * fg.xi_max();
    const double lt = std::log(t);
    const cplx pref = 1.0 / std::sqrt(cplx(0.0, t));
    MaskedField out{SpatialField(grid), std::vector<std::uint8_t>(grid.n, 0)};
    std::size_t used = 0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        if (std::abs(x) > xmax) continue;
        const double q = x / t;
        cplx w;
        double nu, phi;
        if (!lagrange4(sd.w00.values, x0, h, q, w) || !lagrange4(sd.nu, x0, h, q, nu) ||
            !lagrange4(sd.phi, x0, h, q, phi))
            continue;
        cplx sum = w;
        if (order == 1) {
            cplx a, b, c;
            lagrange4(exp1->u10.values, x0, h, q, a);
            lagrange4(exp1->u11.values, x0, h, q, b);
            lagrange4(exp1->u12.values, x0, h, q, c);
            sum += (a + b * lt + c * lt * lt) / t;
        }
        out.field.values[j] = std::polar(1.0, x * x / (2.0 * t) - nu * lt - phi) * pref * sum;
        out.mask[j] = 1;
        ++used;
    }
    if (used == 0) throw Error(Errc::empty_window, "u_asymptotic: evaluation window is empty");
    return out;
}

JinSegurCoeffs jin_segur_coeffs(const ScatteringData& sd, const ExpansionOrder1& exp1, double l1, double l2) {
    const GridSpec& g = sd.w00.grid;
    const std::size_t n = g.n;
    Reduced r = reduced_coeffs(sd, l1, l2);
    JinSegurCoeffs js;
    js.alpha = -l1 / 2.0;
    js.general_alpha = !(l1 == 2.0 || l1 == -2.0);
    // h(eta) = rho(eta / sqrt 2): sample on eta_k = sqrt(2) xi_k, so every field is a plain relabeling.
    const double s2 = std::sqrt(2.0);
    for (std::size_t k = 0; k < n; ++k) {
        js.eta.push_back(s2 * g.xi(k));
        js.h.push_back(r.rho[k]);
        js.h10.push_back(r.u10[k].real());
        js.h11.push_back(r.u11[k].real());
        js.h12.push_back(r.u12[k].real());
        js.theta20_h.push_back(r.u10[k].imag());
        js.theta21_h.push_back(r.u11[k].imag());
        js.theta22_h.push_back(r.u12[k].imag());
    }
    js.mask = exp1.mask;
    return js;
}

RVec jin_segur_h11_from_h(const JinSegurCoeffs& js) {
    const double h = js.eta[1] - js.eta[0];
    RVec d1 = fd_derivative(js.h, h, 1), d2 = fd_derivative(js.h, h, 2);
    RVec out(js.h.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = 4.0 * js.alpha * (3.0 * js.h[k] * d1[k] * d1[k] + js.h[k] * js.h[k] * d2[k]);
    return out;
}

} // namespace modscat
