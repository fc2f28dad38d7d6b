#include "modscat/solver.hpp"
#include "modscat/fourier.hpp"
#include "modscat/norms.hpp"
#include "modscat/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace modscat {

NonlinearitySpec::NonlinearitySpec(RVec l) : lambdas(std::move(l)) { validate(); }

bool NonlinearitySpec::free_mode() const {
    return std::all_of(lambdas.begin(), lambdas.end(), [](double l) { return l == 0.0; });
}

void NonlinearitySpec::validate() const {
    if (lambdas.empty() || lambdas.size() > 4)
        throw Error(Errc::invalid_argument, "nonlinearity: need 1 <= d <= 4 coefficients");
    for (double l : lambdas)
        if (!std::isfinite(l)) throw Error(Errc::invalid_argument, "nonlinearity: non-finite lambda");
}

void SolverConfig::validate() const {
    if (!(dt_base > 0.0) || dt_base > 0.01)
        throw Error(Errc::invalid_argument, "solver: dt_base must be in (0, 0.01]");
    if (!(ratio > 1.0)) throw Error(Errc::invalid_argument, "solver: output ratio must exceed 1");
    if (t0 != 1.0) throw Error(Errc::invalid_argument, "solver: t0 must be 1");
    if (!(T >= t0)) throw Error(Errc::invalid_argument, "solver: T must be >= t0");
    if (step_multiplier < 1) throw Error(Errc::invalid_argument, "solver: step_multiplier < 1");
}

std::vector<double> output_times(const SolverConfig& cfg) {
    std::vector<double> ts{cfg.t0};
    for (int m = 1;; ++m) {
        double t = cfg.t0 * std::pow(cfg.ratio, m);
        if (t >= cfg.T * (1.0 - 1e-12)) break;
        ts.push_back(t);
    }
    if (cfg.T > cfg.t0) ts.push_back(cfg.T);
    for (double c : cfg.checkpoints)
        if (c > cfg.t0 && c < cfg.T) ts.push_back(c);
    std::sort(ts.begin(), ts.end());
    std::vector<double> out;
    for (double t : ts)
        if (out.empty() || t - out.back() > 1e-12 * t) out.push_back(t);
    return out;
}

double scheduled_dt(const SolverConfig& cfg, double t) {
    return std::min({cfg.dt_base, cfg.dt_base * t / 10.0, 0.01});
}

namespace {

// e^{i theta}; a Taylor polynomial for the tiny phases of the nonlinear
// substep, exact to rounding for |theta| < 1e-2 and much cheaper than sincos.
inline cplx unit_phase(double th) {
    if (std::abs(th) < 1e-2) {
        double t2 = th * th;
        double c = 1.0 - t2 * (0.5 - t2 * (1.0 / 24 - t2 * (1.0 / 720 - t2 / 40320)));
        double s = th * (1.0 - t2 * (1.0 / 6 - t2 * (1.0 / 120 - t2 * (1.0 / 5040 - t2 / 362880))));
        return {c, s};
    }
    return std::polar(1.0, th);
}

} // namespace

SimulationState initial_data_tabulated(const SpatialField& f1, InitialNorms* norms) {
    require_finite(f1.values, "initial data");
    SpectralField fh = forward_transform(f1);
    for (std::size_t k = 0; k < f1.grid.n; ++k) {
        double xi = f1.grid.xi(k);
        fh.values[k] *= std::polar(1.0, -0.5 * xi * xi);
    }
    SimulationState s;
    s.t = 1.0;
    s.u = inverse_transform(fh);
    s.chi.assign(f1.grid.n, 0.0);
    s.step_count = 0;
    if (norms) {
        norms->u1_h10 = h10_norm(s.u);
        norms->f1_h03 = weighted_l2_norm(f1, 3.0);
    }
    return s;
}

SimulationState initial_data_gaussian(double eps, double w, const GridSpec& grid, InitialNorms* norms) {
    if (!(eps >= 0.0) || eps > 0.5)
        throw Error(Errc::invalid_argument, "initial data: amplitude must be in [0, 0.5]");
    if (!(w >= 8.0 * grid.dx())) {
        std::ostringstream os;
        os << "initial data: width " << w << " under-resolved, need w >= 8 dx = " << 8.0 * grid.dx();
        throw Error(Errc::under_resolved, os.str());
    }
    SpatialField f1(grid);
    for (std::size_t j = 0; j < grid.n; ++j) {
        double x = grid.x(j);
        f1.values[j] = eps * std::exp(-x * x / (2.0 * w * w));
    }
    return initial_data_tabulated(f1, norms);
}

void advance_uniform(SimulationState& s, double t_end, long long ns, const NonlinearitySpec& nl,
                     const StepOptions& opt) {
    if (ns < 1) throw Error(Errc::invalid_argument, "advance: need at least one step");
    const GridSpec& g = s.u.grid;
    const std::size_t n = g.n;
    const double t_start = s.t;
    const double h = (t_end - t_start) / static_cast<double>(ns);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double lam1 = nl.lambda(1);
    const int d = nl.degree();
    const double c2 = g.dx() * g.dx() / (2.0 * std::numbers::pi);

    CVec kh(n), kf(n);
    for (std::size_t k = 0; k < n; ++k) {
        double q = opt.kinetic ? 0.5 * g.xi(k) * g.xi(k) : 0.0;
        kh[k] = std::polar(inv_n, -0.5 * h * q);
        kf[k] = std::polar(inv_n, -h * q);
    }
    if (s.chi.size() != n) s.chi.assign(n, 0.0);

    FftPlan& p = thread_plan(n);
    cplx* a = p.data();
    for (std::size_t j = 0; j < n; ++j) a[j] = (j & 1) ? -s.u.values[j] : s.u.values[j];
    p.forward();

    RVec p0;
    if (lam1 != 0.0) {
        p0.resize(n);
        for (std::size_t k = 0; k < n; ++k) p0[k] = c2 * std::norm(a[k]);
    }

    for (long long i = 0; i < ns; ++i) {
        const cplx* mult = i == 0 ? kh.data() : kf.data();
        for (std::size_t k = 0; k < n; ++k) a[k] *= mult[k];
        p.backward();
        // Gauge invariance: |u| is constant along the nonlinear flow, so the
        // substep is an exact pointwise rotation.
        for (std::size_t j = 0; j < n; ++j) {
            double r2 = std::norm(a[j]);
            double v = 0.0, pw = 1.0;
            for (int m = 1; m <= d; ++m) {
                pw *= r2;
                v += nl.lambdas[m - 1] * pw;
            }
            if (v != 0.0) a[j] *= unit_phase(-h * v);
        }
        p.forward();
        if (lam1 != 0.0) {
            double ts = t_start + static_cast<double>(i) * h;
            double te = i == ns - 1 ? t_end : t_start + static_cast<double>(i + 1) * h;
            if (std::min(ts, te) >= 10.0) {
                double wl = 0.5 * lam1 * (std::log(te) - std::log(ts));
                for (std::size_t k = 0; k < n; ++k) {
                    double p1 = c2 * std::norm(a[k]);
                    s.chi[k] += wl * (p0[k] + p1);
                    p0[k] = p1;
                }
            } else {
                double w0 = 0.5 * lam1 * h / ts, w1 = 0.5 * lam1 * h / te;
                for (std::size_t k = 0; k < n; ++k) {
                    double p1 = c2 * std::norm(a[k]);
                    s.chi[k] += w0 * p0[k] + w1 * p1;
                    p0[k] = p1;
                }
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) a[k] *= kh[k];
    p.backward();
    for (std::size_t j = 0; j < n; ++j) s.u.values[j] = (j & 1) ? -a[j] : a[j];
    s.t = t_end;
    s.step_count += ns;
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(s.u.values[j].real()) || !std::isfinite(s.u.values[j].imag())) {
            std::ostringstream os;
            os << "solver: non-finite value at t=" << t_end << " after segment starting at t="
               << t_start << " (last good state at that time)";
            throw Error(Errc::non_finite, os.str());
        }
    }
}

SimulationState step(const SimulationState& s, double dt, const NonlinearitySpec& nl,
                     const StepOptions& opt) {
    if (std::abs(dt) > 0.01 || dt == 0.0)
        throw Error(Errc::invalid_argument, "step: |dt| must be in (0, 0.01]");
    SimulationState out = s;
    advance_uniform(out, s.t + dt, 1, nl, opt);
    return out;
}

// With the 1/2 in front of the Laplacian the Hamiltonian density is
// |u_x|^2/2 + sum_n lambda_n |u|^{2n+2}/(n+1); dividing the potential by 2n+2
// instead gives a quantity that drifts at O(eps^4).
ConservedQuantities conserved_quantities(const SpatialField& u, const NonlinearitySpec& nl) {
    ConservedQuantities q;
    const GridSpec& g = u.grid;
    SpectralField uh = forward_transform(u);
    double kin = 0.0;
    for (std::size_t k = 0; k < g.n; ++k) kin += g.xi(k) * g.xi(k) * std::norm(uh.values[k]);
    kin *= 0.5 * g.dxi();
    double mass = 0.0, pot = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        double r2 = std::norm(u.values[j]);
        mass += r2;
        double pw = r2;
        for (int m = 1; m <= nl.degree(); ++m) {
            pw *= r2;
            pot += nl.lambdas[m - 1] * pw / (m + 1.0);
        }
    }
    q.mass = mass * g.dx();
    q.energy = kin + pot * g.dx();
    return q;
}

AliasReport aliasing(const SpatialField& u) {
    const std::size_t n = u.grid.n, m = n / 10;
    auto frac = [&](const CVec& v) {
        double all = 0.0, edge = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double a = std::norm(v[i]);
            all += a;
            if (i < m || i >= n - m) edge += a;
        }
        return all > 0.0 ? edge / all : 0.0;
    };
    AliasReport r;
    r.x_fraction = frac(u.values);
    r.xi_fraction = frac(forward_transform(u).values);
    return r;
}

Snapshot make_snapshot(const SimulationState& s, const NonlinearitySpec& nl) {
    Snapshot sn;
    sn.t = s.t;
    sn.step_count = s.step_count;
    sn.u = s.u;
    sn.chi = s.chi.empty() ? RVec(s.u.grid.n, 0.0) : s.chi;
    sn.f_hat = profile_of(s.u, s.t);
    sn.w_hat = modified_profile(sn.f_hat, sn.chi);
    sn.conserved = conserved_quantities(s.u, nl);
    sn.alias = aliasing(s.u);
    return sn;
}

const Snapshot& Trajectory::at(double t) const {
    for (const auto& s : snaps)
        if (std::abs(s.t - t) <= 1e-12 * t) return s;
    throw Error(Errc::invalid_argument, "trajectory: no snapshot at t=" + std::to_string(t));
}

namespace {

SimulationState integrate(const SimulationState& s0, const SolverConfig& cfg,
                          const NonlinearitySpec& nl, const std::function<void(const SimulationState&)>& emit) {
    std::vector<double> ts = output_times(cfg);
    SimulationState s = s0;
    if (s.chi.size() != s.u.grid.n) s.chi.assign(s.u.grid.n, 0.0);
    if (emit) emit(s);
    for (double te : ts) {
        if (te <= s.t * (1.0 + 1e-14)) continue;
        double span = te - s.t;
        double dt = scheduled_dt(cfg, s.t);
        auto ns = static_cast<long long>(std::ceil(span / dt - 1e-9));
        ns = std::max<long long>(ns, 1) * cfg.step_multiplier;
        advance_uniform(s, te, ns, nl);
        if (emit) emit(s);
    }
    return s;
}

} // namespace

Trajectory run(const SimulationState& s0, const SolverConfig& cfg, const NonlinearitySpec& nl,
               const SnapshotSink& sink) {
    cfg.validate();
    nl.validate();
    if (s0.t < cfg.t0) throw Error(Errc::invalid_argument, "run: initial time before t0");
    Trajectory tr;
    tr.grid = s0.u.grid;
    tr.nl = nl;
    tr.cfg = cfg;
    SimulationState last = integrate(s0, cfg, nl, [&](const SimulationState& s) {
        Snapshot sn = make_snapshot(s, nl);
        if (sn.alias.x_fraction > cfg.alias_threshold || sn.alias.xi_fraction > cfg.alias_threshold)
            tr.alias_flag = true;
        if (sink) sink(sn);
        tr.snaps.push_back(std::move(sn));
    });
    if (cfg.richardson_check) {
        SolverConfig c2 = cfg, c4 = cfg;
        c2.step_multiplier = 2 * cfg.step_multiplier;
        c4.step_multiplier = 4 * cfg.step_multiplier;
        SimulationState s2 = integrate(s0, c2, nl, {});
        SimulationState s4 = integrate(s0, c4, nl, {});
        CVec d12(last.u.values.size()), d24(last.u.values.size());
        for (std::size_t j = 0; j < d12.size(); ++j) {
            d12[j] = last.u.values[j] - s2.u.values[j];
            d24[j] = s2.u.values[j] - s4.u.values[j];
        }
        double den = l2_norm(d24, tr.grid.dx());
        tr.richardson_ratio = den > 0.0 ? l2_norm(d12, tr.grid.dx()) / den : 0.0;
    }
    return tr;
}

} // namespace modscat
