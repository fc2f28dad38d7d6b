#include "modscat/error.hpp"
#include "modscat/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace modscat;

namespace {

// Free evolution of f1 = eps exp(-x^2 / 2w^2) from time 0, so u(1) = e^{i Delta/2} f1.
cplx free_gaussian(double eps, double w, double t, double x) {
    const cplx z(w * w, t);
    return eps * std::sqrt(w * w / z) * std::exp(-x * x / (2.0 * z));
}

double max_abs_diff(const CVec& a, const CVec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double mass(const SpatialField& u) { return std::pow(l2_norm(u.values, u.grid.dx()), 2); }

} // namespace

TEST(InitialData, ZeroAmplitudeGivesZeroState) {
    GridSpec g(512, 64.0);
    SimulationState s = initial_data_gaussian(0.0, 2.0, g);
    EXPECT_EQ(s.t, 1.0);
    for (const auto& v : s.u.values) EXPECT_EQ(std::abs(v), 0.0);
    for (double c : s.chi) EXPECT_EQ(c, 0.0);
}

TEST(InitialData, GaussianNormAndReportedNorms) {
    GridSpec g(2048, 64.0);
    InitialNorms nrm;
    SimulationState s = initial_data_gaussian(0.1, 1.0, g, &nrm);
    EXPECT_NEAR(l2_norm(s.u.values, g.dx()), 0.1 * std::pow(std::numbers::pi, 0.25), 1e-8);
    EXPECT_GT(nrm.u1_h10, l2_norm(s.u.values, g.dx()));
    EXPECT_GT(nrm.f1_h03, l2_norm(s.u.values, g.dx()));
}

TEST(InitialData, RejectsUnderResolvedWidthAndLargeAmplitude) {
    GridSpec g(256, 128.0); // dx = 1
    try {
        initial_data_gaussian(0.1, 4.0, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::under_resolved);
    }
    EXPECT_THROW(initial_data_gaussian(0.6, 8.0, g), Error);
}

TEST(Solver, FreeEvolutionMatchesClosedForm) {
    GridSpec g(2048, 128.0);
    const double eps = 0.1, w = 2.0;
    SimulationState s = initial_data_gaussian(eps, w, g);
    NonlinearitySpec nl({0.0});
    advance_uniform(s, 4.0, 600, nl);
    double err = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(s.u.values[j] - free_gaussian(eps, w, 4.0, g.x(j))));
    EXPECT_LE(err, 1e-9);
}

TEST(Solver, LinearStepIsExactPropagator) {
    GridSpec g(1024, 64.0);
    SimulationState s = initial_data_gaussian(0.1, 2.0, g);
    SimulationState s1 = step(s, 0.01, NonlinearitySpec({0.0}));
    double err = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(s1.u.values[j] - free_gaussian(0.1, 2.0, 1.01, g.x(j))));
    EXPECT_LE(err, 1e-15);
    EXPECT_EQ(s1.step_count, 1);
    EXPECT_DOUBLE_EQ(s1.t, 1.01);
}

TEST(Solver, NonlinearSubstepIsExactRotation) {
    GridSpec g(512, 64.0);
    SimulationState s = initial_data_gaussian(0.3, 2.0, g);
    StepOptions off;
    off.kinetic = false;
    const double dt = 0.01, lam = 1.0;
    SimulationState s1 = step(s, dt, NonlinearitySpec({lam}), off);
    // The FFT round trip of the disabled kinetic substep adds ~1e-17 absolute noise,
    // so phases are compared where |u| is not tiny.
    const double mx = sup_norm(s.u.values);
    for (std::size_t j = 0; j < g.n; ++j) {
        const cplx a = s.u.values[j], b = s1.u.values[j];
        EXPECT_NEAR(std::abs(b), std::abs(a), 1e-14);
        EXPECT_LE(std::abs(b - a * std::polar(1.0, -dt * lam * std::norm(a))), 1e-15);
        if (std::abs(a) > 1e-2 * mx) EXPECT_NEAR(std::arg(b / a), -dt * lam * std::norm(a), 1e-14);
    }
}

TEST(Solver, MassPerStep) {
    GridSpec g(1024, 64.0);
    SimulationState s = initial_data_gaussian(0.1, 2.0, g);
    NonlinearitySpec nl({1.0, 0.5});
    const double m0 = mass(s.u);
    for (int i = 0; i < 5; ++i) {
        SimulationState s1 = step(s, 0.005, nl);
        EXPECT_LE(std::abs(mass(s1.u) - mass(s.u)), 1e-13 * m0);
        s = s1;
    }
}

TEST(Solver, StepRejectsLargeDtAndNonFinite) {
    GridSpec g(256, 32.0);
    SimulationState s = initial_data_gaussian(0.1, 2.0, g);
    EXPECT_THROW(step(s, 0.02, NonlinearitySpec({1.0})), Error);
    s.u.values[10] = std::numeric_limits<double>::quiet_NaN();
    try {
        step(s, 0.005, NonlinearitySpec({1.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::non_finite);
        EXPECT_NE(std::string(e.what()).find("last good"), std::string::npos);
    }
}

TEST(Solver, GaugeCovariance) {
    GridSpec g(1024, 64.0);
    SimulationState a = initial_data_gaussian(0.2, 2.0, g), b = a;
    const cplx phase = std::polar(1.0, 0.7);
    for (auto& v : b.u.values) v *= phase;
    NonlinearitySpec nl({1.0, -0.5});
    advance_uniform(a, 3.0, 400, nl);
    advance_uniform(b, 3.0, 400, nl);
    double err = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(b.u.values[j] - phase * a.u.values[j]));
    EXPECT_LE(err, 1e-14);
}

TEST(Solver, TimeReversal) {
    GridSpec g(1024, 64.0);
    SimulationState s0 = initial_data_gaussian(0.2, 2.0, g);
    NonlinearitySpec nl({1.0, 0.5});
    SimulationState s = s0;
    advance_uniform(s, 2.0, 200, nl);
    advance_uniform(s, 1.0, 200, nl);
    EXPECT_LE(max_abs_diff(s.u.values, s0.u.values), 1e-8);
}

TEST(Conserved, ZeroAndFreeGaussianEnergy) {
    GridSpec g(2048, 64.0);
    auto z = conserved_quantities(SpatialField(g), NonlinearitySpec({1.0}));
    EXPECT_EQ(z.mass, 0.0);
    EXPECT_EQ(z.energy, 0.0);
    const double eps = 0.1, w = 2.0;
    SimulationState s = initial_data_gaussian(eps, w, g);
    auto q = conserved_quantities(s.u, NonlinearitySpec({0.0}));
    EXPECT_NEAR(q.mass, eps * eps * std::sqrt(std::numbers::pi) * w, 1e-12);
    EXPECT_NEAR(q.energy, eps * eps * std::sqrt(std::numbers::pi) / (4.0 * w), 1e-8);
}

TEST(Schedule, OutputTimesAndDt) {
    SolverConfig c;
    c.T = 10.0;
    c.checkpoints = {3.0};
    auto ts = output_times(c);
    EXPECT_DOUBLE_EQ(ts.front(), 1.0);
    EXPECT_DOUBLE_EQ(ts.back(), 10.0);
    EXPECT_NE(std::find(ts.begin(), ts.end(), 3.0), ts.end());
    EXPECT_TRUE(std::is_sorted(ts.begin(), ts.end()));
    EXPECT_DOUBLE_EQ(scheduled_dt(c, 1.0), c.dt_base / 10.0);
    EXPECT_DOUBLE_EQ(scheduled_dt(c, 500.0), c.dt_base);
    c.dt_base = 0.02;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Run, FreeProfileIsFrozenAndChiVanishes) {
    GridSpec g(1024, 128.0);
    SimulationState s0 = initial_data_gaussian(0.1, 2.0, g);
    SolverConfig c;
    c.T = 20.0;
    c.dt_base = 0.01;
    Trajectory tr = run(s0, c, NonlinearitySpec({0.0}));
    const CVec& f1 = tr.snaps.front().f_hat.values;
    for (const auto& sn : tr.snaps) {
        EXPECT_LE(max_abs_diff(sn.w_hat.values, f1), 1e-12);
        for (double x : sn.chi) EXPECT_EQ(x, 0.0);
    }
    EXPECT_FALSE(tr.alias_flag);
}

TEST(Run, ModifiedProfileIsUnimodularImage) {
    GridSpec g(1024, 128.0);
    SolverConfig c;
    c.T = 20.0;
    c.dt_base = 0.01;
    Trajectory tr = run(initial_data_gaussian(0.2, 2.0, g), c, NonlinearitySpec({1.0}));
    for (const auto& sn : tr.snaps) {
        double mx = sup_norm(sn.f_hat.values);
        for (std::size_t k = 0; k < g.n; ++k)
            EXPECT_LE(std::abs(std::abs(sn.w_hat.values[k]) - std::abs(sn.f_hat.values[k])), 1e-13 * mx);
    }
    // lambda_1 > 0: chi is nondecreasing in t at every node.
    for (std::size_t i = 1; i < tr.snaps.size(); ++i)
        for (std::size_t k = 0; k < g.n; k += 7) EXPECT_GE(tr.snaps[i].chi[k], tr.snaps[i - 1].chi[k]);
}

TEST(Run, RichardsonRatioNearFour) {
    GridSpec g(1024, 128.0);
    SolverConfig c;
    c.T = 4.0;
    c.dt_base = 0.01;
    c.richardson_check = true;
    Trajectory tr = run(initial_data_gaussian(0.2, 2.0, g), c, NonlinearitySpec({1.0, 0.5}));
    EXPECT_GE(tr.richardson_ratio, 3.5);
    EXPECT_LE(tr.richardson_ratio, 4.5);
}

TEST(Run, RestartFromOutputTimeIsBitIdentical) {
    GridSpec g(512, 64.0);
    SolverConfig c;
    c.T = 8.0;
    c.dt_base = 0.01;
    c.checkpoints = {3.0};
    NonlinearitySpec nl({1.0});
    SimulationState s0 = initial_data_gaussian(0.2, 2.0, g);
    Trajectory whole = run(s0, c, nl);
    const Snapshot& mid = whole.at(3.0);
    Trajectory rest = run(SimulationState{mid.t, mid.u, mid.chi, mid.step_count}, c, nl);
    EXPECT_EQ(rest.snaps.back().step_count, whole.snaps.back().step_count);
    EXPECT_EQ(max_abs_diff(rest.snaps.back().u.values, whole.snaps.back().u.values), 0.0);
    EXPECT_THROW(whole.at(3.5), Error);
}
