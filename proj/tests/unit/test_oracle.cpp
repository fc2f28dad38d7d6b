#include "modscat/error.hpp"
#include "modscat/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace modscat;

namespace {

SpectralField gaussian(const GridSpec& g, double a, double c = 1.0) {
    SpectralField f(g);
    for (std::size_t k = 0; k < g.n; ++k) f.values[k] = c * std::exp(-a * g.xi(k) * g.xi(k));
    return f;
}

const GridSpec kGrid(8192, 1024.0);

} // namespace

TEST(StationaryCoeff, GaussianValuesAtZero) {
    SpectralField f = gaussian(kGrid, 0.5);
    const std::size_t c = kGrid.n / 2;
    EXPECT_NEAR(std::abs(stationary_coeff(f, 1, 0).values[c] - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(stationary_coeff(f, 1, 1).values[c] - cplx(0.0, -1.0)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(stationary_coeff(f, 2, 0).values[c] - 1.0), 0.0, 1e-14);
}

TEST(StationaryCoeff, HigherOrdersAreRefused) {
    SpectralField f = gaussian(kGrid, 0.5);
    for (auto [n, k] : {std::pair{1, 2}, std::pair{2, 1}, std::pair{3, 0}}) {
        try {
            stationary_coeff(f, n, k);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::not_implemented);
            EXPECT_NE(std::string(e.what()).find("not implemented at order N>1"), std::string::npos);
        }
    }
}

TEST(DirectP1, ZeroProfileGivesZero) {
    OracleResult r = direct_p1({SpectralField(kGrid), 10.0, 1, {0.0, 0.5}});
    for (const auto& v : r.value) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(DirectP1, LeadingStationaryPhaseTerm) {
    SpectralField f = gaussian(kGrid, 0.5);
    const double t = 10.0;
    OracleResult r = direct_p1({f, t, 1, {0.0}});
    // P^1 = |f|^2 f / t + O(t^-2) with |P^1_1(0)| = 1.
    EXPECT_LE(std::abs(r.value[0] - 1.0 / t) * t * t, 1.5);
}

TEST(DirectP1, EvenProfileGivesEvenOutput) {
    // For even f the substitution eta -> -eta maps the integral at xi onto the one at -xi.
    SpectralField f = gaussian(kGrid, 1.0);
    OracleResult r = direct_p1({f, 8.0, 1, {-0.75, 0.75, -0.3, 0.3}});
    EXPECT_LE(std::abs(r.value[0] - r.value[1]), 1e-14 * std::abs(r.value[0]));
    EXPECT_LE(std::abs(r.value[2] - r.value[3]), 1e-14 * std::abs(r.value[2]));
}

TEST(DirectP1, CubicHomogeneity) {
    const double c = 1.7;
    OracleResult a = direct_p1({gaussian(kGrid, 1.0), 6.0, 1, {0.0, 0.4}});
    OracleResult b = direct_p1({gaussian(kGrid, 1.0, c), 6.0, 1, {0.0, 0.4}});
    for (std::size_t i = 0; i < a.value.size(); ++i)
        EXPECT_LE(std::abs(b.value[i] - c * c * c * a.value[i]), 1e-13 * std::abs(b.value[i]));
}

TEST(DirectP1, Errors) {
    SpectralField f = gaussian(kGrid, 1.0);
    try {
        direct_p1({f, 5000.0, 1, {0.0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::under_resolved); // field grid coarser than the phase needs
    }
    SpectralField fine = gaussian(GridSpec(32768, 8192.0), 2.0);
    try {
        direct_p1({fine, 300.0, 1, {0.0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::memory_cap);
    }
    EXPECT_THROW(direct_p1({f, 5.0, 2, {0.0}}), Error);
    SpectralField flat(kGrid, CVec(kGrid.n, cplx(1.0)));
    EXPECT_THROW(direct_p1({flat, 5.0, 1, {0.0}}), Error);
}

TEST(RemainderRate, ScaleInvariantAndNeedsFourTimes) {
    const RVec ts{5.0, 7.0710678118654755, 10.0, 14.142135623730951};
    RateFit a = remainder_rate(gaussian(kGrid, 1.0), 1, 1, ts, {0.0, 0.5});
    RateFit b = remainder_rate(gaussian(kGrid, 1.0, 2.0), 1, 1, ts, {0.0, 0.5});
    EXPECT_NEAR(a.exponent, b.exponent, 1e-9);
    EXPECT_LE(a.exponent, -1.2);
    EXPECT_THROW(remainder_rate(gaussian(kGrid, 1.0), 1, 1, {5.0, 10.0, 20.0}, {0.0}), Error);
}
