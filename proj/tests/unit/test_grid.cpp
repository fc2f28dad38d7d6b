#include "modscat/error.hpp"
#include "modscat/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace modscat;

namespace {

SpatialField gaussian_x(const GridSpec& g, double s = 1.0) {
    SpatialField f(g);
    for (std::size_t j = 0; j < g.n; ++j) f.values[j] = std::exp(-g.x(j) * g.x(j) / (2 * s * s));
    return f;
}

SpectralField gaussian_xi(const GridSpec& g, double a = 0.5) {
    SpectralField f(g);
    for (std::size_t k = 0; k < g.n; ++k) f.values[k] = std::exp(-a * g.xi(k) * g.xi(k));
    return f;
}

// Smooth random field: a few random Gaussian bumps with random phases.
SpatialField smooth_random(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    SpatialField f(g);
    for (int b = 0; b < 6; ++b) {
        double c = 0.5 * g.L * U(rng), w = 1.0 + std::abs(U(rng)) * 3.0, k = 2.0 * U(rng);
        cplx a(U(rng), U(rng));
        for (std::size_t j = 0; j < g.n; ++j) {
            double y = (g.x(j) - c) / w;
            f.values[j] += a * std::exp(-y * y) * std::polar(1.0, k * g.x(j));
        }
    }
    return f;
}

double max_abs_diff(const CVec& a, const CVec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

TEST(Grid, RejectsNonPowerOfTwo) {
    EXPECT_THROW(GridSpec(1000, 10.0), Error);
    EXPECT_THROW(GridSpec(8, 10.0), Error);
    EXPECT_THROW(GridSpec(1024, -1.0), Error);
}

TEST(Grid, NodesAreSortedAndCentered) {
    GridSpec g(64, 8.0);
    EXPECT_DOUBLE_EQ(g.x(0), -8.0);
    EXPECT_DOUBLE_EQ(g.xi(32), 0.0);
    EXPECT_NEAR(g.dx() * g.dxi() * 64, 2 * std::numbers::pi, 1e-13);
    RVec xs = g.xi_nodes();
    EXPECT_TRUE(std::is_sorted(xs.begin(), xs.end()));
}

TEST(Transform, GaussianIsItsOwnTransform) {
    GridSpec g(1024, 20.0);
    SpectralField F = forward_transform(gaussian_x(g));
    EXPECT_LE(max_abs_diff(F.values, gaussian_xi(g).values), 1e-10);
}

TEST(Transform, InverseOfGaussianPair) {
    GridSpec g(1024, 20.0);
    SpatialField f = inverse_transform(gaussian_xi(g));
    EXPECT_LE(max_abs_diff(f.values, gaussian_x(g).values), 1e-10);
}

TEST(Transform, ZeroMapsToZero) {
    GridSpec g(256, 10.0);
    SpectralField F = forward_transform(SpatialField(g));
    for (const auto& v : F.values) EXPECT_EQ(v, cplx(0.0));
}

TEST(Transform, ZeroFrequencyBinGivesConstant) {
    GridSpec g(256, 10.0);
    SpectralField F(g);
    F.values[g.n / 2] = 2.0 * g.L / static_cast<double>(g.n) / std::sqrt(2 * std::numbers::pi);
    SpatialField f = inverse_transform(F);
    for (const auto& v : f.values) EXPECT_NEAR(std::abs(v - f.values[0]), 0.0, 1e-15);
    EXPECT_GT(std::abs(f.values[0]), 0.0);
}

TEST(Transform, PlancherelAndRoundtrip) {
    GridSpec g(2048, 60.0);
    for (unsigned seed : {1u, 2u, 3u}) {
        SpatialField f = smooth_random(g, seed);
        SpectralField F = forward_transform(f);
        double nx = l2_norm(f.values, g.dx()), nk = l2_norm(F.values, g.dxi());
        EXPECT_LE(std::abs(nx - nk), 1e-12 * nx);
        SpatialField back = inverse_transform(F);
        double err = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) err += std::norm(back.values[j] - f.values[j]);
        EXPECT_LE(std::sqrt(err * g.dx()), 1e-12 * nx);
    }
}

TEST(Transform, RejectsNonFinite) {
    GridSpec g(64, 5.0);
    SpatialField f(g);
    f.values[3] = std::numeric_limits<double>::quiet_NaN();
    try {
        forward_transform(f);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::non_finite);
    }
    SpectralField F(g);
    F.values[0] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(inverse_transform(F), Error);
}

TEST(XiDerivative, OddDerivativeOfEvenGaussianVanishesAtZero) {
    GridSpec g(1024, 32.0);
    SpectralField d = xi_derivative(gaussian_xi(g), 1);
    EXPECT_LE(std::abs(d.values[g.n / 2]), 1e-10);
    EXPECT_FALSE(d.tail_warning);
}

TEST(XiDerivative, SecondDerivativeOfGaussian) {
    // 5-point stencil truncation is h^4 |f^(6)(0)| / 90 = 7.7e-6 at d xi = 0.049; use d xi ~ 0.025.
    GridSpec g(2048, 128.0);
    ASSERT_LE(g.dxi(), 0.05);
    SpectralField d = xi_derivative(gaussian_xi(g, 1.0), 2);
    EXPECT_NEAR(d.values[g.n / 2].real(), -2.0, 1e-6);
}

TEST(XiDerivative, ConstantHasZeroDerivativeAndWarns) {
    GridSpec g(128, 10.0);
    SpectralField c(g, CVec(g.n, cplx(3.0, -1.0)));
    for (int order = 1; order <= 4; ++order) {
        SpectralField d = xi_derivative(c, order);
        EXPECT_TRUE(d.tail_warning);
        for (const auto& v : d.values) EXPECT_LE(std::abs(v), 1e-9);
    }
}

TEST(XiDerivative, ExactOnLowDegreePolynomials) {
    const double h = 0.1;
    RVec p(40);
    for (std::size_t i = 0; i < p.size(); ++i) {
        double x = static_cast<double>(i) * h;
        p[i] = 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
    }
    RVec d1 = fd_derivative(p, h, 1), d2 = fd_derivative(p, h, 2), d3 = fd_derivative(p, h, 3);
    for (std::size_t i = 0; i < p.size(); ++i) {
        double x = static_cast<double>(i) * h;
        EXPECT_NEAR(d1[i], -2.0 + x - 0.75 * x * x, 1e-9);
        EXPECT_NEAR(d2[i], 1.0 - 1.5 * x, 1e-8);
        EXPECT_NEAR(d3[i], -1.5, 1e-6);
    }
    EXPECT_THROW(fd_derivative(p, h, 5), Error);
}

TEST(WeightedNorm, GaussianMoments) {
    GridSpec g(2048, 40.0);
    EXPECT_EQ(weighted_l2_norm(SpatialField(g), 1.0), 0.0);
    SpatialField f = gaussian_x(g);
    EXPECT_NEAR(weighted_l2_norm(f, 0.0), std::pow(std::numbers::pi, 0.25), 1e-8);
    EXPECT_NEAR(weighted_l2_norm(f, 1.0), std::sqrt(1.5 * std::sqrt(std::numbers::pi)), 1e-8);
}

TEST(Interpolation, CubicIsExactOnCubics) {
    RVec f(20);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double x = 0.5 * static_cast<double>(i);
        f[i] = x * x * x - x;
    }
    double v = 0.0;
    ASSERT_TRUE(lagrange4(f, 0.0, 0.5, 3.3, v));
    EXPECT_NEAR(v, 3.3 * 3.3 * 3.3 - 3.3, 1e-12);
    EXPECT_FALSE(lagrange4(f, 0.0, 0.5, 10.0, v));
}
