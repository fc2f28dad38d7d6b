#include "modscat/grid.hpp"
#include "modscat/fourier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace modscat {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::non_finite: return "non-finite value";
    case Errc::under_resolved: return "under-resolved";
    case Errc::memory_cap: return "memory cap exceeded";
    case Errc::not_implemented: return "not implemented";
    case Errc::empty_window: return "empty window";
    case Errc::ill_conditioned: return "ill-conditioned";
    case Errc::too_few_points: return "too few points";
    case Errc::unconverged: return "unconverged";
    case Errc::config: return "config error";
    case Errc::io: return "i/o error";
    case Errc::version_mismatch: return "version mismatch";
    case Errc::checksum: return "checksum mismatch";
    case Errc::truncated: return "truncated file";
    }
    return "unknown";
}

GridSpec::GridSpec(std::size_t n_points, double half_width) : n(n_points), L(half_width) {
    if (n < 16 || (n & (n - 1)) != 0)
        throw Error(Errc::invalid_argument, "grid: n_points must be a power of two >= 16, got " +
                                                std::to_string(n));
    if (!(L > 0.0) || !std::isfinite(L))
        throw Error(Errc::invalid_argument, "grid: half width must be positive");
}

RVec GridSpec::x_nodes() const {
    RVec v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = x(j);
    return v;
}

RVec GridSpec::xi_nodes() const {
    RVec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = xi(k);
    return v;
}

SpatialField::SpatialField(const GridSpec& g, CVec v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n)
        throw Error(Errc::invalid_argument, "SpatialField: length does not match grid");
}

SpectralField::SpectralField(const GridSpec& g, CVec v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n)
        throw Error(Errc::invalid_argument, "SpectralField: length does not match grid");
}

void require_finite(const CVec& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
            std::ostringstream os;
            os << what << ": non-finite value at index " << i;
            throw Error(Errc::non_finite, os.str());
        }
    }
}

// With x_j = -L + j dx and xi_k = (k - n/2) dxi the kernel e^{-i x_j xi_k}
// factors into (-1)^k (-1)^j e^{-2 pi i jk/n} (n/2 is even), so the sorted
// spectrum is a sign-twisted FFT with no index shift.
SpectralField forward_transform(const SpatialField& field) {
    require_finite(field.values, "forward_transform");
    const std::size_t n = field.grid.n;
    FftPlan& p = thread_plan(n);
    cplx* a = p.data();
    for (std::size_t j = 0; j < n; ++j) a[j] = (j & 1) ? -field.values[j] : field.values[j];
    p.forward();
    const double c = field.grid.dx() / std::sqrt(2.0 * std::numbers::pi);
    SpectralField out(field.grid);
    for (std::size_t k = 0; k < n; ++k) out.values[k] = (k & 1) ? -c * a[k] : c * a[k];
    return out;
}

SpatialField inverse_transform(const SpectralField& field) {
    require_finite(field.values, "inverse_transform");
    const std::size_t n = field.grid.n;
    FftPlan& p = thread_plan(n);
    cplx* a = p.data();
    for (std::size_t k = 0; k < n; ++k) a[k] = (k & 1) ? -field.values[k] : field.values[k];
    p.backward();
    const double c = std::sqrt(2.0 * std::numbers::pi) / (static_cast<double>(n) * field.grid.dx());
    SpatialField out(field.grid);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = (j & 1) ? -c * a[j] : c * a[j];
    return out;
}

namespace {

// Fornberg's recursion for weights of the d-th derivative at 0 on nodes z.
template <std::size_t M>
std::array<double, M> fd_weights(const std::array<double, M>& z, int d) {
    std::array<std::array<double, 5>, M> c{};
    double c1 = 1.0, c4 = z[0];
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < M; ++i) {
        int mn = std::min<int>(static_cast<int>(i), d);
        double c2 = 1.0, c5 = c4;
        c4 = z[i];
        for (std::size_t j = 0; j < i; ++j) {
            double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::array<double, M> w{};
    for (std::size_t i = 0; i < M; ++i) w[i] = c[i][d];
    return w;
}

// Orders 1, 2 use 5 nodes; orders 3, 4 use 7, which keeps 4th-order accuracy.
template <class T, std::size_t M>
std::vector<T> apply_fd(const std::vector<T>& f, double h, int order) {
    const std::size_t n = f.size();
    constexpr int half = static_cast<int>(M / 2);
    std::vector<T> out(n);
    if (n < M) throw Error(Errc::invalid_argument, "fd_derivative: too few samples");
    const double scale = std::pow(h, -order);
    // Stencil start s in [0, n-M]; offsets relative to the evaluation node.
    std::array<std::array<double, M>, M> edge{};
    for (int e = 0; e < static_cast<int>(M); ++e) {
        std::array<double, M> z{};
        for (int i = 0; i < static_cast<int>(M); ++i) z[i] = static_cast<double>(i - e);
        edge[e] = fd_weights<M>(z, order);
    }
    for (std::size_t i = 0; i < n; ++i) {
        int ii = static_cast<int>(i);
        int s = std::clamp(ii - half, 0, static_cast<int>(n - M));
        const auto& w = edge[ii - s];
        T acc{};
        for (std::size_t m = 0; m < M; ++m) acc += w[m] * f[s + m];
        out[i] = acc * scale;
    }
    return out;
}

template <class T>
std::vector<T> fd_dispatch(const std::vector<T>& f, double h, int order) {
    if (order < 1 || order > 4)
        throw Error(Errc::invalid_argument, "fd_derivative: order must be in 1..4");
    if (order <= 2) return apply_fd<T, 5>(f, h, order);
    return apply_fd<T, 7>(f, h, order);
}

} // namespace

CVec fd_derivative(const CVec& f, double h, int order) { return fd_dispatch(f, h, order); }
RVec fd_derivative(const RVec& f, double h, int order) { return fd_dispatch(f, h, order); }

double edge_ratio(const CVec& f) {
    const std::size_t n = f.size();
    const std::size_t m = std::max<std::size_t>(1, n / 10);
    double all = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::abs(f[i]);
        all = std::max(all, a);
        if (i < m || i >= n - m) edge = std::max(edge, a);
    }
    return all > 0.0 ? edge / all : 0.0;
}

SpectralField xi_derivative(const SpectralField& field, int order) {
    SpectralField out(field.grid, fd_derivative(field.values, field.grid.dxi(), order));
    out.tail_warning = edge_ratio(field.values) > 1e-10;
    return out;
}

double weighted_l2_norm(const SpatialField& field, double m) {
    double s = 0.0;
    for (std::size_t j = 0; j < field.grid.n; ++j) {
        double x = field.grid.x(j);
        s += std::pow(1.0 + x * x, m) * std::norm(field.values[j]);
    }
    return std::sqrt(s * field.grid.dx());
}

double l2_norm(const CVec& v, double h) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s * h);
}

double sup_norm(const CVec& v) {
    double s = 0.0;
    for (const auto& z : v) s = std::max(s, std::abs(z));
    return s;
}

namespace {
template <class T>
bool lagrange4_impl(const std::vector<T>& f, double x0, double h, double q, T& out) {
    const std::size_t n = f.size();
    if (n < 4) return false;
    double s = (q - x0) / h;
    if (!(s >= 0.0) || s > static_cast<double>(n - 1)) return false;
    long i = static_cast<long>(std::floor(s)) - 1;
    i = std::clamp<long>(i, 0, static_cast<long>(n) - 4);
    double u = s - static_cast<double>(i);
    // Nodes at 0, 1, 2, 3 relative to i.
    double l0 = -(u - 1) * (u - 2) * (u - 3) / 6.0;
    double l1 = u * (u - 2) * (u - 3) / 2.0;
    double l2 = -u * (u - 1) * (u - 3) / 2.0;
    double l3 = u * (u - 1) * (u - 2) / 6.0;
    out = l0 * f[i] + l1 * f[i + 1] + l2 * f[i + 2] + l3 * f[i + 3];
    return true;
}
} // namespace

bool lagrange4(const CVec& f, double x0, double h, double q, cplx& out) {
    return lagrange4_impl(f, x0, h, q, out);
}
bool lagrange4(const RVec& f, double x0, double h, double q, double& out) {
    return lagrange4_impl(f, x0, h, q, out);
}

} // namespace modscat
