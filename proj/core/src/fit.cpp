#include "modscat/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace modscat {

RateFit fit_rate(const RVec& t, const RVec& y, std::size_t min_points) {
    if (t.size() != y.size()) throw Error(Errc::invalid_argument, "fit_rate: size mismatch");
    RVec lx, ly;
    RateFit r;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
        lx.push_back(std::log(t[i]));
        ly.push_back(std::log(y[i]));
        r.t_min = lx.size() == 1 ? t[i] : std::min(r.t_min, t[i]);
        r.t_max = lx.size() == 1 ? t[i] : std::max(r.t_max, t[i]);
    }
    const std::size_t m = lx.size();
    if (m < std::max<std::size_t>(min_points, 2))
        throw Error(Errc::too_few_points, "fit_rate: need at least " + std::to_string(min_points) +
                                              " valid points, have " + std::to_string(m));
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw Error(Errc::too_few_points, "fit_rate: all times identical");
    r.exponent = sxy / sxx;
    r.prefactor = std::exp(my - r.exponent * mx);
    r.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    r.points = m;
    return r;
}

TimeBasisFit::TimeBasisFit(const RVec& t, const std::vector<BasisFn>& basis)
    : rows_(t.size()), cols_(basis.size()), cond_(0.0) {
    if (cols_ == 0 || rows_ < cols_)
        throw Error(Errc::too_few_points, "least squares: need at least as many samples as basis functions");
    Eigen::MatrixXd A(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) A(i, j) = basis[j](t[i]);
    Eigen::VectorXd s = A.colwise().norm();
    Eigen::MatrixXd An = A * s.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(An, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    cond_ = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    // pinv(A) = diag(1/s) pinv(An)
    Eigen::MatrixXd P = s.cwiseInverse().asDiagonal() * svd.solve(Eigen::MatrixXd::Identity(rows_, rows_));
    pinv_.resize(cols_ * rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) pinv_[j * rows_ + i] = P(j, i);
    design_.resize(rows_ * cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) design_[i * cols_ + j] = A(i, j);
    Eigen::MatrixXd G = (P * P.transpose());
    cov_diag_.resize(cols_);
    for (std::size_t j = 0; j < cols_; ++j) cov_diag_[j] = G(j, j);
}

CVec TimeBasisFit::solve(const CVec& y) const {
    CVec c(cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
        cplx acc{};
        for (std::size_t i = 0; i < rows_; ++i) acc += pinv_[j * rows_ + i] * y[i];
        c[j] = acc;
    }
    return c;
}

RVec TimeBasisFit::solve(const RVec& y) const {
    RVec c(cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) acc += pinv_[j * rows_ + i] * y[i];
        c[j] = acc;
    }
    return c;
}

RVec TimeBasisFit::standard_errors(const CVec& y) const {
    CVec c = solve(y);
    double rss = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        cplx r = y[i];
        for (std::size_t j = 0; j < cols_; ++j) r -= design_[i * cols_ + j] * c[j];
        rss += std::norm(r);
    }
    RVec se(cols_, 0.0);
    if (rows_ <= cols_) return se;
    // Complex residuals: two real degrees of freedom per row.
    double sigma2 = rss / (2.0 * static_cast<double>(rows_ - cols_));
    for (std::size_t j = 0; j < cols_; ++j) se[j] = std::sqrt(2.0 * sigma2 * cov_diag_[j]);
    return se;
}

} // namespace modscat
