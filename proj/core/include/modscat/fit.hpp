#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "modscat/grid.hpp"

namespace modscat {

// log-log regression y ~ prefactor * t^exponent.
struct RateFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t points = 0;
};

// Nonpositive or non-finite samples are skipped; throws if fewer than
// min_points remain.
RateFit fit_rate(const RVec& t, const RVec& y, std::size_t min_points = 2);

using BasisFn = std::function<double(double)>;

// Shared-design linear least squares: one real design (rows = sample times),
// many complex right-hand sides (one per xi node).
class TimeBasisFit {
public:
    TimeBasisFit(const RVec& t, const std::vector<BasisFn>& basis);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    // 2-norm condition number of the design after scaling columns to unit norm.
    double condition() const { return cond_; }

    // Coefficients for samples y (length rows()).
    CVec solve(const CVec& y) const;
    RVec solve(const RVec& y) const;
    // Standard errors of each coefficient given residual variance of y.
    RVec standard_errors(const CVec& y) const;

private:
    std::size_t rows_, cols_;
    double cond_;
    std::vector<double> pinv_; // cols x rows, row-major
    std::vector<double> design_; // rows x cols, row-major
    std::vector<double> cov_diag_; // diag((A^T A)^{-1})
};

} // namespace modscat
