#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qsarga/genome.hpp"

namespace qsarga {

/// Least-squares fit of Y on n phenotypes, with (Y = b0 + sum b_i X_i) or
/// without (Y = sum b_i X_i) the intercept term.
struct RegressionModel {
    std::vector<std::size_t> members;
    bool with_intercept = true;
    /// b0 first when with_intercept, then b1..bn.
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    /// Yhat_i - Y_i.
    std::vector<double> residuals;
    double r2 = 0.0;
    int df = 0;
    bool valid = false;
    /// Set when elimination met a pivot small relative to the matrix scale.
    bool ill_conditioned = false;

    std::size_t slope_offset() const noexcept { return with_intercept ? 1 : 0; }
    std::span<const double> slopes() const { return std::span(coefficients).subspan(slope_offset()); }
    std::span<const double> slope_t() const { return std::span(t_stats).subspan(slope_offset()); }

    /// Sum over molecules of |Yhat - Y|^s.
    double error_sum(double s) const;
};

/// Fits by the normal equations with partial pivoting.
/// Throws SingularFit for a rank-deficient design and DataError when the
/// dimensions disagree or there are not more observations than coefficients.
RegressionModel ols_fit(std::span<const std::span<const double>> regressors, std::span<const double> y,
                        bool with_intercept, std::vector<std::size_t> members = {});

struct ValidityRules {
    double alpha = 0.05;
    /// Coefficient count must not exceed m - unique_offset (unique solution).
    int unique_offset = 1;
    /// Coefficient count must not exceed m - significance_offset (significance claims).
    int significance_offset = 6;
};

bool coefficient_significant(const RegressionModel& model, std::size_t index, double alpha);
bool within_coefficient_bounds(const RegressionModel& model, std::size_t m, const ValidityRules& rules);

using Refit = std::function<RegressionModel(bool with_intercept)>;

/// Applies the validity rules to a fitted model: coefficient-count bounds;
/// an insignificant intercept switches to the no-intercept form; a slope that
/// is insignificant in both forms invalidates the model. `refit` produces the
/// alternative form on demand. Returns the final form with `valid` set.
RegressionModel assess_validity(const RegressionModel& model, std::size_t m, const ValidityRules& rules,
                                const Refit& refit);

/// Valid only if the bounds hold and every coefficient of this very form is significant.
RegressionModel assess_strict(RegressionModel model, std::size_t m, const ValidityRules& rules);

/// C(N, n), doubled when both regression forms are searched.
BigInt search_space_size(const BigInt& genome, unsigned n, bool both_forms = false);

} // namespace qsarga
