#include "qsarga/regress.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qsarga/descriptors.hpp"
#include "qsarga/error.hpp"
#include "qsarga/stats.hpp"

namespace qsarga {

double RegressionModel::error_sum(double s) const {
    double total = 0.0;
    for (double r : residuals) total += std::pow(std::fabs(r), s);
    return total;
}

namespace {

// Gauss-Jordan inversion with partial pivoting of a small symmetric matrix.
std::vector<double> invert(std::vector<double> a, std::size_t k, bool& ill_conditioned) {
    std::vector<double> inv(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) inv[i * k + i] = 1.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i) scale = std::max(scale, std::fabs(a[i * k + i]));
    if (scale == 0.0) throw SingularFit("singular fit: all regressors are zero");

    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(a[r * k + col]) > std::fabs(a[piv * k + col])) piv = r;
        const double p = a[piv * k + col];
        if (std::fabs(p) <= 1e-13 * scale) throw SingularFit("singular fit: design matrix is rank deficient");
        if (std::fabs(p) <= 1e-9 * scale) ill_conditioned = true;
        if (piv != col)
            for (std::size_t c = 0; c < k; ++c) {
                std::swap(a[piv * k + c], a[col * k + c]);
                std::swap(inv[piv * k + c], inv[col * k + c]);
            }
        for (std::size_t c = 0; c < k; ++c) {
            a[col * k + c] /= p;
            inv[col * k + c] /= p;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[r * k + col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) {
                a[r * k + c] -= f * a[col * k + c];
                inv[r * k + c] -= f * inv[col * k + c];
            }
        }
    }
    return inv;
}

} // namespace

RegressionModel ols_fit(std::span<const std::span<const double>> regressors, std::span<const double> y,
                        bool with_intercept, std::vector<std::size_t> members) {
    const std::size_t n = regressors.size();
    const std::size_t m = y.size();
    if (n == 0) throw DataError("ols_fit: at least one regressor is required");
    for (const auto& x : regressors)
        if (x.size() != m) throw DataError("ols_fit: regressor length does not match the activity vector");
    const std::size_t k = n + (with_intercept ? 1 : 0);
    if (m <= k) throw DataError("ols_fit: need more observations than coefficients");
    if (members.empty())
        for (std::size_t i = 0; i < n; ++i) members.push_back(i);
    if (members.size() != n) throw DataError("ols_fit: one member id per regressor is required");

    auto column = [&](std::size_t c, std::size_t i) -> double {
        if (with_intercept) return c == 0 ? 1.0 : regressors[c - 1][i];
        return regressors[c][i];
    };

    std::vector<double> xtx(k * k, 0.0), xty(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += column(a, i) * column(b, i);
            xtx[a * k + b] = xtx[b * k + a] = s;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += column(a, i) * y[i];
        xty[a] = s;
    }

    RegressionModel model;
    model.members = std::move(members);
    model.with_intercept = with_intercept;
    const auto inv = invert(xtx, k, model.ill_conditioned);

    model.coefficients.assign(k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) model.coefficients[a] += inv[a * k + b] * xty[b];

    model.residuals.resize(m);
    std::vector<double> fitted(m);
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double f = 0.0;
        for (std::size_t c = 0; c < k; ++c) f += model.coefficients[c] * column(c, i);
        fitted[i] = f;
        model.residuals[i] = f - y[i];
        sse += model.residuals[i] * model.residuals[i];
    }
    model.df = static_cast<int>(m - k);
    const double sigma2 = sse / model.df;
    model.std_errors.resize(k);
    model.t_stats.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        model.std_errors[c] = std::sqrt(std::max(0.0, sigma2 * inv[c * k + c]));
        const double b = model.coefficients[c];
        model.t_stats[c] = b == 0.0 ? 0.0 : b / model.std_errors[c];
    }
    model.r2 = squared_correlation(fitted, y);
    return model;
}

bool coefficient_significant(const RegressionModel& model, std::size_t index, double alpha) {
    return stats::student_t_two_tail(model.t_stats.at(index), model.df) < alpha;
}

bool within_coefficient_bounds(const RegressionModel& model, std::size_t m, const ValidityRules& rules) {
    const auto count = static_cast<long long>(model.coefficients.size());
    const auto mm = static_cast<long long>(m);
    return count <= mm - rules.unique_offset && count <= mm - rules.significance_offset;
}

RegressionModel assess_validity(const RegressionModel& model, std::size_t m, const ValidityRules& rules,
                                const Refit& refit) {
    if (!model.with_intercept) return assess_strict(model, m, rules);

    std::optional<RegressionModel> without;
    bool without_failed = false;
    auto get_without = [&]() -> const RegressionModel* {
        if (!without && !without_failed) {
            try {
                without = refit(false);
            } catch (const SingularFit&) {
                without_failed = true;
            }
        }
        return without ? &*without : nullptr;
    };

    RegressionModel final_model = model;
    if (!coefficient_significant(model, 0, rules.alpha)) {
        const auto* alt = get_without();
        if (!alt) {
            final_model.valid = false;
            return final_model;
        }
        final_model = *alt;
    }
    bool valid = within_coefficient_bounds(final_model, m, rules);
    const std::size_t n = model.coefficients.size() - 1;
    for (std::size_t i = 0; valid && i < n; ++i) {
        if (coefficient_significant(model, i + 1, rules.alpha)) continue;
        const auto* alt = get_without();
        valid = alt && coefficient_significant(*alt, i, rules.alpha);
    }
    final_model.valid = valid;
    return final_model;
}

RegressionModel assess_strict(RegressionModel model, std::size_t m, const ValidityRules& rules) {
    bool valid = within_coefficient_bounds(model, m, rules);
    for (std::size_t c = 0; valid && c < model.coefficients.size(); ++c)
        valid = coefficient_significant(model, c, rules.alpha);
    model.valid = valid;
    return model;
}

BigInt search_space_size(const BigInt& genome, unsigned n, bool both_forms) {
    if (genome < n) throw DataError("search_space_size: n exceeds the genome size");
    BigInt v = 1;
    for (unsigned j = 1; j <= n; ++j) {
        v *= genome - j + 1;
        v /= j;
    }
    return both_forms ? v * 2 : v;
}

} // namespace qsarga
