#include "qsarga/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "qsarga/csv.hpp"
#include "qsarga/error.hpp"

namespace qsarga::stats {

namespace {

constexpr double eps = 1e-16;
constexpr double tiny = 1e-300;
constexpr int max_iterations = 200000;

// Continued fraction for Q(a, x), modified Lentz; valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

// Series for P(a, x); valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < max_iterations; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * eps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < max_iterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps) break;
    }
    return h;
}

void require_df(int df, const char* who) {
    if (df < 1) throw DataError(std::string(who) + ": degrees of freedom must be >= 1");
}

std::string format_count(double v) {
    if (v == std::floor(v) && std::fabs(v) < 1e15) return fmt::format("{:.0f}", v);
    return fmt::format("{:.6g}", v);
}

} // namespace

double log_gamma(double x) {
    // Lanczos approximation, g = 7, nine coefficients.
    static constexpr std::array<double, 9> coef = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        return std::log(std::numbers::pi / std::fabs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = coef[0];
    const double t = x + 7.5;
    for (std::size_t i = 1; i < coef.size(); ++i) a += coef[i] / (x + static_cast<double>(i));
    return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DataError("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DataError("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double beta_inc(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw DataError("beta_inc: shape parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                                  b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
    return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double chi2_sf(double x, int df) {
    require_df(df, "chi2_sf");
    if (!(x >= 0.0)) throw DataError("chi2_sf: statistic must be nonnegative");
    if (std::isinf(x)) return 0.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

double student_t_two_tail(double t, int df) {
    require_df(df, "student_t_two_tail");
    if (std::isnan(t)) throw DataError("student_t_two_tail: statistic is NaN");
    if (std::isinf(t)) return 0.0;
    const double v = static_cast<double>(df);
    const double t2 = t * t;
    // For small |t| the complementary form avoids 1 - (value close to 1).
    if (t2 < v) return 1.0 - beta_inc(0.5, 0.5 * v, t2 / (v + t2));
    return beta_inc(0.5 * v, 0.5, v / (v + t2));
}

JarqueBera jarque_bera(std::span<const double> x) {
    if (x.size() < 4) throw DataError("jarque_bera: need at least 4 values");
    const double m = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) throw DataError("jarque_bera: non-finite value");
        mean += v;
    }
    mean /= m;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= m;
    m3 /= m;
    m4 /= m;
    if (m2 <= 0.0) throw DataError("jarque_bera: zero variance");
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    const double jb = m / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
    return {jb, chi2_sf(jb, 2), skew, kurt};
}

NormalFit normal_mle(std::span<const double> x) {
    if (x.size() < 2) throw DataError("normal_mle: need at least 2 values");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(x.size()))};
}

ChiSquareReport chi2_homogeneity(const ContingencyTable& table, double alpha, ExpectedMode mode) {
    const auto& obs = table.observed;
    const std::size_t rows = obs.size();
    if (rows < 2) throw DataError("contingency table needs at least 2 rows");
    const std::size_t cols = obs.front().size();
    if (cols < 2) throw DataError("contingency table needs at least 2 columns");
    for (const auto& r : obs) {
        if (r.size() != cols) throw DataError("contingency table rows differ in length");
        for (double v : r)
            if (!std::isfinite(v) || v < 0.0) throw DataError("contingency counts must be finite and nonnegative");
    }
    auto row_name = [&](std::size_t i) { return i < table.row_labels.size() ? table.row_labels[i] : std::to_string(i); };
    auto col_name = [&](std::size_t j) { return j < table.col_labels.size() ? table.col_labels[j] : std::to_string(j); };

    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            row_sum[i] += obs[i][j];
            col_sum[j] += obs[i][j];
            grand += obs[i][j];
        }
    for (std::size_t i = 0; i < rows; ++i)
        if (row_sum[i] <= 0.0) throw DataError("contingency table: row '" + row_name(i) + "' sums to zero");
    for (std::size_t j = 0; j < cols; ++j)
        if (col_sum[j] <= 0.0) throw DataError("contingency table: column '" + col_name(j) + "' sums to zero");

    ChiSquareReport rep;
    rep.alpha = alpha;
    rep.table = table;
    rep.expected.assign(rows, std::vector<double>(cols));
    std::vector<double> row_x2(rows, 0.0), col_x2(cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            double e = row_sum[i] * col_sum[j] / grand;
            if (mode == ExpectedMode::rounded) e = std::round(e);
            if (e <= 0.0)
                throw DataError("contingency table: expected count rounds to zero at (" + row_name(i) + ", " +
                                col_name(j) + ")");
            rep.expected[i][j] = e;
            const double d = obs[i][j] - e;
            const double cell = d * d / e;
            row_x2[i] += cell;
            col_x2[j] += cell;
            total += cell;
        }
    auto make = [&](double value, int df) {
        const double p = chi2_sf(value, df);
        return ChiSquareStat{value, df, p, p < alpha};
    };
    for (double v : row_x2) rep.partial_row.push_back(make(v, static_cast<int>(cols) - 1));
    for (double v : col_x2) rep.partial_col.push_back(make(v, static_cast<int>(rows) - 1));
    rep.total = make(total, static_cast<int>((rows - 1) * (cols - 1)));
    return rep;
}

ContingencyTable parse_contingency_csv(const std::string& text) {
    const auto rows = csv::parse(text);
    if (rows.size() < 3) throw DataError("contingency CSV: need a header and at least two rows");
    ContingencyTable t;
    const auto& header = rows.front();
    if (header.size() < 3) throw DataError("contingency CSV: need at least two columns");
    t.col_labels.assign(header.begin() + 1, header.end());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size())
            throw DataError("contingency CSV line " + std::to_string(i + 1) + ": expected " +
                            std::to_string(header.size()) + " fields");
        t.row_labels.push_back(r[0]);
        std::vector<double> counts;
        for (std::size_t j = 1; j < r.size(); ++j) counts.push_back(csv::to_double(r[j], "contingency count"));
        t.observed.push_back(std::move(counts));
    }
    return t;
}

std::string contingency_to_csv(const ContingencyTable& table) {
    std::string out;
    for (const auto& c : table.col_labels) out += "," + c;
    out += "\n";
    for (std::size_t i = 0; i < table.observed.size(); ++i) {
        out += i < table.row_labels.size() ? table.row_labels[i] : std::to_string(i);
        for (double v : table.observed[i]) out += "," + csv::format_double(v);
        out += "\n";
    }
    return out;
}

std::string format_report(const ChiSquareReport& rep, const std::string& title) {
    const auto& t = rep.table;
    const std::size_t rows = t.observed.size();
    const std::size_t cols = t.observed.front().size();
    auto row_name = [&](std::size_t i) { return i < t.row_labels.size() ? t.row_labels[i] : std::to_string(i); };
    auto col_name = [&](std::size_t j) { return j < t.col_labels.size() ? t.col_labels[j] : std::to_string(j); };

    std::ostringstream os;
    if (!title.empty()) os << title << "\n";
    os << fmt::format("{:<6}", "X2");
    for (std::size_t j = 0; j < cols; ++j) os << fmt::format("{:>22}", col_name(j) + ": Obs. (Exp.)");
    os << fmt::format("{:>12}\n", "Sum");
    std::vector<double> col_sum(cols, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        os << fmt::format("{:<6}", row_name(i));
        double rs = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double o = t.observed[i][j];
            rs += o;
            col_sum[j] += o;
            os << fmt::format("{:>22}", format_count(o) + " (" + fmt::format("{:.1f}", rep.expected[i][j]) + ")");
        }
        grand += rs;
        os << fmt::format("{:>12}\n", format_count(rs));
    }
    os << fmt::format("{:<6}", "Sum");
    for (double c : col_sum) os << fmt::format("{:>22}", format_count(c));
    os << fmt::format("{:>12}\n\n", format_count(grand));

    os << fmt::format("{:<28}{:<32}{}\n", "Unexplained square error", "Probability from Chi Square", "Answer");
    auto line = [&](const std::string& label, const ChiSquareStat& s) {
        os << fmt::format("{:<28}{:<32}{}\n", fmt::format("X2({}) = {:.6g}", label, s.value),
                          fmt::format("p(x2 > X2, {}) = {:.3g}", s.df, s.p_value), verdict(s));
    };
    for (std::size_t i = 0; i < rows; ++i) line(row_name(i) + ",.", rep.partial_row[i]);
    for (std::size_t j = 0; j < cols; ++j) line(".," + col_name(j), rep.partial_col[j]);
    line(".,.", rep.total);
    os << fmt::format("alpha = {:g}\n", rep.alpha);
    return os.str();
}

} // namespace qsarga::stats
