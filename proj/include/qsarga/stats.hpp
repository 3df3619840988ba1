#pragma once

#include <span>
#include <string>
#include <vector>

namespace qsarga::stats {

// Special functions. Accuracy is about 1e-14 relative for the arguments the
// library uses (shape parameters up to 1e6).
double log_gamma(double x);
/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed without cancellation.
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Upper tail P(X > x) of the chi-square distribution with df degrees of freedom.
double chi2_sf(double x, int df);

/// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_tail(double t, int df);

struct JarqueBera {
    double statistic;
    double p_value;
    double skewness;
    double kurtosis;
};

/// Moment-based (population divisor) Jarque-Bera normality test.
JarqueBera jarque_bera(std::span<const double> x);

struct NormalFit {
    double mean;
    double sd;
};

/// Mean and maximum-likelihood standard deviation (divisor m).
NormalFit normal_mle(std::span<const double> x);

struct ContingencyTable {
    std::vector<std::vector<double>> observed;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

enum class ExpectedMode {
    exact,
    /// Expected counts rounded to the nearest integer before forming (O-E)^2/E,
    /// the convention of hand-tabulated homogeneity tables.
    rounded,
};

struct ChiSquareStat {
    double value;
    int df;
    double p_value;
    bool rejected;
};

struct ChiSquareReport {
    std::vector<std::vector<double>> expected;
    std::vector<ChiSquareStat> partial_row;
    std::vector<ChiSquareStat> partial_col;
    ChiSquareStat total;
    double alpha;
    ContingencyTable table;
};

/// Chi-square test of homogeneity with row and column decomposition.
/// Throws DataError on a zero margin or a malformed table.
ChiSquareReport chi2_homogeneity(const ContingencyTable& table, double alpha = 0.05,
                                 ExpectedMode mode = ExpectedMode::exact);

/// "No" for rejected homogeneity, "-" otherwise.
inline const char* verdict(const ChiSquareStat& s) { return s.rejected ? "No" : "-"; }

/// CSV form: header `,<col>,<col>...`, then `<row>,<count>,...` lines.
ContingencyTable parse_contingency_csv(const std::string& text);
std::string contingency_to_csv(const ContingencyTable& table);

/// Human-readable report: observed (expected) grid followed by the partial and total statistics.
std::string format_report(const ChiSquareReport& report, const std::string& title = {});

} // namespace qsarga::stats
