#include <doctest.h>

#include <cmath>
#include <vector>

#include "qsarga/error.hpp"
#include "qsarga/rng.hpp"
#include "qsarga/stats.hpp"

using namespace qsarga;
using namespace qsarga::stats;

namespace {

// Reference values computed once with mpmath at 40 digits.
struct Ref3 {
    double a, b, expected;
};

void check_rel(double got, double want, double tol) {
    if (want == 0.0) CHECK(std::fabs(got) <= tol);
    else CHECK(std::fabs(got - want) / std::fabs(want) <= tol);
}

} // namespace

TEST_CASE("log_gamma against high-precision values") {
    const std::vector<std::pair<double, double>> refs = {
        {0.5, 0.57236494292470009}, {1.0, 0.0},        {2.5, 0.28468287047291916},  {10.0, 12.80182748008147},
        {100.5, 361.43554046777762}, {1e-5, 11.512919692895826}, {171.3, 708.11494703899688}};
    for (auto [x, want] : refs) {
        INFO("x = " << x);
        if (want == 0.0) CHECK(std::fabs(log_gamma(x)) < 1e-14);
        else check_rel(log_gamma(x), want, 1e-13);
    }
}

TEST_CASE("incomplete gamma and beta against high-precision values") {
    const std::vector<Ref3> gp = {{0.5, 0.2, 0.47291074313446193},
                                  {3, 2, 0.32332358381693654},
                                  {10, 15, 0.93014633930059023},
                                  {50, 40, 0.070335066659394954},
                                  {1000, 1010, 0.62767894473699473}};
    for (auto r : gp) {
        INFO("a = " << r.a << " x = " << r.b);
        check_rel(gamma_p(r.a, r.b), r.expected, 1e-12);
        check_rel(gamma_q(r.a, r.b), 1.0 - r.expected, 1e-11);
    }
    struct Ref4 {
        double a, b, x, expected;
    };
    const std::vector<Ref4> bi = {{0.5, 0.5, 0.3, 0.36901011956554538},
                                  {2, 3, 0.4, 0.5248},
                                  {10, 20, 0.35, 0.592386663663905},
                                  {100, 50, 0.7, 0.80544816622775349},
                                  {0.1, 5, 0.01, 0.76908892078434628}};
    for (auto r : bi) {
        INFO("a = " << r.a << " b = " << r.b << " x = " << r.x);
        check_rel(beta_inc(r.a, r.b, r.x), r.expected, 1e-12);
    }
    CHECK(beta_inc(2, 3, 0.0) == 0.0);
    CHECK(beta_inc(2, 3, 1.0) == 1.0);
}

TEST_CASE("chi2_sf") {
    const std::vector<Ref3> refs = {{13.6, 2, 0.0011137751478448033},  {2.25, 2, 0.32465246735834973},
                                    {69.86, 4, 2.4296905487311473e-14}, {0.5, 1, 0.47950012218695346},
                                    {3.84, 1, 0.050043521248705103},    {100, 50, 3.4549313829848639e-5},
                                    {500, 100, 1.7201210053695375e-54}, {1e-3, 3, 0.99999159208094195},
                                    {30, 10, 0.00085664121077530039},   {421.475, 4, 6.3630363018199437e-90}};
    for (auto r : refs) {
        INFO("x = " << r.a << " df = " << r.b);
        CHECK(std::fabs(chi2_sf(r.a, static_cast<int>(r.b)) - r.expected) <= 1e-10);
        check_rel(chi2_sf(r.a, static_cast<int>(r.b)), r.expected, 1e-9);
    }
    CHECK(chi2_sf(0.0, 3) == 1.0);
    CHECK_THROWS_AS(chi2_sf(1.0, 0), Error);
    CHECK_THROWS_AS(chi2_sf(-1.0, 2), Error);
}

TEST_CASE("student_t_two_tail") {
    const std::vector<Ref3> refs = {{1.96, 1e6, 0.049996067585269791}, {2.0, 5, 0.10193947882985836},
                                    {0.5, 1, 0.70483276469913345},     {10, 3, 0.0021283990584141501},
                                    {2.5, 30, 0.018115649068066694},   {1e-4, 7, 0.99992300170998021},
                                    {4.0, 200, 8.9130952185934387e-5}};
    for (auto r : refs) {
        INFO("t = " << r.a << " df = " << r.b);
        CHECK(std::fabs(student_t_two_tail(r.a, static_cast<int>(r.b)) - r.expected) <= 1e-10);
    }
    CHECK(student_t_two_tail(0.0, 4) == doctest::Approx(1.0));
    CHECK(student_t_two_tail(-2.3, 9) == student_t_two_tail(2.3, 9));
    // Normal limit.
    CHECK(std::fabs(student_t_two_tail(1.96, 1000000) - 2.0 * normal_cdf(-1.96)) < 5e-4);
    CHECK_THROWS_AS(student_t_two_tail(1.0, 0), Error);
}

TEST_CASE("jarque_bera") {
    SUBCASE("hand-computed moments") {
        std::vector<double> x = {-1, -1, 1, 1};
        auto jb = jarque_bera(x);
        CHECK(jb.skewness == doctest::Approx(0.0));
        CHECK(jb.kurtosis == doctest::Approx(1.0));
        CHECK(jb.statistic == doctest::Approx(2.0 / 3.0));
        CHECK(jb.p_value == doctest::Approx(chi2_sf(2.0 / 3.0, 2)));
    }
    SUBCASE("outlier is detected") {
        Rng rng(5);
        std::vector<double> x(500);
        for (auto& v : x) v = rng.normal();
        x[17] = 10.0;
        CHECK(jarque_bera(x).p_value < 0.01);
    }
    SUBCASE("errors") {
        std::vector<double> flat(10, 2.0);
        CHECK_THROWS_AS(jarque_bera(flat), Error);
        std::vector<double> short_x = {1, 2, 3};
        CHECK_THROWS_AS(jarque_bera(short_x), Error);
    }
}

TEST_CASE("normal_mle uses the m divisor") {
    std::vector<double> x = {1, 2, 3, 4};
    auto f = normal_mle(x);
    CHECK(f.mean == doctest::Approx(2.5));
    CHECK(f.sd == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("chi2_homogeneity") {
    SUBCASE("identical rows") {
        ContingencyTable t{{{10, 20, 30}, {10, 20, 30}, {10, 20, 30}}, {"P", "T", "D"}, {"P", "T", "D"}};
        auto rep = chi2_homogeneity(t);
        CHECK(rep.total.value == doctest::Approx(0.0));
        CHECK(rep.total.p_value == doctest::Approx(1.0));
        for (const auto& s : rep.partial_row) CHECK_FALSE(s.rejected);
    }
    SUBCASE("decomposition and margins in exact mode") {
        ContingencyTable t{{{6760, 7466, 8070}, {6537, 7529, 7964}, {3922, 4965, 4385}}, {}, {}};
        auto rep = chi2_homogeneity(t);
        double rows = 0, cols = 0;
        for (const auto& s : rep.partial_row) rows += s.value;
        for (const auto& s : rep.partial_col) cols += s.value;
        CHECK(rows == doctest::Approx(rep.total.value));
        CHECK(cols == doctest::Approx(rep.total.value));
        for (int i = 0; i < 3; ++i) {
            double r = 0, c = 0, ro = 0, co = 0;
            for (int j = 0; j < 3; ++j) {
                r += rep.expected[i][j];
                c += rep.expected[j][i];
                ro += t.observed[i][j];
                co += t.observed[j][i];
            }
            CHECK(r == doctest::Approx(ro));
            CHECK(c == doctest::Approx(co));
        }
        CHECK(rep.total.df == 4);
        CHECK(rep.partial_row[0].df == 2);
        CHECK(rep.total.value == doctest::Approx(69.9).epsilon(0.01));
    }
    SUBCASE("published top_occ total") {
        ContingencyTable t{{{406, 214, 378}, {419, 217, 714}, {89, 152, 893}}, {}, {}};
        CHECK(std::fabs(chi2_homogeneity(t).total.value - 421) <= 2.0);
    }
    SUBCASE("zero margin") {
        ContingencyTable t{{{0, 0}, {1, 2}}, {}, {}};
        CHECK_THROWS_AS(chi2_homogeneity(t), DataError);
    }
    SUBCASE("malformed") {
        ContingencyTable ragged{{{1, 2}, {1}}, {}, {}};
        CHECK_THROWS_AS(chi2_homogeneity(ragged), DataError);
        ContingencyTable negative{{{1, -2}, {1, 3}}, {}, {}};
        CHECK_THROWS_AS(chi2_homogeneity(negative), DataError);
        ContingencyTable one_row{{{1, 2}}, {}, {}};
        CHECK_THROWS_AS(chi2_homogeneity(one_row), DataError);
    }
}

TEST_CASE("contingency CSV round trip") {
    ContingencyTable t{{{13, 6, 13}, {13, 8, 21}, {3, 5, 32}}, {"P", "T", "D"}, {"P", "T", "D"}};
    auto back = parse_contingency_csv(contingency_to_csv(t));
    CHECK(back.observed == t.observed);
    CHECK(back.row_labels == t.row_labels);
    CHECK(back.col_labels == t.col_labels);
    CHECK_THROWS_AS(parse_contingency_csv(",P,T\nP,1\n"), DataError);
    CHECK_THROWS_AS(parse_contingency_csv(",P,T\nP,1,x\nT,1,2\n"), DataError);
}

TEST_CASE("format_report lists every statistic with its verdict") {
    ContingencyTable t{{{13, 6, 13}, {13, 8, 21}, {3, 5, 32}}, {"P", "T", "D"}, {"P", "T", "D"}};
    auto text = format_report(chi2_homogeneity(t, 0.05, ExpectedMode::rounded), "Top");
    CHECK(text.find("Top") != std::string::npos);
    CHECK(text.find("X2(P,.)") != std::string::npos);
    CHECK(text.find("X2(.,D)") != std::string::npos);
    CHECK(text.find("X2(.,.)") != std::string::npos);
}
