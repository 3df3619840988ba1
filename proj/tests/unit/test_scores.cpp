#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qsarga/error.hpp"
#include "qsarga/scores.hpp"

using namespace qsarga;

namespace {

RegressionModel model_with(std::vector<std::size_t> members, double r2, std::vector<double> slope_t = {1.0}) {
    RegressionModel m;
    m.members = std::move(members);
    m.with_intercept = true;
    m.coefficients.assign(slope_t.size() + 1, 1.0);
    m.t_stats = {5.0};
    m.t_stats.insert(m.t_stats.end(), slope_t.begin(), slope_t.end());
    m.r2 = r2;
    m.valid = true;
    return m;
}

std::vector<std::size_t> argsort(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    return idx;
}

} // namespace

TEST_CASE("objective scores") {
    RegressionModel exact = model_with({0, 1}, 1.0);
    exact.residuals = {0, 0, 0, 0};
    CHECK(objective_score(exact, {ObjectiveKind::se, 2}) == 0.0);
    CHECK(objective_score(exact, {ObjectiveKind::r2, 1}) == 1.0);

    RegressionModel m = model_with({0, 1}, 0.5, {3.0, -3.0});
    m.residuals = {1, -2, 0.5};
    CHECK(objective_score(m, {ObjectiveKind::se, 1}) == doctest::Approx(3.5));
    CHECK(objective_score(m, {ObjectiveKind::se, 2}) == doctest::Approx(5.25));
    CHECK(objective_score(m, {ObjectiveKind::r2, 2}) == doctest::Approx(0.25));
    CHECK(objective_score(m, {ObjectiveKind::hr, 2}) == doctest::Approx(1.0));
    for (double s : {0.5, 1.0, 2.0, 7.0}) CHECK(objective_score(m, {ObjectiveKind::mt, s}) == doctest::Approx(3.0));
    for (double r2 : {0.0, 1.0}) {
        m.r2 = r2;
        for (double s : {0.5, 2.0, 3.0}) CHECK(std::fabs(objective_score(m, {ObjectiveKind::hr, s})) < 1e-15);
    }
    CHECK_THROWS_AS(objective_score(m, {ObjectiveKind::hr, 1.0}), ConfigError);
    CHECK_THROWS_AS(objective_score(m, {ObjectiveKind::r2, 0.0}), ConfigError);
    CHECK(ObjectiveSpec{ObjectiveKind::se, 1}.direction() == Direction::minimize);
    CHECK(ObjectiveSpec{ObjectiveKind::hr, 2}.direction() == Direction::minimize);
    CHECK(ObjectiveSpec{ObjectiveKind::mt, 1}.direction() == Direction::maximize);
    CHECK(parse_objective_kind("mt") == ObjectiveKind::mt);
    CHECK_THROWS_AS(parse_objective_kind("xx"), ConfigError);
}

TEST_CASE("MT power mean is nondecreasing in s") {
    Rng rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> t(1 + rng.below(4));
        for (auto& v : t) v = rng.normal() * 5;
        auto m = model_with({0}, 0.5, t);
        double prev = 0;
        for (double s : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
            const double v = objective_score(m, {ObjectiveKind::mt, s});
            CHECK(v >= prev * (1 - 1e-12));
            prev = v;
        }
    }
}

TEST_CASE("selection scores") {
    SUBCASE("nalive") {
        std::vector<RegressionModel> models = {model_with({0, 1}, 0.2), model_with({0, 2}, 0.4),
                                               model_with({1, 2}, 0.9)};
        auto s = selection_scores(4, models, SelectionAggregate{});
        CHECK(s.scores == std::vector<double>{2, 2, 2, 0});
        CHECK(s.unmatched == std::vector<bool>{false, false, false, true});
    }
    SUBCASE("r2 aggregates against a membership oracle") {
        std::vector<RegressionModel> models = {model_with({0, 1}, 0.2), model_with({0, 2}, 0.4),
                                               model_with({1, 3}, 0.9)};
        for (auto red : {Reducer::min, Reducer::max, Reducer::avg}) {
            SelectionAggregate agg;
            agg.nalive = false;
            agg.score = {ObjectiveKind::r2, 1};
            agg.reducer = red;
            auto s = selection_scores(5, models, agg);
            for (std::size_t i = 0; i < 5; ++i) {
                std::vector<double> mine;
                for (const auto& m : models)
                    if (std::find(m.members.begin(), m.members.end(), i) != m.members.end()) mine.push_back(m.r2);
                double want = 0;
                if (!mine.empty()) {
                    if (red == Reducer::min) want = *std::min_element(mine.begin(), mine.end());
                    if (red == Reducer::max) want = *std::max_element(mine.begin(), mine.end());
                    if (red == Reducer::avg) want = std::accumulate(mine.begin(), mine.end(), 0.0) / mine.size();
                }
                CHECK(s.scores[i] == doctest::Approx(want));
            }
        }
    }
    SUBCASE("unmatched under minimization get the largest observed score") {
        RegressionModel a = model_with({0, 1}, 0.2), b = model_with({1, 2}, 0.3);
        a.residuals = {1, 1};
        b.residuals = {2, 2};
        std::vector<RegressionModel> models = {a, b};
        SelectionAggregate agg = SelectionAggregate::parse("se_max", 1);
        auto s = selection_scores(4, models, agg);
        CHECK(s.scores == std::vector<double>{2, 4, 4, 4});
        CHECK(s.unmatched[3]);
    }
    SUBCASE("no models") {
        auto s = selection_scores(3, {}, SelectionAggregate{});
        CHECK(s.no_models);
        CHECK(s.scores == std::vector<double>{0, 0, 0});
    }
    SUBCASE("names") {
        CHECK(SelectionAggregate::parse("nalive", 1).nalive);
        CHECK(SelectionAggregate::parse("hr_avg", 2).name() == "hr_avg");
        CHECK(SelectionAggregate::parse("se_min", 1).direction() == Direction::minimize);
        CHECK_THROWS_AS(SelectionAggregate::parse("r2_median", 1), ConfigError);
        CHECK_THROWS_AS(SelectionAggregate::parse("foo", 1), ConfigError);
    }
}

TEST_CASE("transform pipeline") {
    SUBCASE("normalization maps onto the fixed scale") {
        NormalizationState st;
        std::vector<double> f = {2, 3, 4};
        auto t = transform_scores(f, Direction::maximize, &st, std::nullopt, false);
        CHECK(t.fs == std::vector<double>{0, 0.5, 1});
        // Global references only widen.
        std::vector<double> g = {3, 3.5};
        auto t2 = transform_scores(g, Direction::maximize, &st, std::nullopt, false);
        CHECK(t2.fs[0] == doctest::Approx(0.5));
        CHECK(t2.fs[1] == doctest::Approx(0.75));
        std::vector<double> h = {0, 8};
        auto t3 = transform_scores(h, Direction::maximize, &st, std::nullopt, false);
        CHECK(st.global_min == 0);
        CHECK(st.global_max == 8);
        CHECK(t3.fs == std::vector<double>{0, 1});
    }
    SUBCASE("degenerate normalization") {
        NormalizationState st;
        st.n0 = 5;
        st.n1 = 10;
        std::vector<double> f = {3, 3, 3};
        auto t = transform_scores(f, Direction::maximize, &st, std::nullopt, false);
        CHECK(t.degenerate_normalization);
        CHECK(t.fs == std::vector<double>{5, 5, 5});
    }
    SUBCASE("ranks and rounding") {
        std::vector<double> f = {10, 20, 20, 30};
        CHECK(mid_ranks(f) == std::vector<double>{1, 2.5, 2.5, 4});
        CHECK(integer_ranks(f) == std::vector<double>{1, 4, 4, 7});
        CHECK(round_significant(0.123456, 3) == 0.123);
        CHECK(round_significant(98765.0, 2) == 99000.0);
        CHECK(round_significant(-0.0004567, 2) == -0.00046);
        auto t = transform_scores(std::vector<double>{0.123456, 0.1234, 0.5}, Direction::maximize, nullptr, 3, false);
        CHECK(t.distinct == std::vector<double>{0.123, 0.5});
        CHECK(t.counts == std::vector<std::size_t>{2, 1});
    }
    SUBCASE("grouping invariants") {
        Rng rng(2);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> f(2 + rng.below(30));
            for (auto& v : f) v = static_cast<double>(rng.below(6));
            auto t = transform_scores(f, Direction::minimize, nullptr, std::nullopt, trial % 2 == 0);
            CHECK(std::accumulate(t.counts.begin(), t.counts.end(), std::size_t{0}) == f.size());
            CHECK(std::adjacent_find(t.distinct.begin(), t.distinct.end(), std::greater_equal<>()) == t.distinct.end());
            for (double v : t.fs) CHECK(std::binary_search(t.distinct.begin(), t.distinct.end(), v));
        }
    }
    SUBCASE("ranks and normalization preserve order") {
        Rng rng(44);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> f(2 + rng.below(20));
            for (auto& v : f) v = rng.normal();
            auto ranked = transform_scores(f, Direction::maximize, nullptr, std::nullopt, true);
            CHECK(argsort(ranked.fs) == argsort(f));
            NormalizationState st;
            auto normed = transform_scores(f, Direction::maximize, &st, std::nullopt, false);
            CHECK(argsort(normed.fs) == argsort(f));
        }
    }
    CHECK_THROWS_AS(transform_scores(std::vector<double>{1, NAN}, Direction::maximize, nullptr, std::nullopt, false),
                    DataError);
}

TEST_CASE("survival scores") {
    GeneticTopology t(std::vector<Gene>{{"a", {"0", "1"}}, {"b", {"0", "1"}}, {"c", {"0", "1"}}, {"d", {"0", "1"}}});
    Genotype z(t, {0, 0, 0, 0}), o(t, {1, 1, 1, 1}), h(t, {1, 1, 0, 0});
    CHECK(pair_similarity(z, z, 1.0, 1.0, 1, 1) == default_similarity_cap);
    CHECK(pair_similarity(z, o, 1.0, 1.0, 1, 1) == doctest::Approx(2.0));
    CHECK(pair_similarity(z, h, 1.0, 3.0, 2, 1) == doctest::Approx(2.0 / (4.0 + 0.5)));
    CHECK(pair_similarity(z, h, 0.0, 3.0, 1, 1) == pair_similarity(h, z, 3.0, 0.0, 1, 1));

    std::vector<Genotype> g = {z, o, h};
    std::vector<double> f = {1.0, 1.0, 2.0};
    auto vs = survival_scores(g, f, 1, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        double want = INFINITY;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != i) want = std::min(want, pair_similarity(g[i], g[j], f[i], f[j], 1, 1));
        CHECK(vs[i] == doctest::Approx(want));
    }
    // Permutation equivariance.
    std::vector<Genotype> g2 = {h, z, o};
    std::vector<double> f2 = {2.0, 1.0, 1.0};
    auto vs2 = survival_scores(g2, f2, 1, 1);
    CHECK(vs2[0] == vs[2]);
    CHECK(vs2[1] == vs[0]);
    CHECK(vs2[2] == vs[1]);

    CHECK_THROWS_AS(survival_scores(std::vector<Genotype>{z}, std::vector<double>{1}, 1, 1), DataError);
    CHECK_THROWS_AS(survival_scores(g, f, 0, 1), ConfigError);
}
