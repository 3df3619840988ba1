#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "qsarga/error.hpp"
#include "qsarga/genome.hpp"

using namespace qsarga;

namespace {

GeneticTopology binary(std::size_t genes) {
    std::vector<Gene> g;
    for (std::size_t i = 0; i < genes; ++i) g.push_back({"g" + std::to_string(i), {"a", "b"}});
    return GeneticTopology(g);
}

GeneticTopology fpif() {
    return GeneticTopology(std::vector<Gene>{{"metric", {"R", "D"}},
                            {"geometry", {"T", "G"}},
                            {"atomprop", {"M", "E", "C", "Q"}},
                            {"interact", {"_p", "_d", "_1/p", "_1/d", "_p*d", "_p/d", "_p/d2", "p2/d2"}},
                            {"fragment", {"si", "se", "ji", "je", "fi", "fe"}},
                            {"superpos", {"S", "P", "A", "G", "H"}},
                            {"linear", {"P", "P2", "E", "E2"}},
                            {"overall", {"I", "R", "L"}},
                            {"scale", {"t", "g"}}});
}

std::vector<Genotype> all_genotypes(const GeneticTopology& t) {
    std::vector<Genotype> out;
    std::vector<std::uint16_t> idx(t.gene_count(), 0);
    while (true) {
        out.emplace_back(t, idx);
        std::size_t g = t.gene_count();
        while (g > 0 && idx[g - 1] + 1u == t.allele_count(g - 1)) idx[--g] = 0;
        if (g == 0) return out;
        ++idx[g - 1];
    }
}

} // namespace

TEST_CASE("topology validation") {
    CHECK_THROWS_AS(GeneticTopology(std::vector<Gene>{}), ConfigError);
    CHECK_THROWS_AS(GeneticTopology(std::vector<Gene>{{"a", {"x"}}}), ConfigError);
    CHECK_THROWS_AS(GeneticTopology(std::vector<Gene>{{"a", {"x", "x"}}}), ConfigError);
    CHECK_THROWS_AS(GeneticTopology(std::vector<Gene>{{"a", {"x", "y"}}, {"a", {"x", "y"}}}), ConfigError);
    CHECK_THROWS_AS(GeneticTopology(std::vector<Gene>{{"a", {"x y", "z"}}}), ConfigError);
    CHECK_THROWS_AS(GeneticTopology(std::vector<Gene>{{"a", {"x,", "z"}}}), ConfigError);
}

TEST_CASE("genome_size") {
    CHECK(genome_size(GeneticTopology(std::vector<Gene>{{"a", {"0", "1"}}, {"b", {"0", "1", "2"}}, {"c", {"0", "1"}}})) == 12);
    CHECK(genome_size(binary(1)) == 2);
    CHECK(genome_size(fpif()) == 92160);
}

TEST_CASE("topology text round trip") {
    const auto text = serialize_topology(fpif());
    auto parsed = parse_topology(text);
    CHECK(parsed == fpif());
    CHECK(serialize_topology(parsed) == text);
    auto commented = parse_topology("# header\ngene x : a b   # trailing\n\ngene y:c d e\n");
    CHECK(commented.gene_count() == 2);
    CHECK(commented.allele_count(1) == 3);
    CHECK_THROWS_AS(parse_topology("gene x a b\n"), ConfigError);
    CHECK_THROWS_AS(parse_topology("allele x : a b\n"), ConfigError);
    CHECK_THROWS_AS(parse_topology(""), ConfigError);
}

TEST_CASE("render and parse") {
    auto t = fpif();
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        auto g = random_genotype(t, rng);
        CHECK(parse_genotype(t, render(t, g)) == g);
    }
    auto b = binary(7);
    CHECK(render(b, random_genotype(b, rng)).size() == 7);

    GeneticTopology sep(std::vector<Gene>{{"x", {"a", "ab"}}, {"y", {"b", "bb"}}}, "-");
    Genotype g(sep, {1, 0});
    CHECK(render(sep, g) == "ab-b");
    CHECK(parse_genotype(sep, "ab-b") == g);

    GeneticTopology ambiguous(std::vector<Gene>{{"x", {"a", "ab"}}, {"y", {"b", "bb"}}});
    CHECK_THROWS_AS(parse_genotype(ambiguous, "abb"), DataError);  // a|bb or ab|b
    CHECK(parse_genotype(ambiguous, "abbb") == Genotype(ambiguous, {1, 1}));
    CHECK_THROWS_AS(parse_genotype(ambiguous, "zz"), DataError);
    CHECK_THROWS_AS(Genotype(b, {0, 1}), DataError);
    CHECK_THROWS_AS(Genotype(b, {0, 1, 2, 0, 0, 0, 0}), DataError);
}

TEST_CASE("random_genotype") {
    auto t = binary(1);
    Rng rng(11);
    int ones = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) ones += random_genotype(t, rng)[0];
    CHECK(std::fabs(ones / double(trials) - 0.5) < 0.01);

    auto f = fpif();
    Rng a(99), b(99);
    CHECK(random_genotype(f, a) == random_genotype(f, b));
}

TEST_CASE("crossover") {
    auto t = GeneticTopology(std::vector<Gene>{{"a", {"0", "1"}}, {"b", {"0", "1"}}, {"c", {"0", "1"}}, {"d", {"0", "1"}}});
    Genotype zeros(t, {0, 0, 0, 0}), ones(t, {1, 1, 1, 1});
    auto [c1, c2] = exchange_segment(zeros, ones, 1, 2);
    CHECK(c1 == Genotype(t, {0, 1, 1, 0}));
    CHECK(c2 == Genotype(t, {1, 0, 0, 1}));
    auto [f1, f2] = exchange_segment(zeros, ones, 0, 3);
    CHECK(f1 == ones);
    CHECK(f2 == zeros);
    auto [back1, back2] = exchange_segment(c1, c2, 1, 2);
    CHECK(back1 == zeros);
    CHECK(back2 == ones);
    CHECK_THROWS_AS(exchange_segment(zeros, ones, 2, 1), Error);
    CHECK_THROWS_AS(exchange_segment(zeros, ones, 0, 4), Error);

    Rng rng(5);
    auto [s1, s2] = crossover(zeros, zeros, rng);
    CHECK(s1 == zeros);
    CHECK(s2 == zeros);

    // Allele multiset per position is conserved and segments are uniform over the 10 (first, last) pairs.
    std::map<std::pair<int, int>, int> seen;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        auto [x, y] = crossover(zeros, ones, rng);
        int first = -1, last = -1;
        for (int g = 0; g < 4; ++g) {
            CHECK(x[g] + y[g] == 1);
            if (x[g] == 1) {
                if (first < 0) first = g;
                last = g;
            }
        }
        ++seen[{first, last}];
    }
    CHECK(seen.size() == 10);
    for (const auto& [_, count] : seen) CHECK(std::fabs(count / double(trials) - 0.1) < 0.01);

    auto other = binary(4);
    CHECK_THROWS_AS(crossover(zeros, Genotype(other, {0, 0, 0, 0}), rng), Error);
}

TEST_CASE("mutate") {
    auto t = fpif();
    Rng rng(17);
    auto g = random_genotype(t, rng);
    for (int i = 0; i < 1000; ++i) CHECK(mutate(t, g, 0.0, rng) == g);
    for (int i = 0; i < 1000; ++i) CHECK(ncd(mutate(t, g, 1.0, rng), g) == 1);
    int changed = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) changed += mutate(t, g, 0.25, rng) != g;
    CHECK(std::fabs(changed / double(trials) - 0.25) < 0.01);

    auto b = binary(10);
    auto z = Genotype(b, std::vector<std::uint16_t>(10, 0));
    double total = 0;
    for (int i = 0; i < 20000; ++i) total += static_cast<double>(ncd(mutate(b, z, 0.3, rng, MutationMode::per_gene), z));
    CHECK(std::fabs(total / 20000 - 3.0) < 0.05);
    CHECK_THROWS_AS(mutate(t, g, 1.5, rng), Error);
}

TEST_CASE("ncd is a metric") {
    auto t = GeneticTopology(std::vector<Gene>{{"a", {"0", "1", "2"}}, {"b", {"0", "1", "2"}}, {"c", {"0", "1", "2"}}});
    CHECK(ncd(Genotype(t, {0, 1, 2}), Genotype(t, {0, 2, 2})) == 1);
    auto b = binary(7);
    CHECK(ncd(Genotype(b, std::vector<std::uint16_t>(7, 0)), Genotype(b, std::vector<std::uint16_t>(7, 1))) == 7);
    auto all = all_genotypes(GeneticTopology(std::vector<Gene>{{"a", {"0", "1", "2"}}, {"b", {"0", "1"}}, {"c", {"0", "1"}}}));
    REQUIRE(all.size() == 12);
    for (const auto& x : all)
        for (const auto& y : all) {
            CHECK(ncd(x, y) == ncd(y, x));
            CHECK((ncd(x, y) == 0) == (x == y));
            for (const auto& z : all) CHECK(ncd(x, z) <= ncd(x, y) + ncd(y, z));
        }
    CHECK_THROWS_AS(ncd(Genotype(b, std::vector<std::uint16_t>(7, 0)), all[0]), Error);
}
