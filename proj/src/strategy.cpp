#include "qsarga/strategy.hpp"

#include <algorithm>
#include <numeric>

#include "qsarga/error.hpp"

namespace qsarga {

Method parse_method(std::string_view name) {
    if (name == "proportional" || name == "P") return Method::proportional;
    if (name == "deterministic" || name == "D") return Method::deterministic;
    if (name == "tournament" || name == "T") return Method::tournament;
    throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Method m) {
    switch (m) {
    case Method::proportional: return "proportional";
    case Method::deterministic: return "deterministic";
    case Method::tournament: return "tournament";
    }
    return "?";
}

char method_letter(Method m) { return static_cast<char>(std::toupper(to_string(m).front())); }

void StrategySpec::validate() const {
    if (normalization && !(normalization->first < normalization->second))
        throw ConfigError("strategy normalization bounds must satisfy n0 < n1");
    if (significant_digits && *significant_digits < 1) throw ConfigError("significant digits must be >= 1");
}

namespace {

void check_request(const ScoreTable& table, std::size_t n_sel) {
    if (n_sel < 1 || n_sel > table.size())
        throw DataError("extraction: n_sel must be between 1 and the sample size");
}

// Sample indices per distinct group, in ascending index order.
std::vector<std::vector<std::size_t>> group_members(const ScoreTable& table) {
    std::vector<std::vector<std::size_t>> groups(table.distinct.size());
    for (std::size_t i = 0; i < table.fs.size(); ++i) {
        auto it = std::lower_bound(table.distinct.begin(), table.distinct.end(), table.fs[i]);
        groups[static_cast<std::size_t>(it - table.distinct.begin())].push_back(i);
    }
    return groups;
}

std::size_t take_random(std::vector<std::size_t>& members, Rng& rng) {
    const std::size_t k = rng.below(members.size());
    const std::size_t picked = members[k];
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(k));
    return picked;
}

} // namespace

std::vector<double> proportional_masses(const ScoreTable& table, bool* shifted) {
    std::vector<double> mass = table.distinct;
    if (mass.empty()) return mass;
    const double lo = table.distinct.front();
    const double hi = table.distinct.back();
    if (table.direction == Direction::minimize)
        for (double& v : mass) v = hi + lo - v;
    const double min_mass = *std::min_element(mass.begin(), mass.end());
    if (shifted) *shifted = min_mass < 0.0;
    if (min_mass < 0.0)
        for (double& v : mass) v -= min_mass;
    return mass;
}

Extraction extract_proportional(const ScoreTable& table, std::size_t n_sel, Rng& rng) {
    check_request(table, n_sel);
    Extraction out;
    const auto mass = proportional_masses(table, &out.shifted);
    auto groups = group_members(table);
    while (out.indices.size() < n_sel) {
        double total = 0.0;
        for (std::size_t g = 0; g < groups.size(); ++g) total += mass[g] * static_cast<double>(groups[g].size());
        std::size_t chosen = groups.size();
        if (total > 0.0) {
            const double target = rng.uniform_closed() * total;
            double cumulative = 0.0;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                if (groups[g].empty() || mass[g] <= 0.0) continue;
                cumulative += mass[g] * static_cast<double>(groups[g].size());
                chosen = g;
                if (target <= cumulative) break;
            }
        } else {
            // Uniform over everything left: pick a member index, then its group.
            out.uniform_fallback = true;
            std::size_t left = 0;
            for (const auto& g : groups) left += g.size();
            std::size_t k = rng.below(left);
            for (std::size_t g = 0; g < groups.size(); ++g) {
                if (k < groups[g].size()) {
                    out.indices.push_back(groups[g][k]);
                    groups[g].erase(groups[g].begin() + static_cast<std::ptrdiff_t>(k));
                    break;
                }
                k -= groups[g].size();
            }
            continue;
        }
        out.indices.push_back(take_random(groups[chosen], rng));
    }
    return out;
}

Extraction extract_deterministic(const ScoreTable& table, std::size_t n_sel, Rng& rng) {
    check_request(table, n_sel);
    Extraction out;
    auto groups = group_members(table);
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    if (table.direction == Direction::maximize) std::reverse(order.begin(), order.end());
    for (std::size_t g : order) {
        auto& members = groups[g];
        const std::size_t room = n_sel - out.indices.size();
        if (room == 0) break;
        if (members.size() <= room) {
            out.indices.insert(out.indices.end(), members.begin(), members.end());
            continue;
        }
        while (out.indices.size() < n_sel) out.indices.push_back(take_random(members, rng));
    }
    return out;
}

Extraction extract_tournament(const ScoreTable& table, std::size_t n_sel, Rng& rng) {
    check_request(table, n_sel);
    const std::size_t p = table.size();
    const auto& fs = table.fs;
    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span(perm));

    for (std::size_t i = 1; i < n_sel; ++i) {
        const double cur = fs[perm[i]];
        const double prev = fs[perm[i - 1]];
        if (better(cur, prev, table.direction) || (cur == prev && rng.coin())) std::swap(perm[i], perm[i - 1]);
    }
    if (n_sel < p) {
        const std::size_t challenger = n_sel + rng.below(p - n_sel);
        const double last = fs[perm[n_sel - 1]];
        const double other = fs[perm[challenger]];
        if (better(other, last, table.direction) || (other == last && rng.coin()))
            std::swap(perm[n_sel - 1], perm[challenger]);
    }
    perm.resize(n_sel);
    return Extraction{std::move(perm), false, false};
}

Extraction extract(Method method, const ScoreTable& table, std::size_t n_sel, Rng& rng) {
    switch (method) {
    case Method::proportional: return extract_proportional(table, n_sel, rng);
    case Method::deterministic: return extract_deterministic(table, n_sel, rng);
    case Method::tournament: return extract_tournament(table, n_sel, rng);
    }
    throw ConfigError("unknown strategy");
}

} // namespace qsarga
