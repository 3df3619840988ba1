#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "qsarga/rng.hpp"
#include "qsarga/scores.hpp"

namespace qsarga {

enum class Method { proportional, deterministic, tournament };

Method parse_method(std::string_view name);
std::string_view to_string(Method m);
/// One-letter label: P, D or T.
char method_letter(Method m);

struct StrategySpec {
    Method method = Method::proportional;
    bool use_ranks = false;
    std::optional<std::pair<double, double>> normalization;
    std::optional<int> significant_digits;

    void validate() const;
};

struct Extraction {
    std::vector<std::size_t> indices;
    /// Proportional draw found no positive mass and fell back to a uniform pick.
    bool uniform_fallback = false;
    /// Negative masses were shifted to start at zero.
    bool shifted = false;
};

/// Draws without replacement, each draw proportional to the remaining mass,
/// by walking the distinct-score groups. Minimizing tables are reflected
/// (f -> max + min - f) first.
Extraction extract_proportional(const ScoreTable& table, std::size_t n_sel, Rng& rng);

/// Whole groups from the best end while they fit, then a uniform subset of
/// the boundary group.
Extraction extract_deterministic(const ScoreTable& table, std::size_t n_sel, Rng& rng);

/// Random permutation; one adjacent-comparison pass over the first n_sel
/// positions pushes the weakest to position n_sel, which then faces one
/// random challenger from the rest. Exact ties are settled by a fair coin.
Extraction extract_tournament(const ScoreTable& table, std::size_t n_sel, Rng& rng);

Extraction extract(Method method, const ScoreTable& table, std::size_t n_sel, Rng& rng);

/// Mass assigned to each distinct group value by the proportional walk
/// (after reflection and shifting); exposed for tests.
std::vector<double> proportional_masses(const ScoreTable& table, bool* shifted = nullptr);

} // namespace qsarga
