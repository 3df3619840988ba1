#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsarga/genome.hpp"
#include "qsarga/regress.hpp"

namespace qsarga {

enum class Direction { minimize, maximize };

/// True when a is strictly better than b.
constexpr bool better(double a, double b, Direction d) { return d == Direction::maximize ? a > b : a < b; }

enum class ObjectiveKind { se, r2, mt, hr };

/// se: sum |Yhat - Y|^s (min); r2: (r^2)^s (max);
/// mt: power mean of |t| over the slopes (max); hr: log2(r^2s + (1 - r^2)^s) / (1 - s) (min).
struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::r2;
    double s = 1.0;

    Direction direction() const noexcept {
        return kind == ObjectiveKind::se || kind == ObjectiveKind::hr ? Direction::minimize : Direction::maximize;
    }
    /// Throws ConfigError unless s > 0 (and s != 1 for hr).
    void validate() const;
};

ObjectiveKind parse_objective_kind(std::string_view name);
std::string_view to_string(ObjectiveKind kind);

double objective_score(const RegressionModel& model, const ObjectiveSpec& spec);

enum class Reducer { min, max, avg };

/// Per-genotype aggregate over the valid regressions containing it:
/// either their count (nalive) or the min/max/average of an objective score.
struct SelectionAggregate {
    bool nalive = true;
    ObjectiveSpec score;
    Reducer reducer = Reducer::avg;

    Direction direction() const noexcept { return nalive ? Direction::maximize : score.direction(); }
    std::string name() const;
    /// Accepts "nalive" or "<se|r2|mt|hr>_<min|max|avg>".
    static SelectionAggregate parse(std::string_view name, double s);
};

struct SelectionScores {
    std::vector<double> scores;
    /// Genotypes that appear in no valid regression.
    std::vector<bool> unmatched;
    bool no_models = false;
};

/// `models` are the valid regressions; their member ids index the sample.
/// Unmatched genotypes get the worst value for the direction: 0 when
/// maximizing, the largest observed score when minimizing.
SelectionScores selection_scores(std::size_t sample_size, std::span<const RegressionModel> models,
                                 const SelectionAggregate& aggregate);

/// Running extremes used to map scores onto a fixed scale [n0, n1] across generations.
struct NormalizationState {
    double n0 = 0.0;
    double n1 = 1.0;
    bool initialized = false;
    double global_min = 0.0;
    double global_max = 0.0;
};

/// Sorted scores grouped by distinct value.
struct ScoreTable {
    /// Transformed score per sample index.
    std::vector<double> fs;
    /// Strictly increasing distinct values of fs.
    std::vector<double> distinct;
    /// Occurrences of each distinct value.
    std::vector<std::size_t> counts;
    Direction direction = Direction::maximize;
    bool degenerate_normalization = false;

    std::size_t size() const noexcept { return fs.size(); }
};

ScoreTable make_score_table(std::vector<double> fs, Direction direction);

double round_significant(double v, int digits);

/// Spearman mid-ranks, ascending, starting at 1.
std::vector<double> mid_ranks(std::span<const double> values);

/// 2 * midrank - 1: tie-aware integer ranks starting at 1.
std::vector<double> integer_ranks(std::span<const double> values);

/// Normalization (when state is given), rounding to significant digits,
/// rank replacement, then grouping. Throws DataError on non-finite input.
ScoreTable transform_scores(std::span<const double> fs, Direction direction, NormalizationState* state,
                            std::optional<int> digits, bool use_ranks);

inline constexpr double default_similarity_cap = 1e12;

/// VS(i) = min over j != i of 2 / (|f_i - f_j|^q + (ncd(g_i, g_j) / NC)^r),
/// capped at `cap`. Higher means more redundant.
std::vector<double> survival_scores(std::span<const Genotype> genotypes, std::span<const double> fs, double q,
                                    double r, double cap = default_similarity_cap);

/// The pairwise similarity used by survival_scores.
double pair_similarity(const Genotype& a, const Genotype& b, double fa, double fb, double q, double r,
                       double cap = default_similarity_cap);

} // namespace qsarga
