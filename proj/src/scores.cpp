#include "qsarga/scores.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "qsarga/error.hpp"

namespace qsarga {

void ObjectiveSpec::validate() const {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("objective exponent s must be positive");
    if (kind == ObjectiveKind::hr && s == 1.0) throw ConfigError("hr objective is undefined for s = 1");
}

ObjectiveKind parse_objective_kind(std::string_view name) {
    if (name == "se") return ObjectiveKind::se;
    if (name == "r2") return ObjectiveKind::r2;
    if (name == "mt") return ObjectiveKind::mt;
    if (name == "hr") return ObjectiveKind::hr;
    throw ConfigError("unknown objective '" + std::string(name) + "' (expected se, r2, mt or hr)");
}

std::string_view to_string(ObjectiveKind kind) {
    switch (kind) {
    case ObjectiveKind::se: return "se";
    case ObjectiveKind::r2: return "r2";
    case ObjectiveKind::mt: return "mt";
    case ObjectiveKind::hr: return "hr";
    }
    return "?";
}

double objective_score(const RegressionModel& model, const ObjectiveSpec& spec) {
    spec.validate();
    const double s = spec.s;
    switch (spec.kind) {
    case ObjectiveKind::se: return model.error_sum(s);
    case ObjectiveKind::r2: return std::pow(model.r2, s);
    case ObjectiveKind::mt: {
        const auto t = model.slope_t();
        double acc = 0.0;
        for (double v : t) acc += std::pow(std::fabs(v), s);
        return std::pow(acc / static_cast<double>(t.size()), 1.0 / s);
    }
    case ObjectiveKind::hr: {
        const double r2 = std::clamp(model.r2, 0.0, 1.0);
        return std::log2(std::pow(r2, s) + std::pow(1.0 - r2, s)) / (1.0 - s);
    }
    }
    return 0.0;
}

std::string SelectionAggregate::name() const {
    if (nalive) return "nalive";
    const char* red = reducer == Reducer::min ? "min" : reducer == Reducer::max ? "max" : "avg";
    return std::string(to_string(score.kind)) + "_" + red;
}

SelectionAggregate SelectionAggregate::parse(std::string_view name, double s) {
    SelectionAggregate agg;
    if (name == "nalive") return agg;
    auto us = name.find('_');
    if (us == std::string_view::npos) throw ConfigError("unknown selection score '" + std::string(name) + "'");
    agg.nalive = false;
    agg.score = ObjectiveSpec{parse_objective_kind(name.substr(0, us)), s};
    auto red = name.substr(us + 1);
    if (red == "min") agg.reducer = Reducer::min;
    else if (red == "max") agg.reducer = Reducer::max;
    else if (red == "avg") agg.reducer = Reducer::avg;
    else throw ConfigError("unknown selection reducer '" + std::string(red) + "'");
    agg.score.validate();
    return agg;
}

SelectionScores selection_scores(std::size_t sample_size, std::span<const RegressionModel> models,
                                 const SelectionAggregate& aggregate) {
    SelectionScores out;
    out.scores.assign(sample_size, 0.0);
    out.unmatched.assign(sample_size, true);
    out.no_models = models.empty();
    std::vector<std::size_t> count(sample_size, 0);
    std::vector<double> acc(sample_size, 0.0);
    for (const auto& model : models) {
        const double v = aggregate.nalive ? 1.0 : objective_score(model, aggregate.score);
        for (auto id : model.members) {
            if (id >= sample_size) throw DataError("selection_scores: model member outside the sample");
            if (count[id]++ == 0) {
                acc[id] = v;
                continue;
            }
            switch (aggregate.reducer) {
            case Reducer::min: acc[id] = std::min(acc[id], v); break;
            case Reducer::max: acc[id] = std::max(acc[id], v); break;
            case Reducer::avg: acc[id] += v; break;
            }
        }
    }
    double worst_min_dir = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < sample_size; ++i) {
        if (count[i] == 0) continue;
        out.unmatched[i] = false;
        if (aggregate.nalive) out.scores[i] = static_cast<double>(count[i]);
        else if (aggregate.reducer == Reducer::avg) out.scores[i] = acc[i] / static_cast<double>(count[i]);
        else out.scores[i] = acc[i];
        worst_min_dir = any ? std::max(worst_min_dir, out.scores[i]) : out.scores[i];
        any = true;
    }
    if (aggregate.direction() == Direction::minimize)
        for (std::size_t i = 0; i < sample_size; ++i)
            if (out.unmatched[i]) out.scores[i] = worst_min_dir;
    return out;
}

ScoreTable make_score_table(std::vector<double> fs, Direction direction) {
    ScoreTable t;
    t.direction = direction;
    std::vector<double> sorted = fs;
    std::sort(sorted.begin(), sorted.end());
    for (double v : sorted) {
        if (t.distinct.empty() || t.distinct.back() != v) {
            t.distinct.push_back(v);
            t.counts.push_back(1);
        } else {
            ++t.counts.back();
        }
    }
    t.fs = std::move(fs);
    return t;
}

double round_significant(double v, int digits) {
    if (digits < 1) throw ConfigError("significant digits must be >= 1");
    if (v == 0.0 || !std::isfinite(v)) return v;
    const auto text = fmt::format("{:.{}e}", v, digits - 1);
    return std::strtod(text.c_str(), nullptr);
}

std::vector<double> mid_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

std::vector<double> integer_ranks(std::span<const double> values) {
    auto r = mid_ranks(values);
    for (double& v : r) v = 2.0 * v - 1.0;
    return r;
}

ScoreTable transform_scores(std::span<const double> fs, Direction direction, NormalizationState* state,
                            std::optional<int> digits, bool use_ranks) {
    std::vector<double> v(fs.begin(), fs.end());
    for (double x : v)
        if (!std::isfinite(x)) throw DataError("transform_scores: non-finite score");
    bool degenerate = false;
    if (state && !v.empty()) {
        if (!(state->n0 < state->n1)) throw ConfigError("normalization bounds must satisfy n0 < n1");
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        if (!state->initialized) {
            state->global_min = *lo;
            state->global_max = *hi;
            state->initialized = true;
        } else {
            state->global_min = std::min(state->global_min, *lo);
            state->global_max = std::max(state->global_max, *hi);
        }
        const double span = state->global_max - state->global_min;
        if (span == 0.0) {
            degenerate = true;
            std::fill(v.begin(), v.end(), state->n0);
        } else {
            for (double& x : v) x = state->n0 + (x - state->global_min) * (state->n1 - state->n0) / span;
        }
    }
    if (digits)
        for (double& x : v) x = round_significant(x, *digits);
    if (use_ranks) v = integer_ranks(v);
    auto table = make_score_table(std::move(v), direction);
    table.degenerate_normalization = degenerate;
    return table;
}

double pair_similarity(const Genotype& a, const Genotype& b, double fa, double fb, double q, double r, double cap) {
    const double vsp = std::pow(std::fabs(fa - fb), q);
    const double vsg = std::pow(static_cast<double>(ncd(a, b)) / static_cast<double>(a.size()), r);
    const double den = vsp + vsg;
    if (den <= 0.0) return cap;
    return std::min(2.0 / den, cap);
}

std::vector<double> survival_scores(std::span<const Genotype> genotypes, std::span<const double> fs, double q,
                                    double r, double cap) {
    if (genotypes.size() != fs.size()) throw DataError("survival_scores: score count differs from sample size");
    if (genotypes.size() < 2) throw DataError("survival_scores: need at least two genotypes");
    if (!(q > 0.0) || !(r > 0.0)) throw ConfigError("survival exponents q and r must be positive");
    const std::size_t p = genotypes.size();
    std::vector<double> vs(p, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            const double s = pair_similarity(genotypes[i], genotypes[j], fs[i], fs[j], q, r, cap);
            vs[i] = std::min(vs[i], s);
            vs[j] = std::min(vs[j], s);
        }
    return vs;
}

} // namespace qsarga
