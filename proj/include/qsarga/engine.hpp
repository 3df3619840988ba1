#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsarga/descriptors.hpp"
#include "qsarga/genome.hpp"
#include "qsarga/regress.hpp"
#include "qsarga/rng.hpp"
#include "qsarga/scores.hpp"
#include "qsarga/strategy.hpp"

namespace qsarga {

enum class InterceptMode {
    /// Fit with intercept; drop to the no-intercept form when b0 is insignificant.
    fallback,
    /// Fit and assess both forms for every subset (search space doubled).
    both,
};

struct EvolutionConfig {
    std::size_t p = 20;   // sample size
    std::size_t n = 2;    // regression multiplicity
    std::size_t k = 3;    // pairs extracted per generation
    double pp = 0.05;     // parent mutation probability
    double cp = 0.05;     // child mutation probability
    MutationMode mutation_mode = MutationMode::per_genotype;
    bool keep_best = true;
    ObjectiveSpec objective;
    StrategySpec selection;
    SelectionAggregate selection_aggregate;
    StrategySpec survival = [] {
        StrategySpec s;
        s.method = Method::deterministic;
        return s;
    }();
    double q = 1.0;
    double r = 1.0;
    double similarity_cap = default_similarity_cap;
    ValidityRules validity;
    ViabilityPolicy viability;
    std::size_t max_generations = 100;
    std::optional<double> target_objective;
    std::uint64_t seed = 1;
    InterceptMode intercept_mode = InterceptMode::fallback;

    /// Throws ConfigError unless n < p < genome size, 2k <= p, probabilities
    /// lie in [0, 1] and max_generations >= 1.
    void validate(const BigInt& genome_size) const;
};

/// Sample member: genotype with its phenotype values.
struct Member {
    Genotype genotype;
    std::vector<double> values;
    std::string label;
};

struct BestModel {
    RegressionModel model;
    double objective = 0.0;
    std::vector<std::string> genotypes;
    std::size_t generation = 0;
};

struct GenerationRecord {
    std::size_t generation = 0;
    /// Global best objective after this generation's sweep, if any valid model was seen.
    std::optional<double> best_objective;
    bool improved = false;
    std::vector<std::string> best_model_genotypes;
    /// Sample as evaluated in this generation (before replacement).
    std::vector<std::string> sample_genotypes;
    std::size_t valid_regression_count = 0;
    /// Valid regressions containing each sample member.
    std::vector<std::size_t> participation;
    /// Viable children that replaced sample members.
    std::size_t replaced = 0;
};

/// Owns the mutable state of one evolution run.
class Engine {
public:
    Engine(EvolutionConfig cfg, const GeneticTopology& topology, const DescriptorProvider& provider,
           const Dataset& ds);

    /// Fills the sample with p distinct viable genotypes.
    /// Throws InsufficientViable with a histogram of rejection reasons.
    void init_sample();

    /// One pass of the loop: fit all subsets, score, select pairs, mutate,
    /// cross over, filter children, and replace survival victims.
    GenerationRecord run_generation();

    const std::vector<Member>& sample() const noexcept { return sample_; }
    const std::optional<BestModel>& best() const noexcept { return best_; }
    const EvolutionConfig& config() const noexcept { return cfg_; }
    bool target_reached() const;

    /// Fits and assesses one member subset under the configured intercept
    /// mode; returns the valid forms.
    std::vector<RegressionModel> fit_subset(const std::vector<std::size_t>& subset) const;

private:
    EvolutionConfig cfg_;
    const GeneticTopology& topology_;
    const DescriptorProvider& provider_;
    const Dataset& ds_;
    Rng rng_;
    std::vector<Member> sample_;
    std::optional<BestModel> best_;
    std::optional<NormalizationState> selection_norm_;
    std::optional<NormalizationState> survival_norm_;
    std::size_t generation_ = 0;
};

struct RunResult {
    std::optional<BestModel> best;
    std::vector<GenerationRecord> records;
    std::string log;
    std::uint64_t seed = 0;
    std::string fingerprint;
};

/// Runs generations until the target objective is met or max_generations is exhausted.
RunResult run(const EvolutionConfig& cfg, const GeneticTopology& topology, const DescriptorProvider& provider,
              const Dataset& ds);

/// Run log: one `#config=<hex>\tseed=<n>` header line, then per generation
/// `gen\timproved\tbest_objective\tmodel=..\tvalid=..\tsample=..\tpart=..`.
std::string format_log_header(const EvolutionConfig& cfg);
std::string format_record(const GenerationRecord& rec);
std::vector<GenerationRecord> parse_run_log(const std::string& text);

/// Fingerprint of the normalized configuration text (FNV-1a, 16 hex digits).
std::string config_fingerprint(const EvolutionConfig& cfg);

/// Visits every n-subset of {0..p-1} in lexicographic order.
template <class F>
void for_each_combination(std::size_t p, std::size_t n, F&& visit) {
    if (n == 0 || n > p) return;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    while (true) {
        visit(static_cast<const std::vector<std::size_t>&>(idx));
        std::size_t i = n;
        while (i > 0 && idx[i - 1] == p - n + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace qsarga
