#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsarga/genome.hpp"

namespace qsarga {

/// Molecule identifiers with the observed activity Y.
struct Dataset {
    std::vector<std::string> molecule_ids;
    std::vector<double> activity;

    std::size_t size() const noexcept { return activity.size(); }
};

/// Throws DataError unless m >= 3, ids are distinct and activity values finite.
Dataset make_dataset(std::vector<std::string> ids, std::vector<double> activity);

/// Activity CSV: header `molecule,activity`, then one row per molecule.
Dataset parse_activity_csv(std::string_view text);
Dataset load_activity(const std::string& path);
std::string activity_to_csv(const Dataset& ds);

/// A genotype's realized descriptor values over the molecule set.
struct Phenotype {
    std::vector<double> values;
    Genotype source;
};

/// Source of phenotypes. Implementations are read-only after construction
/// and provide() is safe to call concurrently.
class DescriptorProvider {
public:
    virtual ~DescriptorProvider() = default;

    /// Phenotype values for g, or nullopt when the provider does not define it.
    virtual std::optional<std::vector<double>> provide(const Genotype& g) const = 0;

    /// Every genotype the provider knows, when that set is finite and known.
    virtual std::optional<std::vector<Genotype>> catalogue() const { return std::nullopt; }
};

/// Exact lookup in a wide descriptor table: header `genotype,<mol_1>,...,<mol_m>`.
/// Columns are matched to the dataset's molecule ids (any order); NaN/Inf cells are kept.
class TableProvider final : public DescriptorProvider {
public:
    TableProvider(const GeneticTopology& topology, const Dataset& ds, std::string_view csv_text);

    std::optional<std::vector<double>> provide(const Genotype& g) const override;
    std::optional<std::vector<Genotype>> catalogue() const override;
    std::size_t row_count() const noexcept { return rows_.size(); }

private:
    std::map<Genotype, std::vector<double>> rows_;
};

TableProvider load_descriptor_table(const GeneticTopology& topology, const Dataset& ds, const std::string& path);

/// Writes a descriptor table for the given genotypes using provider values.
std::string descriptor_table_csv(const GeneticTopology& topology, const Dataset& ds,
                                 const DescriptorProvider& provider, std::span<const Genotype> genotypes);

struct SyntheticSpec {
    std::uint64_t seed = 0;
    double low = 0.0;
    double high = 1.0;
    /// Rendered genotypes whose phenotypes realize Y = intercept + sum(w_j X_j) + noise.
    std::vector<std::string> planted;
    /// One weight per planted genotype; empty means all ones.
    std::vector<double> weights;
    double intercept = 0.0;
    double noise = 0.0;
    /// Genotypes at distance d from their nearest planted genotype blend
    /// decay^d of its values with their own; 0 disables the neighbourhood.
    double decay = 0.0;
};

/// Deterministic pseudo-random descriptors hashed from (seed, genotype, molecule),
/// uniform on [low, high), with an optional planted linear signal.
class SyntheticProvider final : public DescriptorProvider {
public:
    SyntheticProvider(const GeneticTopology& topology, const Dataset& ds, SyntheticSpec spec);

    std::optional<std::vector<double>> provide(const Genotype& g) const override;

    const SyntheticSpec& spec() const noexcept { return spec_; }
    const std::vector<Genotype>& planted() const noexcept { return planted_; }

private:
    std::vector<double> hashed_values(const Genotype& g) const;

    SyntheticSpec spec_;
    std::size_t molecules_;
    std::vector<Genotype> planted_;
    std::vector<std::vector<double>> planted_values_;
};

struct ViabilityPolicy {
    std::optional<double> min_cv;
    std::optional<double> jb_alpha;
    std::optional<double> min_simple_r2;

    /// Throws ConfigError for out-of-range thresholds.
    void validate() const;
};

struct ViabilityReport {
    bool finite = true;
    bool varied = true;
    bool cv_ok = true;
    bool normal_ok = true;
    bool explanatory_ok = true;

    bool viable() const noexcept { return finite && varied && cv_ok && normal_ok && explanatory_ok; }
    /// Comma-separated names of the failed criteria.
    std::string failures() const;
};

ViabilityReport check_viability(std::span<const double> values, const Dataset& ds, const ViabilityPolicy& policy);

/// Squared Pearson correlation; 0 when either vector has no spread.
double squared_correlation(std::span<const double> x, std::span<const double> y);

} // namespace qsarga
