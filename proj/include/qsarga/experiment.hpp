#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qsarga/engine.hpp"
#include "qsarga/stats.hpp"

namespace qsarga {

/// Strategy order used for grid rows (selection) and columns (survival).
inline constexpr std::array<Method, 3> grid_methods = {Method::proportional, Method::tournament,
                                                       Method::deterministic};

struct GenotypeTally {
    /// Improving generations in which the genotype was in the sample.
    std::size_t occurrences = 0;
    /// Of those, the ones where it took part in at least one valid regression.
    std::size_t participations = 0;
};

struct CellCounts {
    std::size_t num = 0;
    std::size_t occ = 0;
    std::size_t par = 0;
    std::size_t top_num = 0;
    std::size_t top_occ = 0;
    std::size_t top_par = 0;
    std::size_t runs = 0;
    std::map<std::string, GenotypeTally> genotypes;
    /// Non-empty when a run failed; the cell's counts are then zero.
    std::string error;
};

/// Counts per (selection, survival) pair, indexed in grid_methods order.
struct GridAggregate {
    std::array<std::array<CellCounts, 3>, 3> cells;
    std::size_t threshold = 23;
    std::size_t runs_per_cell = 0;
};

/// Adds the improving generations of one run to a per-genotype tally.
void tally_records(const std::vector<GenerationRecord>& records, std::map<std::string, GenotypeTally>& into);

/// Derives Num/Occ/Par and the top-k restriction (occurrences >= threshold).
void finalize_cell(CellCounts& cell, std::size_t threshold);

struct GridOptions {
    std::size_t runs_per_cell = 5;
    std::uint64_t master_seed = 1;
    std::size_t threshold = 23;
    /// When non-empty, replaces the derived per-run seeds (master_seed + run index).
    std::vector<std::uint64_t> seeds;
    /// 0 means hardware concurrency.
    unsigned threads = 0;
};

/// Runs every selection x survival pair over the same run seeds and aggregates
/// the improving generations. A failing run marks only its own cell.
GridAggregate run_grid(const EvolutionConfig& base, const GeneticTopology& topology,
                       const DescriptorProvider& provider, const Dataset& ds, const GridOptions& options);

enum class Measure { num, occ, par, top_num, top_occ, top_par };

inline constexpr std::array<Measure, 6> all_measures = {Measure::num,     Measure::occ,     Measure::par,
                                                        Measure::top_num, Measure::top_occ, Measure::top_par};

std::string to_string(Measure m);
Measure parse_measure(std::string_view name);

/// 3x3 table: rows are selection strategies, columns survival strategies.
stats::ContingencyTable contingency_for(const GridAggregate& agg, Measure measure);

/// Throws DataError naming the empty cell when a margin is zero.
stats::ChiSquareReport homogeneity_analysis(const GridAggregate& agg, Measure measure, double alpha = 0.05,
                                            stats::ExpectedMode mode = stats::ExpectedMode::exact);

/// Per-cell counts and most frequent genotypes, then one homogeneity report per measure.
std::string grid_report(const GridAggregate& agg, double alpha, stats::ExpectedMode mode);

/// One row per cell with all six measures.
std::string grid_cells_csv(const GridAggregate& agg);

} // namespace qsarga
