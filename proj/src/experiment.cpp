#include "qsarga/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "qsarga/error.hpp"

namespace qsarga {

void tally_records(const std::vector<GenerationRecord>& records, std::map<std::string, GenotypeTally>& into) {
    for (const auto& rec : records) {
        if (!rec.improved) continue;
        for (std::size_t i = 0; i < rec.sample_genotypes.size(); ++i) {
            auto& t = into[rec.sample_genotypes[i]];
            ++t.occurrences;
            if (i < rec.participation.size() && rec.participation[i] > 0) ++t.participations;
        }
    }
}

void finalize_cell(CellCounts& cell, std::size_t threshold) {
    cell.num = cell.occ = cell.par = 0;
    cell.top_num = cell.top_occ = cell.top_par = 0;
    for (const auto& [_, t] : cell.genotypes) {
        ++cell.num;
        cell.occ += t.occurrences;
        cell.par += t.participations;
        if (t.occurrences >= threshold) {
            ++cell.top_num;
            cell.top_occ += t.occurrences;
            cell.top_par += t.participations;
        }
    }
}

GridAggregate run_grid(const EvolutionConfig& base, const GeneticTopology& topology,
                       const DescriptorProvider& provider, const Dataset& ds, const GridOptions& options) {
    std::vector<std::uint64_t> seeds = options.seeds;
    if (seeds.empty()) {
        if (options.runs_per_cell < 1) throw ConfigError("runs_per_cell must be >= 1");
        for (std::size_t r = 0; r < options.runs_per_cell; ++r) seeds.push_back(options.master_seed + r);
    }
    const std::size_t runs = seeds.size();
    const std::size_t tasks = 9 * runs;

    struct Outcome {
        std::map<std::string, GenotypeTally> tally;
        std::string error;
    };
    std::vector<Outcome> outcomes(tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            const std::size_t cell = t / runs;
            EvolutionConfig cfg = base;
            cfg.selection.method = grid_methods[cell / 3];
            cfg.survival.method = grid_methods[cell % 3];
            cfg.seed = seeds[t % runs];
            try {
                tally_records(run(cfg, topology, provider, ds).records, outcomes[t].tally);
            } catch (const std::exception& e) {
                outcomes[t].error = fmt::format("run seed {}: {}", cfg.seed, e.what());
            }
        }
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    GridAggregate agg;
    agg.threshold = options.threshold;
    agg.runs_per_cell = runs;
    for (std::size_t cell = 0; cell < 9; ++cell) {
        auto& c = agg.cells[cell / 3][cell % 3];
        c.runs = runs;
        for (std::size_t r = 0; r < runs; ++r) {
            auto& o = outcomes[cell * runs + r];
            if (!o.error.empty() && c.error.empty()) c.error = o.error;
            for (const auto& [g, t] : o.tally) {
                auto& acc = c.genotypes[g];
                acc.occurrences += t.occurrences;
                acc.participations += t.participations;
            }
        }
        if (!c.error.empty()) c.genotypes.clear();
        finalize_cell(c, agg.threshold);
    }
    return agg;
}

std::string to_string(Measure m) {
    switch (m) {
    case Measure::num: return "num";
    case Measure::occ: return "occ";
    case Measure::par: return "par";
    case Measure::top_num: return "top_num";
    case Measure::top_occ: return "top_occ";
    case Measure::top_par: return "top_par";
    }
    return "?";
}

Measure parse_measure(std::string_view name) {
    for (auto m : all_measures)
        if (to_string(m) == name) return m;
    throw ConfigError("unknown measure '" + std::string(name) + "'");
}

namespace {

std::size_t measure_value(const CellCounts& c, Measure m) {
    switch (m) {
    case Measure::num: return c.num;
    case Measure::occ: return c.occ;
    case Measure::par: return c.par;
    case Measure::top_num: return c.top_num;
    case Measure::top_occ: return c.top_occ;
    case Measure::top_par: return c.top_par;
    }
    return 0;
}

std::string label(std::size_t i) { return std::string(1, method_letter(grid_methods[i])); }

std::string measure_title(Measure m, std::size_t threshold) {
    switch (m) {
    case Measure::num: return "Number of distinct genotypes";
    case Measure::occ: return "Total occurrences of genotypes";
    case Measure::par: return "Genotypes providing valid regressions";
    case Measure::top_num: return fmt::format("Number of distinct genotypes with >= {} occurrences", threshold);
    case Measure::top_occ: return fmt::format("Total occurrences of genotypes with >= {} occurrences", threshold);
    case Measure::top_par:
        return fmt::format("Genotypes with >= {} occurrences providing valid regressions", threshold);
    }
    return {};
}

} // namespace

stats::ContingencyTable contingency_for(const GridAggregate& agg, Measure measure) {
    stats::ContingencyTable t;
    for (std::size_t i = 0; i < 3; ++i) {
        t.row_labels.push_back(label(i));
        t.col_labels.push_back(label(i));
        std::vector<double> row;
        for (std::size_t j = 0; j < 3; ++j) row.push_back(static_cast<double>(measure_value(agg.cells[i][j], measure)));
        t.observed.push_back(std::move(row));
    }
    return t;
}

stats::ChiSquareReport homogeneity_analysis(const GridAggregate& agg, Measure measure, double alpha,
                                            stats::ExpectedMode mode) {
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (!agg.cells[i][j].error.empty())
                throw DataError(fmt::format("cell {}:{} failed: {}", label(i), label(j), agg.cells[i][j].error));
    auto table = contingency_for(agg, measure);
    for (std::size_t i = 0; i < 3; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            row += table.observed[i][j];
            col += table.observed[j][i];
        }
        if (row == 0.0)
            throw DataError(fmt::format("{}: selection strategy {} has zero counts in every cell", to_string(measure),
                                        label(i)));
        if (col == 0.0)
            throw DataError(fmt::format("{}: survival strategy {} has zero counts in every cell", to_string(measure),
                                        label(i)));
    }
    return stats::chi2_homogeneity(table, alpha, mode);
}

std::string grid_report(const GridAggregate& agg, double alpha, stats::ExpectedMode mode) {
    std::string out = fmt::format("Strategy grid: {} runs per cell, top threshold {}\n\n", agg.runs_per_cell,
                                  agg.threshold);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& c = agg.cells[i][j];
            out += fmt::format("Selection {} / Survival {}\n", label(i), label(j));
            if (!c.error.empty()) {
                out += "  FAILED: " + c.error + "\n\n";
                continue;
            }
            out += fmt::format("  {:<24}{:>8}{:>10}{:>10}\n", "Gen", "Num", "Occ", "Par");
            out += fmt::format("  {:<24}{:>8}{:>10}{:>10}\n", fmt::format("T{}", agg.threshold), c.top_num, c.top_occ,
                               c.top_par);
            std::vector<std::pair<std::string, GenotypeTally>> top;
            for (const auto& [g, t] : c.genotypes)
                if (t.occurrences >= agg.threshold) top.emplace_back(g, t);
            std::stable_sort(top.begin(), top.end(),
                             [](const auto& a, const auto& b) { return a.second.occurrences > b.second.occurrences; });
            for (const auto& [g, t] : top)
                out += fmt::format("  {:<24}{:>8}{:>10}{:>10}\n", g, "", t.occurrences, t.participations);
            out += fmt::format("  {:<24}{:>8}{:>10}{:>10}\n\n", "Tot", c.num, c.occ, c.par);
        }
    for (auto m : all_measures) {
        out += fmt::format("== {} ({}) ==\n", measure_title(m, agg.threshold), to_string(m));
        try {
            out += stats::format_report(homogeneity_analysis(agg, m, alpha, mode));
        } catch (const DataError& e) {
            out += std::string("not computable: ") + e.what() + "\n";
        }
        out += "\n";
    }
    return out;
}

std::string grid_cells_csv(const GridAggregate& agg) {
    std::string out = "selection,survival,runs,num,occ,par,top_num,top_occ,top_par\n";
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& c = agg.cells[i][j];
            out += fmt::format("{},{},{},{},{},{},{},{},{}\n", label(i), label(j), c.runs, c.num, c.occ, c.par,
                               c.top_num, c.top_occ, c.top_par);
        }
    return out;
}

} // namespace qsarga
