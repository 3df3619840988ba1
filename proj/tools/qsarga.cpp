// qsarga command-line front end.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "qsarga/config.hpp"
#include "qsarga/csv.hpp"
#include "qsarga/descriptors.hpp"
#include "qsarga/engine.hpp"
#include "qsarga/error.hpp"
#include "qsarga/experiment.hpp"
#include "qsarga/genome.hpp"
#include "qsarga/regress.hpp"
#include "qsarga/stats.hpp"

namespace fs = std::filesystem;
using namespace qsarga;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_runtime = 3;

stats::ExpectedMode parse_expected(const std::string& s) {
    if (s == "exact") return stats::ExpectedMode::exact;
    if (s == "rounded") return stats::ExpectedMode::rounded;
    throw ConfigError("--expected must be 'exact' or 'rounded'");
}

std::string out_dir(const Workspace& ws, const std::string& override_dir) {
    std::string dir = override_dir.empty() ? ws.manifest.output_dir : override_dir;
    fs::create_directories(dir);
    return dir;
}

nlohmann::ordered_json model_json(const BestModel& b) {
    nlohmann::ordered_json j;
    j["objective"] = b.objective;
    j["generation"] = b.generation;
    j["genotypes"] = b.genotypes;
    j["with_intercept"] = b.model.with_intercept;
    j["coefficients"] = b.model.coefficients;
    j["std_errors"] = b.model.std_errors;
    j["t_stats"] = b.model.t_stats;
    j["r2"] = b.model.r2;
    j["df"] = b.model.df;
    return j;
}

int cmd_space_size(const std::optional<std::string>& big_n, const std::string& topology_path,
                   std::optional<unsigned> n, std::optional<unsigned> n_max, bool both, bool as_csv) {
    if (big_n.has_value() == !topology_path.empty())
        throw CLI::ValidationError("space-size", "give exactly one of --N or --topology");
    if (n.has_value() == n_max.has_value()) throw CLI::ValidationError("space-size", "give exactly one of --n or --n-max");
    BigInt genome;
    if (big_n) {
        try {
            genome = BigInt(*big_n);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--N", "not an integer: " + *big_n);
        }
        if (genome < 0) throw CLI::ValidationError("--N", "must be non-negative");
    } else {
        genome = load_topology(topology_path).size();
    }
    if (n) {
        std::cout << search_space_size(genome, *n, both) << "\n";
        return 0;
    }
    std::cout << (as_csv ? "n,size\n" : "n\tsize\n");
    for (unsigned i = 1; i <= *n_max; ++i)
        std::cout << i << (as_csv ? "," : "\t") << search_space_size(genome, i, both) << "\n";
    return 0;
}

int cmd_run(const std::string& manifest, const std::string& output, std::optional<std::uint64_t> seed, bool quiet) {
    auto ws = open_workspace(manifest);
    if (seed) ws.evolution.seed = *seed;
    const auto dir = out_dir(ws, output);
    auto result = run(ws.evolution, ws.topology, *ws.provider, ws.dataset);
    csv::write_file((fs::path(dir) / "run_evo.txt").string(), result.log);

    nlohmann::ordered_json summary;
    summary["seed"] = result.seed;
    summary["config"] = result.fingerprint;
    summary["objective"] = std::string(to_string(ws.evolution.objective.kind));
    summary["generations"] = result.records.size();
    summary["best"] = result.best ? model_json(*result.best) : nlohmann::ordered_json(nullptr);
    csv::write_file((fs::path(dir) / "run_summary.json").string(), summary.dump(2) + "\n");

    if (!quiet) {
        if (result.best) {
            const auto& b = *result.best;
            std::string members;
            for (const auto& g : b.genotypes) members += (members.empty() ? "" : " ") + g;
            fmt::print("best {} = {:.6g} (r2 = {:.6g}) at generation {}: {}\n", to_string(ws.evolution.objective.kind),
                       b.objective, b.model.r2, b.generation, members);
        } else {
            fmt::print("no valid model found in {} generations\n", result.records.size());
        }
        fmt::print("wrote {}\n", dir);
    }
    return 0;
}

int cmd_grid(const std::string& manifest, const std::string& output, std::size_t runs, std::size_t threshold,
             double alpha, const std::string& expected, unsigned threads, std::optional<std::uint64_t> seed) {
    const auto mode = parse_expected(expected);
    auto ws = open_workspace(manifest);
    if (seed) ws.evolution.seed = *seed;
    const auto dir = out_dir(ws, output);
    GridOptions opt;
    opt.runs_per_cell = runs;
    opt.master_seed = ws.evolution.seed;
    opt.threshold = threshold;
    opt.threads = threads;
    auto agg = run_grid(ws.evolution, ws.topology, *ws.provider, ws.dataset, opt);
    const auto report = grid_report(agg, alpha, mode);
    csv::write_file((fs::path(dir) / "grid_report.txt").string(), report);
    csv::write_file((fs::path(dir) / "grid_cells.csv").string(), grid_cells_csv(agg));
    for (auto m : all_measures)
        csv::write_file((fs::path(dir) / ("grid_" + to_string(m) + ".csv")).string(),
                        stats::contingency_to_csv(contingency_for(agg, m)));
    std::cout << report;
    int failed = 0;
    for (const auto& row : agg.cells)
        for (const auto& c : row) failed += !c.error.empty();
    return failed ? exit_runtime : 0;
}

int cmd_chi2(const std::string& path, double alpha, const std::string& expected, const std::string& title) {
    const auto mode = parse_expected(expected);
    auto table = stats::parse_contingency_csv(csv::read_file(path));
    std::cout << stats::format_report(stats::chi2_homogeneity(table, alpha, mode), title);
    return 0;
}

struct GenDataArgs {
    std::size_t m = 206;
    double mean = 6.4806;
    double sd = 0.83076;
    std::uint64_t seed = 1;
    std::string out;
    std::string descriptors;
    std::string topology;
    std::string separator;
    std::vector<std::string> planted;
    std::vector<double> weights;
    double intercept = 0.0;
    double noise = 0.0;
    double decay = 0.0;
    double low = 0.0;
    double high = 1.0;
    std::size_t max_rows = 100000;
};

int cmd_gen_data(const GenDataArgs& a) {
    if (a.m < 3) throw ConfigError("--m must be at least 3");
    if (!(a.sd >= 0.0)) throw ConfigError("--sd must be non-negative");
    Rng rng(a.seed);
    std::vector<std::string> ids;
    std::vector<double> y;
    const int width = static_cast<int>(std::to_string(a.m).size());
    for (std::size_t i = 0; i < a.m; ++i) {
        ids.push_back(fmt::format("M{:0{}}", i + 1, width));
        y.push_back(a.mean + a.sd * rng.normal());
    }
    auto ds = make_dataset(std::move(ids), std::move(y));
    csv::write_file(a.out, activity_to_csv(ds));
    if (a.descriptors.empty()) return 0;

    if (a.topology.empty()) throw ConfigError("--descriptors requires --topology");
    auto topo = load_topology(a.topology);
    topo.set_separator(a.separator);
    if (topo.size() > a.max_rows)
        throw ConfigError(fmt::format("genome size {} exceeds --max-rows {}", topo.size().str(), a.max_rows));
    SyntheticSpec spec;
    spec.seed = a.seed;
    spec.low = a.low;
    spec.high = a.high;
    spec.planted = a.planted;
    spec.weights = a.weights;
    spec.intercept = a.intercept;
    spec.noise = a.noise;
    spec.decay = a.decay;
    SyntheticProvider provider(topo, ds, spec);

    std::vector<Genotype> all;
    std::vector<std::uint16_t> idx(topo.gene_count(), 0);
    while (true) {
        all.emplace_back(topo, idx);
        std::size_t g = topo.gene_count();
        while (g > 0 && idx[g - 1] + 1u == topo.allele_count(g - 1)) idx[--g] = 0;
        if (g == 0) break;
        ++idx[g - 1];
    }
    csv::write_file(a.descriptors, descriptor_table_csv(topo, ds, provider, all));
    return 0;
}

int cmd_validate(const std::string& manifest) {
    auto ws = open_workspace(manifest);
    std::cout << "# topology (" << ws.topology.size() << " genotypes)\n"
              << serialize_topology(ws.topology) << "\n# evolution\n"
              << serialize_evolution_config(ws.evolution) << "\n# manifest\n"
              << serialize_manifest(ws.manifest);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Genetic search for multiple linear regression models over descriptor families"};
    app.require_subcommand(1);

    auto* space = app.add_subcommand("space-size", "Number of n-descriptor regressions in a genome");
    std::optional<std::string> big_n;
    std::string topology_path;
    std::optional<unsigned> n, n_max;
    bool both = false, as_csv = false;
    space->add_option("--N", big_n, "Genome size");
    space->add_option("--topology", topology_path, "Topology file giving the genome size")->check(CLI::ExistingFile);
    space->add_option("--n", n, "Regression multiplicity");
    space->add_option("--n-max", n_max, "Print sizes for n = 1..n-max");
    space->add_flag("--both", both, "Count both the intercept and no-intercept forms");
    space->add_flag("--csv", as_csv, "CSV output for ranges");

    auto* run_cmd = app.add_subcommand("run", "Run one evolution");
    std::string manifest, output;
    bool quiet = false;
    std::optional<std::uint64_t> seed;
    run_cmd->add_option("manifest", manifest, "Run manifest")->required();
    run_cmd->add_option("--out", output, "Output directory (overrides the manifest)");
    run_cmd->add_option("--seed", seed, "Master seed (overrides the manifest)");
    run_cmd->add_flag("-q,--quiet", quiet, "No console summary");

    auto* grid = app.add_subcommand("grid", "Run every selection x survival pair and test homogeneity");
    std::size_t runs = 5, threshold = 23;
    double alpha = 0.05;
    std::string expected = "exact";
    unsigned threads = 0;
    grid->add_option("manifest", manifest, "Run manifest")->required();
    grid->add_option("--out", output, "Output directory (overrides the manifest)");
    grid->add_option("--runs-per-cell", runs, "Runs per strategy pair")->check(CLI::PositiveNumber);
    grid->add_option("--threshold", threshold, "Minimum occurrences for the top genotype measures");
    grid->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    grid->add_option("--expected", expected, "Expected counts: exact or rounded");
    grid->add_option("--threads", threads, "Worker threads (0 = all cores)");
    grid->add_option("--seed", seed, "Master seed; run i of every cell uses seed + i");

    auto* stats_cmd = app.add_subcommand("stats", "Statistics utilities");
    stats_cmd->require_subcommand(1);
    auto* chi2 = stats_cmd->add_subcommand("chi2", "Homogeneity test of a labelled contingency CSV");
    std::string table_path, title;
    chi2->add_option("table", table_path, "Contingency CSV")->required()->check(CLI::ExistingFile);
    chi2->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    chi2->add_option("--expected", expected, "Expected counts: exact or rounded");
    chi2->add_option("--title", title, "Report title");

    auto* gen = app.add_subcommand("gen-data", "Write a synthetic activity file and descriptor table");
    GenDataArgs ga;
    gen->add_option("--m", ga.m, "Number of molecules");
    gen->add_option("--mean", ga.mean, "Activity mean");
    gen->add_option("--sd", ga.sd, "Activity standard deviation");
    gen->add_option("--seed", ga.seed, "Random seed");
    gen->add_option("--out", ga.out, "Activity CSV path")->required();
    gen->add_option("--descriptors", ga.descriptors, "Also write a full descriptor table here");
    gen->add_option("--topology", ga.topology, "Topology for the descriptor table")->check(CLI::ExistingFile);
    gen->add_option("--separator", ga.separator, "Allele separator used in genotype strings");
    gen->add_option("--planted", ga.planted, "Genotypes carrying the planted signal")->delimiter(',');
    gen->add_option("--weights", ga.weights, "Planted weights")->delimiter(',');
    gen->add_option("--intercept", ga.intercept, "Planted intercept");
    gen->add_option("--noise", ga.noise, "Planted noise level");
    gen->add_option("--decay", ga.decay, "Neighbourhood decay in [0, 1)");
    gen->add_option("--low", ga.low, "Lower bound of hashed descriptor values");
    gen->add_option("--high", ga.high, "Upper bound of hashed descriptor values");
    gen->add_option("--max-rows", ga.max_rows, "Refuse genomes larger than this");

    auto* validate = app.add_subcommand("validate", "Load a manifest and print the normalized inputs");
    validate->add_option("manifest", manifest, "Run manifest")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_usage;
    }

    try {
        if (*space) return cmd_space_size(big_n, topology_path, n, n_max, both, as_csv);
        if (*run_cmd) return cmd_run(manifest, output, seed, quiet);
        if (*grid) return cmd_grid(manifest, output, runs, threshold, alpha, expected, threads, seed);
        if (*chi2) return cmd_chi2(table_path, alpha, expected, title);
        if (*gen) return cmd_gen_data(ga);
        if (*validate) return cmd_validate(manifest);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_data;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}
