#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "qsarga/config.hpp"
#include "qsarga/engine.hpp"
#include "qsarga/error.hpp"
#include "qsarga/experiment.hpp"
#include "qsarga/regress.hpp"
#include "qsarga/stats.hpp"

namespace py = pybind11;
using namespace qsarga;

namespace {

py::int_ to_py(const BigInt& v) { return py::int_(py::str(v.str())); }

BigInt from_py(const py::int_& v) { return BigInt(py::str(py::handle(v)).cast<std::string>()); }

stats::ExpectedMode expected_mode(const std::string& name) {
    if (name == "exact") return stats::ExpectedMode::exact;
    if (name == "rounded") return stats::ExpectedMode::rounded;
    throw ConfigError("expected must be 'exact' or 'rounded', got '" + name + "'");
}

py::dict stat_dict(const stats::ChiSquareStat& s) {
    py::dict d;
    d["value"] = s.value;
    d["df"] = s.df;
    d["p_value"] = s.p_value;
    d["rejected"] = s.rejected;
    return d;
}

py::dict report_dict(const stats::ChiSquareReport& r) {
    py::dict d;
    py::list rows, cols;
    for (const auto& s : r.partial_row) rows.append(stat_dict(s));
    for (const auto& s : r.partial_col) cols.append(stat_dict(s));
    d["expected"] = r.expected;
    d["rows"] = rows;
    d["columns"] = cols;
    d["total"] = stat_dict(r.total);
    return d;
}

py::dict homogeneity(const std::vector<std::vector<double>>& observed, std::vector<std::string> row_labels,
                     std::vector<std::string> col_labels, double alpha, const std::string& expected) {
    stats::ContingencyTable t{observed, std::move(row_labels), std::move(col_labels)};
    if (t.row_labels.empty())
        for (std::size_t i = 0; i < observed.size(); ++i) t.row_labels.push_back("r" + std::to_string(i + 1));
    if (t.col_labels.empty() && !observed.empty())
        for (std::size_t j = 0; j < observed[0].size(); ++j) t.col_labels.push_back("c" + std::to_string(j + 1));
    return report_dict(stats::chi2_homogeneity(t, alpha, expected_mode(expected)));
}

py::dict model_dict(const RegressionModel& m) {
    py::dict d;
    d["with_intercept"] = m.with_intercept;
    d["coefficients"] = m.coefficients;
    d["std_errors"] = m.std_errors;
    d["t_stats"] = m.t_stats;
    d["r2"] = m.r2;
    d["df"] = m.df;
    d["valid"] = m.valid;
    return d;
}

py::dict fit(const std::vector<std::vector<double>>& xs, const std::vector<double>& y, bool with_intercept) {
    std::vector<std::span<const double>> cols(xs.begin(), xs.end());
    return model_dict(ols_fit(cols, y, with_intercept));
}

py::dict run_manifest(const std::string& manifest, std::optional<std::uint64_t> seed) {
    auto ws = open_workspace(manifest);
    if (seed) ws.evolution.seed = *seed;
    RunResult res;
    {
        py::gil_scoped_release release;
        res = run(ws.evolution, ws.topology, *ws.provider, ws.dataset);
    }
    py::dict d;
    d["seed"] = res.seed;
    d["fingerprint"] = res.fingerprint;
    d["log"] = res.log;
    d["generations"] = res.records.size();
    py::list trace;
    for (const auto& r : res.records) trace.append(r.best_objective ? py::cast(*r.best_objective) : py::none());
    d["best_trace"] = trace;
    if (res.best) {
        py::dict b = model_dict(res.best->model);
        b["objective"] = res.best->objective;
        b["generation"] = res.best->generation;
        b["genotypes"] = res.best->genotypes;
        d["best"] = b;
    } else {
        d["best"] = py::none();
    }
    return d;
}

py::dict grid_manifest(const std::string& manifest, std::size_t runs_per_cell, std::size_t threshold,
                       std::optional<std::uint64_t> seed, unsigned threads, double alpha, const std::string& expected) {
    auto ws = open_workspace(manifest);
    GridOptions opt;
    opt.runs_per_cell = runs_per_cell;
    opt.threshold = threshold;
    opt.threads = threads;
    opt.master_seed = seed.value_or(ws.evolution.seed);
    const auto mode = expected_mode(expected);
    GridAggregate agg;
    {
        py::gil_scoped_release release;
        agg = run_grid(ws.evolution, ws.topology, *ws.provider, ws.dataset, opt);
    }
    py::dict cells;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& c = agg.cells[i][j];
            py::dict cell;
            cell["num"] = c.num;
            cell["occ"] = c.occ;
            cell["par"] = c.par;
            cell["top_num"] = c.top_num;
            cell["top_occ"] = c.top_occ;
            cell["top_par"] = c.top_par;
            cell["runs"] = c.runs;
            cell["error"] = c.error;
            const std::string key{method_letter(grid_methods[i]), method_letter(grid_methods[j])};
            cells[py::str(key)] = cell;
        }
    py::dict d;
    d["cells"] = cells;
    d["report"] = grid_report(agg, alpha, mode);
    d["cells_csv"] = grid_cells_csv(agg);
    return d;
}

} // namespace

PYBIND11_MODULE(_qsarga, m) {
    m.doc() = "Genetic search for multiple linear regression models over descriptor families";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<SingularFit>(m, "SingularFit", base.ptr());
    py::register_exception<InsufficientViable>(m, "InsufficientViable", base.ptr());

    m.def("chi2_sf", &stats::chi2_sf, py::arg("x"), py::arg("df"));
    m.def("student_t_two_tail", &stats::student_t_two_tail, py::arg("t"), py::arg("df"));
    m.def("log_gamma", &stats::log_gamma, py::arg("x"));
    m.def("chi2_homogeneity", &homogeneity, py::arg("observed"), py::arg("row_labels") = std::vector<std::string>{},
          py::arg("col_labels") = std::vector<std::string>{}, py::arg("alpha") = 0.05,
          py::arg("expected") = "exact");

    m.def(
        "search_space_size",
        [](const py::int_& genome, unsigned n, bool both) { return to_py(search_space_size(from_py(genome), n, both)); },
        py::arg("genome"), py::arg("n"), py::arg("both_forms") = false);
    m.def(
        "genome_size", [](const std::string& path) { return to_py(genome_size(load_topology(path))); },
        py::arg("topology_path"));

    m.def("ols_fit", &fit, py::arg("regressors"), py::arg("y"), py::arg("with_intercept") = true);
    m.def("run", &run_manifest, py::arg("manifest"), py::arg("seed") = py::none());
    m.def("run_grid", &grid_manifest, py::arg("manifest"), py::arg("runs_per_cell") = 5, py::arg("threshold") = 23,
          py::arg("seed") = py::none(), py::arg("threads") = 0, py::arg("alpha") = 0.05,
          py::arg("expected") = "exact");
}
