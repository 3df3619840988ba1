#include "qsarga/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "qsarga/csv.hpp"
#include "qsarga/error.hpp"

namespace qsarga {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

namespace {

pt::ptree parse_ini(std::string_view text, const std::map<std::string, std::set<std::string>>& schema) {
    std::string cleaned;
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
        if (auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
        cleaned += line + "\n";
    }
    pt::ptree tree;
    std::istringstream in(cleaned);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }
    for (const auto& [section, body] : tree) {
        auto it = schema.find(section);
        if (it == schema.end() || (body.empty() && !body.data().empty()))
            throw ConfigError("config: unknown section or top-level key '" + section + "'");
        for (const auto& [key, _] : body)
            if (!it->second.contains(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
    }
    return tree;
}

std::optional<std::string> get(const pt::ptree& tree, const std::string& section, const std::string& key) {
    auto s = tree.get_child_optional(section);
    if (!s) return std::nullopt;
    auto v = s->get_optional<std::string>(key);
    if (!v || v->empty()) return std::nullopt;
    return *v;
}

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double as_double(const std::string& v, const std::string& section, const std::string& key) {
    try {
        return csv::to_double(v, where(section, key));
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

std::uint64_t as_uint(const std::string& v, const std::string& section, const std::string& key) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(where(section, key) + ": expected a nonnegative integer, got '" + v + "'");
    return out;
}

bool as_bool(const std::string& v, const std::string& section, const std::string& key) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(where(section, key) + ": expected true or false, got '" + v + "'");
}

std::pair<double, double> as_pair(const std::string& v, const std::string& section, const std::string& key) {
    auto fields = csv::parse(v);
    if (fields.size() != 1 || fields[0].size() != 2)
        throw ConfigError(where(section, key) + ": expected 'low, high'");
    return {as_double(fields[0][0], section, key), as_double(fields[0][1], section, key)};
}

void read_strategy(const pt::ptree& tree, const std::string& section, StrategySpec& spec) {
    if (auto v = get(tree, section, "method")) spec.method = parse_method(*v);
    if (auto v = get(tree, section, "ranks")) spec.use_ranks = as_bool(*v, section, "ranks");
    if (auto v = get(tree, section, "normalize")) spec.normalization = as_pair(*v, section, "normalize");
    if (auto v = get(tree, section, "digits"))
        spec.significant_digits = static_cast<int>(as_uint(*v, section, "digits"));
}

std::string fmt_double(double v) { return csv::format_double(v); }

template <class T>
std::string fmt_opt(const std::optional<T>& v) {
    if (!v) return {};
    if constexpr (std::is_same_v<T, double>) return fmt_double(*v);
    else return std::to_string(*v);
}

void write_strategy(std::string& out, const StrategySpec& s) {
    out += fmt::format("method = {}\n", to_string(s.method));
    out += fmt::format("ranks = {}\n", s.use_ranks ? "true" : "false");
    out += "normalize = " +
           (s.normalization ? fmt_double(s.normalization->first) + ", " + fmt_double(s.normalization->second)
                            : std::string()) +
           "\n";
    out += "digits = " + fmt_opt(s.significant_digits) + "\n";
}

const std::map<std::string, std::set<std::string>> evolution_schema = {
    {"evolution",
     {"p", "n", "k", "pp", "cp", "mutation_mode", "keep_best", "max_generations", "target_objective", "seed",
      "intercept_mode"}},
    {"objective", {"kind", "s"}},
    {"selection", {"method", "score", "score_s", "ranks", "normalize", "digits"}},
    {"survival", {"method", "q", "r", "cap", "ranks", "normalize", "digits"}},
    {"validity", {"alpha", "unique_offset", "significance_offset"}},
    {"viability", {"min_cv", "jb_alpha", "min_simple_r2"}},
};

const std::map<std::string, std::set<std::string>> manifest_schema = {
    {"manifest", {"topology", "separator", "activity", "descriptors", "evolution", "output", "seed"}},
    {"synthetic", {"seed", "low", "high", "planted", "weights", "intercept", "noise", "decay"}},
};

} // namespace

EvolutionConfig parse_evolution_config(std::string_view text) {
    const auto tree = parse_ini(text, evolution_schema);
    EvolutionConfig c;
    const std::string ev = "evolution";
    if (auto v = get(tree, ev, "p")) c.p = as_uint(*v, ev, "p");
    if (auto v = get(tree, ev, "n")) c.n = as_uint(*v, ev, "n");
    if (auto v = get(tree, ev, "k")) c.k = as_uint(*v, ev, "k");
    if (auto v = get(tree, ev, "pp")) c.pp = as_double(*v, ev, "pp");
    if (auto v = get(tree, ev, "cp")) c.cp = as_double(*v, ev, "cp");
    if (auto v = get(tree, ev, "mutation_mode")) {
        if (*v == "per_genotype") c.mutation_mode = MutationMode::per_genotype;
        else if (*v == "per_gene") c.mutation_mode = MutationMode::per_gene;
        else throw ConfigError(where(ev, "mutation_mode") + ": expected per_genotype or per_gene");
    }
    if (auto v = get(tree, ev, "keep_best")) c.keep_best = as_bool(*v, ev, "keep_best");
    if (auto v = get(tree, ev, "max_generations")) c.max_generations = as_uint(*v, ev, "max_generations");
    if (auto v = get(tree, ev, "target_objective")) c.target_objective = as_double(*v, ev, "target_objective");
    if (auto v = get(tree, ev, "seed")) c.seed = as_uint(*v, ev, "seed");
    if (auto v = get(tree, ev, "intercept_mode")) {
        if (*v == "fallback") c.intercept_mode = InterceptMode::fallback;
        else if (*v == "both") c.intercept_mode = InterceptMode::both;
        else throw ConfigError(where(ev, "intercept_mode") + ": expected fallback or both");
    }

    if (auto v = get(tree, "objective", "kind")) c.objective.kind = parse_objective_kind(*v);
    if (auto v = get(tree, "objective", "s")) c.objective.s = as_double(*v, "objective", "s");

    read_strategy(tree, "selection", c.selection);
    double score_s = 1.0;
    if (auto v = get(tree, "selection", "score_s")) score_s = as_double(*v, "selection", "score_s");
    c.selection_aggregate = SelectionAggregate::parse(get(tree, "selection", "score").value_or("nalive"), score_s);
    if (c.selection_aggregate.nalive) c.selection_aggregate.score.s = score_s;

    read_strategy(tree, "survival", c.survival);
    if (auto v = get(tree, "survival", "q")) c.q = as_double(*v, "survival", "q");
    if (auto v = get(tree, "survival", "r")) c.r = as_double(*v, "survival", "r");
    if (auto v = get(tree, "survival", "cap")) c.similarity_cap = as_double(*v, "survival", "cap");

    if (auto v = get(tree, "validity", "alpha")) c.validity.alpha = as_double(*v, "validity", "alpha");
    if (auto v = get(tree, "validity", "unique_offset"))
        c.validity.unique_offset = static_cast<int>(as_uint(*v, "validity", "unique_offset"));
    if (auto v = get(tree, "validity", "significance_offset"))
        c.validity.significance_offset = static_cast<int>(as_uint(*v, "validity", "significance_offset"));

    if (auto v = get(tree, "viability", "min_cv")) c.viability.min_cv = as_double(*v, "viability", "min_cv");
    if (auto v = get(tree, "viability", "jb_alpha")) c.viability.jb_alpha = as_double(*v, "viability", "jb_alpha");
    if (auto v = get(tree, "viability", "min_simple_r2"))
        c.viability.min_simple_r2 = as_double(*v, "viability", "min_simple_r2");

    c.objective.validate();
    c.selection.validate();
    c.survival.validate();
    c.viability.validate();
    return c;
}

EvolutionConfig load_evolution_config(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("evolution config not found: " + path);
    return parse_evolution_config(csv::read_file(path));
}

std::string serialize_evolution_config(const EvolutionConfig& c) {
    std::string out = "[evolution]\n";
    out += fmt::format("p = {}\nn = {}\nk = {}\n", c.p, c.n, c.k);
    out += "pp = " + fmt_double(c.pp) + "\ncp = " + fmt_double(c.cp) + "\n";
    out += fmt::format("mutation_mode = {}\n",
                       c.mutation_mode == MutationMode::per_gene ? "per_gene" : "per_genotype");
    out += fmt::format("keep_best = {}\n", c.keep_best ? "true" : "false");
    out += fmt::format("max_generations = {}\n", c.max_generations);
    out += "target_objective = " + fmt_opt(c.target_objective) + "\n";
    out += fmt::format("seed = {}\n", c.seed);
    out += fmt::format("intercept_mode = {}\n", c.intercept_mode == InterceptMode::both ? "both" : "fallback");
    out += fmt::format("\n[objective]\nkind = {}\ns = {}\n", to_string(c.objective.kind), fmt_double(c.objective.s));
    out += "\n[selection]\n";
    write_strategy(out, c.selection);
    out += "score = " + c.selection_aggregate.name() + "\n";
    out += "score_s = " + fmt_double(c.selection_aggregate.score.s) + "\n";
    out += "\n[survival]\n";
    write_strategy(out, c.survival);
    out += "q = " + fmt_double(c.q) + "\nr = " + fmt_double(c.r) + "\ncap = " + fmt_double(c.similarity_cap) + "\n";
    out += "\n[validity]\nalpha = " + fmt_double(c.validity.alpha) + "\n";
    out += fmt::format("unique_offset = {}\nsignificance_offset = {}\n", c.validity.unique_offset,
                       c.validity.significance_offset);
    out += "\n[viability]\nmin_cv = " + fmt_opt(c.viability.min_cv) + "\njb_alpha = " + fmt_opt(c.viability.jb_alpha) +
           "\nmin_simple_r2 = " + fmt_opt(c.viability.min_simple_r2) + "\n";
    return out;
}

RunManifest parse_manifest(std::string_view text, const std::string& base_dir) {
    const auto tree = parse_ini(text, manifest_schema);
    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return (path.is_absolute() ? path : fs::path(base_dir) / path).lexically_normal().string();
    };
    auto required = [&](const std::string& key) {
        auto v = get(tree, "manifest", key);
        if (!v) throw ConfigError("manifest: missing [manifest] " + key);
        return *v;
    };
    RunManifest m;
    m.topology_path = resolve(required("topology"));
    m.separator = get(tree, "manifest", "separator").value_or("");
    m.activity_path = resolve(required("activity"));
    m.evolution_path = resolve(required("evolution"));
    const auto descriptors = required("descriptors");
    if (descriptors != "synthetic") m.descriptor_table_path = resolve(descriptors);
    m.output_dir = resolve(get(tree, "manifest", "output").value_or("out"));
    if (auto v = get(tree, "manifest", "seed")) m.master_seed = as_uint(*v, "manifest", "seed");

    const bool has_synthetic = tree.get_child_optional("synthetic").has_value();
    if (descriptors == "synthetic") {
        SyntheticSpec s;
        const std::string sec = "synthetic";
        if (auto v = get(tree, sec, "seed")) s.seed = as_uint(*v, sec, "seed");
        if (auto v = get(tree, sec, "low")) s.low = as_double(*v, sec, "low");
        if (auto v = get(tree, sec, "high")) s.high = as_double(*v, sec, "high");
        if (auto v = get(tree, sec, "planted")) {
            for (auto& row : csv::parse(*v))
                for (auto& f : row) s.planted.push_back(f);
        }
        if (auto v = get(tree, sec, "weights")) {
            for (auto& row : csv::parse(*v))
                for (auto& f : row) s.weights.push_back(as_double(f, sec, "weights"));
        }
        if (auto v = get(tree, sec, "intercept")) s.intercept = as_double(*v, sec, "intercept");
        if (auto v = get(tree, sec, "noise")) s.noise = as_double(*v, sec, "noise");
        if (auto v = get(tree, sec, "decay")) s.decay = as_double(*v, sec, "decay");
        m.synthetic = std::move(s);
    } else if (has_synthetic) {
        throw ConfigError("manifest: [synthetic] section given but descriptors is not 'synthetic'");
    }
    return m;
}

RunManifest load_manifest(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("manifest not found: " + path);
    auto dir = fs::path(path).parent_path();
    return parse_manifest(csv::read_file(path), dir.empty() ? "." : dir.string());
}

std::string serialize_manifest(const RunManifest& m) {
    std::string out = "[manifest]\n";
    out += "topology = " + m.topology_path + "\n";
    out += "separator = " + m.separator + "\n";
    out += "activity = " + m.activity_path + "\n";
    out += "descriptors = " + (m.synthetic ? std::string("synthetic") : m.descriptor_table_path) + "\n";
    out += "evolution = " + m.evolution_path + "\n";
    out += "output = " + m.output_dir + "\n";
    out += "seed = " + fmt_opt(m.master_seed) + "\n";
    if (m.synthetic) {
        const auto& s = *m.synthetic;
        out += fmt::format("\n[synthetic]\nseed = {}\n", s.seed);
        out += "low = " + fmt_double(s.low) + "\nhigh = " + fmt_double(s.high) + "\n";
        std::string planted, weights;
        for (std::size_t i = 0; i < s.planted.size(); ++i) planted += (i ? ", " : "") + s.planted[i];
        for (std::size_t i = 0; i < s.weights.size(); ++i) weights += (i ? ", " : "") + fmt_double(s.weights[i]);
        out += "planted = " + planted + "\nweights = " + weights + "\n";
        out += "intercept = " + fmt_double(s.intercept) + "\nnoise = " + fmt_double(s.noise) +
               "\ndecay = " + fmt_double(s.decay) + "\n";
    }
    return out;
}

Workspace open_workspace(const std::string& manifest_path) {
    Workspace ws;
    ws.manifest = load_manifest(manifest_path);
    const auto& m = ws.manifest;
    for (const auto* p : {&m.topology_path, &m.activity_path, &m.evolution_path})
        if (!fs::exists(*p)) throw ConfigError("file not found: " + *p);
    if (!m.synthetic && !fs::exists(m.descriptor_table_path))
        throw ConfigError("file not found: " + m.descriptor_table_path);
    ws.topology = load_topology(m.topology_path);
    ws.topology.set_separator(m.separator);
    ws.dataset = load_activity(m.activity_path);
    if (m.synthetic) ws.provider = std::make_unique<SyntheticProvider>(ws.topology, ws.dataset, *m.synthetic);
    else ws.provider = std::make_unique<TableProvider>(load_descriptor_table(ws.topology, ws.dataset, m.descriptor_table_path));
    ws.evolution = load_evolution_config(m.evolution_path);
    if (m.master_seed) ws.evolution.seed = *m.master_seed;
    ws.evolution.validate(ws.topology.size());
    return ws;
}

} // namespace qsarga
