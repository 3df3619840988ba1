#include "qsarga/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "qsarga/config.hpp"
#include "qsarga/csv.hpp"
#include "qsarga/error.hpp"

namespace qsarga {

void EvolutionConfig::validate(const BigInt& genome_size) const {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (!(n < p)) throw ConfigError("sample size p must exceed regression multiplicity n");
    if (!(BigInt(p) < genome_size)) throw ConfigError("sample size p must be below the genome size N");
    if (k < 1 || 2 * k > p) throw ConfigError("pairs k must satisfy 1 <= 2k <= p");
    if (!(pp >= 0.0 && pp <= 1.0)) throw ConfigError("pp must be in [0, 1]");
    if (!(cp >= 0.0 && cp <= 1.0)) throw ConfigError("cp must be in [0, 1]");
    if (max_generations < 1) throw ConfigError("max_generations must be >= 1");
    if (!(q > 0.0) || !(r > 0.0)) throw ConfigError("survival exponents q and r must be positive");
    if (!(similarity_cap > 0.0)) throw ConfigError("similarity cap must be positive");
    if (!(validity.alpha > 0.0 && validity.alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    objective.validate();
    if (!selection_aggregate.nalive) selection_aggregate.score.validate();
    selection.validate();
    survival.validate();
    viability.validate();
}

Engine::Engine(EvolutionConfig cfg, const GeneticTopology& topology, const DescriptorProvider& provider,
               const Dataset& ds)
    : cfg_(std::move(cfg)), topology_(topology), provider_(provider), ds_(ds), rng_(cfg_.seed) {
    cfg_.validate(topology_.size());
    if (ds_.size() <= cfg_.n + 1) throw ConfigError("dataset has too few molecules for n regressors");
    if (cfg_.selection.normalization)
        selection_norm_ = NormalizationState{cfg_.selection.normalization->first, cfg_.selection.normalization->second};
    if (cfg_.survival.normalization)
        survival_norm_ = NormalizationState{cfg_.survival.normalization->first, cfg_.survival.normalization->second};
}

void Engine::init_sample() {
    sample_.clear();
    std::set<Genotype> seen;
    std::map<std::string, std::size_t> rejected;

    auto consider = [&](const Genotype& g) {
        if (!seen.insert(g).second) {
            ++rejected["duplicate"];
            return;
        }
        auto values = provider_.provide(g);
        if (!values) {
            ++rejected["absent"];
            return;
        }
        const auto rep = check_viability(*values, ds_, cfg_.viability);
        if (!rep.viable()) {
            ++rejected[rep.failures()];
            return;
        }
        sample_.push_back(Member{g, std::move(*values), render(topology_, g)});
    };

    if (auto catalogue = provider_.catalogue()) {
        rng_.shuffle(std::span(*catalogue));
        for (const auto& g : *catalogue) {
            if (sample_.size() == cfg_.p) break;
            consider(g);
        }
    } else {
        const std::size_t bound = std::max<std::size_t>(1000, 200 * cfg_.p);
        for (std::size_t attempt = 0; attempt < bound && sample_.size() < cfg_.p; ++attempt)
            consider(random_genotype(topology_, rng_));
    }
    if (sample_.size() < cfg_.p) {
        std::string hist;
        for (const auto& [reason, count] : rejected) hist += fmt::format(" {}={}", reason, count);
        throw InsufficientViable(fmt::format("insufficient viable material: found {} of {} genotypes; rejected:{}",
                                             sample_.size(), cfg_.p, hist.empty() ? " none" : hist));
    }
}

std::vector<RegressionModel> Engine::fit_subset(const std::vector<std::size_t>& subset) const {
    std::vector<std::span<const double>> columns;
    columns.reserve(subset.size());
    for (auto i : subset) columns.emplace_back(sample_[i].values);
    const std::size_t m = ds_.size();
    std::vector<RegressionModel> out;
    auto fit = [&](bool intercept) { return ols_fit(columns, ds_.activity, intercept, subset); };

    if (cfg_.intercept_mode == InterceptMode::fallback) {
        try {
            auto model = assess_validity(fit(true), m, cfg_.validity, fit);
            if (model.valid) out.push_back(std::move(model));
        } catch (const SingularFit&) {
        }
        return out;
    }
    for (bool intercept : {true, false}) {
        try {
            auto model = assess_strict(fit(intercept), m, cfg_.validity);
            if (model.valid) out.push_back(std::move(model));
        } catch (const SingularFit&) {
        }
    }
    return out;
}

bool Engine::target_reached() const {
    if (!cfg_.target_objective || !best_) return false;
    const double t = *cfg_.target_objective;
    return cfg_.objective.direction() == Direction::maximize ? best_->objective >= t : best_->objective <= t;
}

GenerationRecord Engine::run_generation() {
    if (sample_.size() != cfg_.p) throw Error("run_generation: sample is not initialized");
    const std::size_t p = cfg_.p;
    const Direction dir = cfg_.objective.direction();

    GenerationRecord rec;
    rec.generation = generation_;
    rec.participation.assign(p, 0);
    for (const auto& mbr : sample_) rec.sample_genotypes.push_back(mbr.label);

    // Fit every n-subset; the first strictly best model in enumeration order wins.
    std::vector<RegressionModel> valid;
    std::optional<std::size_t> gen_best;
    double gen_best_value = 0.0;
    for_each_combination(p, cfg_.n, [&](const std::vector<std::size_t>& subset) {
        for (auto& model : fit_subset(subset)) {
            const double value = objective_score(model, cfg_.objective);
            if (std::isnan(value)) continue;
            for (auto i : model.members) ++rec.participation[i];
            if (!gen_best || better(value, gen_best_value, dir)) {
                gen_best = valid.size();
                gen_best_value = value;
            }
            valid.push_back(std::move(model));
        }
    });
    rec.valid_regression_count = valid.size();

    std::vector<bool> elite(p, false);
    if (gen_best) {
        const auto& model = valid[*gen_best];
        if (!best_ || better(gen_best_value, best_->objective, dir)) {
            BestModel b{model, gen_best_value, {}, generation_};
            for (auto i : model.members) b.genotypes.push_back(sample_[i].label);
            best_ = std::move(b);
            rec.improved = true;
        }
        if (cfg_.keep_best)
            for (auto i : model.members) elite[i] = true;
    }
    if (best_) {
        rec.best_objective = best_->objective;
        rec.best_model_genotypes = best_->genotypes;
    }

    // Selection scores and pair extraction.
    const auto sel = selection_scores(p, valid, cfg_.selection_aggregate);
    const auto sel_table = transform_scores(sel.scores, cfg_.selection_aggregate.direction(),
                                            selection_norm_ ? &*selection_norm_ : nullptr,
                                            cfg_.selection.significant_digits, cfg_.selection.use_ranks);
    const auto parents = extract(cfg_.selection.method, sel_table, 2 * cfg_.k, rng_).indices;

    // Mutate parent copies, cross over, mutate children.
    std::vector<Genotype> children;
    for (std::size_t j = 0; j < cfg_.k; ++j) {
        auto a = mutate(topology_, sample_[parents[2 * j]].genotype, cfg_.pp, rng_, cfg_.mutation_mode);
        auto b = mutate(topology_, sample_[parents[2 * j + 1]].genotype, cfg_.pp, rng_, cfg_.mutation_mode);
        auto [c1, c2] = crossover(a, b, rng_);
        children.push_back(mutate(topology_, c1, cfg_.cp, rng_, cfg_.mutation_mode));
        children.push_back(mutate(topology_, c2, cfg_.cp, rng_, cfg_.mutation_mode));
    }

    // Viable, novel children.
    std::set<Genotype> present;
    for (const auto& mbr : sample_) present.insert(mbr.genotype);
    std::vector<Member> viable;
    for (auto& child : children) {
        if (present.contains(child)) continue;
        auto values = provider_.provide(child);
        if (!values || !check_viability(*values, ds_, cfg_.viability).viable()) continue;
        present.insert(child);
        auto label = render(topology_, child);
        viable.push_back(Member{std::move(child), std::move(*values), std::move(label)});
    }

    // Survival: remove the most redundant non-elite members.
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < p; ++i)
        if (!elite[i]) candidates.push_back(i);
    const std::size_t v = std::min(viable.size(), candidates.size());
    if (v > 0) {
        std::vector<Genotype> genotypes;
        genotypes.reserve(p);
        for (const auto& mbr : sample_) genotypes.push_back(mbr.genotype);
        const auto vs = survival_scores(genotypes, sel_table.fs, cfg_.q, cfg_.r, cfg_.similarity_cap);
        std::vector<double> cand_vs;
        cand_vs.reserve(candidates.size());
        for (auto i : candidates) cand_vs.push_back(vs[i]);
        const auto surv_table = transform_scores(cand_vs, Direction::maximize,
                                                 survival_norm_ ? &*survival_norm_ : nullptr,
                                                 cfg_.survival.significant_digits, cfg_.survival.use_ranks);
        const auto victims = extract(cfg_.survival.method, surv_table, v, rng_).indices;
        for (std::size_t j = 0; j < v; ++j) sample_[candidates[victims[j]]] = std::move(viable[j]);
    }
    rec.replaced = v;
    ++generation_;
    return rec;
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += items[i];
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace

std::string config_fingerprint(const EvolutionConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_evolution_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string format_log_header(const EvolutionConfig& cfg) {
    return fmt::format("#config={}\tseed={}\tobjective={}\ts={}\n", config_fingerprint(cfg), cfg.seed,
                       to_string(cfg.objective.kind), csv::format_double(cfg.objective.s));
}

std::string format_record(const GenerationRecord& rec) {
    std::string part;
    for (std::size_t i = 0; i < rec.participation.size(); ++i) {
        if (i) part += ",";
        part += std::to_string(rec.participation[i]);
    }
    return fmt::format("{}\t{}\t{}\tmodel={}\tvalid={}\tsample={}\tpart={}\n", rec.generation, rec.improved ? 1 : 0,
                       rec.best_objective ? csv::format_double(*rec.best_objective) : std::string("NA"),
                       join(rec.best_model_genotypes), rec.valid_regression_count, join(rec.sample_genotypes), part);
}

std::vector<GenerationRecord> parse_run_log(const std::string& text) {
    std::vector<GenerationRecord> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line, '\t');
        auto bad = [&](const std::string& why) {
            return DataError("run log line " + std::to_string(line_no) + ": " + why);
        };
        if (fields.size() != 7) throw bad("expected 7 tab-separated fields");
        auto value_of = [&](const std::string& field, std::string_view key) {
            if (!field.starts_with(key) || field.size() < key.size() || field[key.size()] != '=')
                throw bad("expected '" + std::string(key) + "='");
            return std::string_view(field).substr(key.size() + 1);
        };
        GenerationRecord rec;
        try {
            rec.generation = std::stoul(fields[0]);
            rec.improved = fields[1] == "1";
            if (fields[2] != "NA") rec.best_objective = csv::to_double(fields[2], "best_objective");
            rec.best_model_genotypes = split(value_of(fields[3], "model"), ',');
            rec.valid_regression_count = std::stoul(std::string(value_of(fields[4], "valid")));
            rec.sample_genotypes = split(value_of(fields[5], "sample"), ',');
            for (const auto& c : split(value_of(fields[6], "part"), ',')) rec.participation.push_back(std::stoul(c));
        } catch (const std::logic_error&) {
            throw bad("malformed number");
        }
        if (rec.participation.size() != rec.sample_genotypes.size()) throw bad("part= and sample= lengths differ");
        out.push_back(std::move(rec));
    }
    return out;
}

RunResult run(const EvolutionConfig& cfg, const GeneticTopology& topology, const DescriptorProvider& provider,
              const Dataset& ds) {
    Engine engine(cfg, topology, provider, ds);
    engine.init_sample();
    RunResult result;
    result.seed = cfg.seed;
    result.fingerprint = config_fingerprint(cfg);
    result.log = format_log_header(cfg);
    for (std::size_t g = 0; g < cfg.max_generations; ++g) {
        auto rec = engine.run_generation();
        result.log += format_record(rec);
        result.records.push_back(std::move(rec));
        if (engine.target_reached()) break;
    }
    result.best = engine.best();
    return result;
}

} // namespace qsarga
