#include "qsarga/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <unordered_map>

#include "qsarga/csv.hpp"
#include "qsarga/error.hpp"
#include "qsarga/stats.hpp"

namespace qsarga {

Dataset make_dataset(std::vector<std::string> ids, std::vector<double> activity) {
    if (ids.size() != activity.size()) throw DataError("dataset: id and activity counts differ");
    if (ids.size() < 3) throw DataError("dataset: at least 3 molecules are required");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!seen.insert(ids[i]).second) throw DataError("dataset: duplicate molecule id '" + ids[i] + "'");
        if (!std::isfinite(activity[i])) throw DataError("dataset: non-finite activity for '" + ids[i] + "'");
    }
    return Dataset{std::move(ids), std::move(activity)};
}

Dataset parse_activity_csv(std::string_view text) {
    auto rows = csv::parse(text);
    if (rows.empty()) throw DataError("activity CSV is empty");
    if (rows[0].size() != 2 || rows[0][0] != "molecule" || rows[0][1] != "activity")
        throw DataError("activity CSV: header must be 'molecule,activity'");
    std::vector<std::string> ids;
    std::vector<double> y;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2) throw DataError("activity CSV line " + std::to_string(i + 1) + ": expected 2 fields");
        ids.push_back(rows[i][0]);
        y.push_back(csv::to_double(rows[i][1], "activity"));
    }
    return make_dataset(std::move(ids), std::move(y));
}

Dataset load_activity(const std::string& path) { return parse_activity_csv(csv::read_file(path)); }

std::string activity_to_csv(const Dataset& ds) {
    std::string out = "molecule,activity\n";
    for (std::size_t i = 0; i < ds.size(); ++i) out += ds.molecule_ids[i] + "," + csv::format_double(ds.activity[i]) + "\n";
    return out;
}

TableProvider::TableProvider(const GeneticTopology& topology, const Dataset& ds, std::string_view csv_text) {
    auto rows = csv::parse(csv_text);
    if (rows.empty()) throw DataError("descriptor table is empty");
    const auto& header = rows[0];
    if (header.empty() || header[0] != "genotype") throw DataError("descriptor table: first header field must be 'genotype'");
    if (header.size() - 1 != ds.size())
        throw DataError("descriptor table has " + std::to_string(header.size() - 1) + " molecule columns, dataset has " +
                        std::to_string(ds.size()));
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < ds.size(); ++i) position.emplace(ds.molecule_ids[i], i);
    std::vector<std::size_t> column_to_molecule;
    std::set<std::size_t> used;
    for (std::size_t c = 1; c < header.size(); ++c) {
        auto it = position.find(header[c]);
        if (it == position.end()) throw DataError("descriptor table: molecule '" + header[c] + "' not in activity file");
        if (!used.insert(it->second).second) throw DataError("descriptor table: duplicate molecule column '" + header[c] + "'");
        column_to_molecule.push_back(it->second);
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw DataError("descriptor table line " + std::to_string(r + 1) + ": expected " +
                            std::to_string(header.size()) + " fields");
        Genotype g = parse_genotype(topology, row[0]);
        std::vector<double> values(ds.size());
        for (std::size_t c = 1; c < row.size(); ++c) values[column_to_molecule[c - 1]] = csv::to_double(row[c], "descriptor value");
        if (!rows_.emplace(std::move(g), std::move(values)).second)
            throw DataError("descriptor table: duplicate genotype '" + row[0] + "'");
    }
}

std::optional<std::vector<double>> TableProvider::provide(const Genotype& g) const {
    auto it = rows_.find(g);
    if (it == rows_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::vector<Genotype>> TableProvider::catalogue() const {
    std::vector<Genotype> out;
    out.reserve(rows_.size());
    for (const auto& [g, _] : rows_) out.push_back(g);
    return out;
}

TableProvider load_descriptor_table(const GeneticTopology& topology, const Dataset& ds, const std::string& path) {
    return TableProvider(topology, ds, csv::read_file(path));
}

std::string descriptor_table_csv(const GeneticTopology& topology, const Dataset& ds, const DescriptorProvider& provider,
                                 std::span<const Genotype> genotypes) {
    std::string out = "genotype";
    for (const auto& id : ds.molecule_ids) out += "," + id;
    out += "\n";
    for (const auto& g : genotypes) {
        auto values = provider.provide(g);
        if (!values) continue;
        out += render(topology, g);
        for (double v : *values) out += "," + csv::format_double(v);
        out += "\n";
    }
    return out;
}

namespace {

std::uint64_t genotype_hash(std::uint64_t seed, const Genotype& g) {
    std::uint64_t h = mix64(seed ^ 0x5eedULL);
    for (auto a : g.alleles()) h = mix64(h ^ a);
    return h;
}

} // namespace

SyntheticProvider::SyntheticProvider(const GeneticTopology& topology, const Dataset& ds, SyntheticSpec spec)
    : spec_(std::move(spec)), molecules_(ds.size()) {
    if (!(spec_.low < spec_.high)) throw ConfigError("synthetic provider: low must be below high");
    if (spec_.noise < 0.0) throw ConfigError("synthetic provider: noise must be nonnegative");
    if (spec_.decay < 0.0 || spec_.decay >= 1.0) throw ConfigError("synthetic provider: decay must be in [0, 1)");
    if (!spec_.weights.empty() && spec_.weights.size() != spec_.planted.size())
        throw ConfigError("synthetic provider: one weight per planted genotype is required");
    for (const auto& text : spec_.planted) planted_.push_back(parse_genotype(topology, text));
    for (std::size_t i = 0; i < planted_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (planted_[i] == planted_[j]) throw ConfigError("synthetic provider: planted genotypes must be distinct");
    if (planted_.empty()) return;

    std::vector<double> w = spec_.weights.empty() ? std::vector<double>(planted_.size(), 1.0) : spec_.weights;
    if (w.back() == 0.0) throw ConfigError("synthetic provider: the last planted weight must be nonzero");
    // All but the last planted genotype keep their hashed values; the last one
    // closes the linear relation so that Y is an exact combination plus noise.
    std::vector<double> rest(molecules_, 0.0);
    for (std::size_t j = 0; j + 1 < planted_.size(); ++j) {
        planted_values_.push_back(hashed_values(planted_[j]));
        for (std::size_t i = 0; i < molecules_; ++i) rest[i] += w[j] * planted_values_.back()[i];
    }
    const std::uint64_t noise_key = genotype_hash(spec_.seed ^ 0xa0e5ULL, planted_.back());
    std::vector<double> last(molecules_);
    for (std::size_t i = 0; i < molecules_; ++i) {
        const double u1 = bits_to_open_unit(mix64(noise_key + 2 * i));
        const double u2 = bits_to_open_unit(mix64(noise_key + 2 * i + 1));
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        last[i] = (ds.activity[i] - spec_.intercept - rest[i]) / w.back() + spec_.noise * z;
    }
    planted_values_.push_back(std::move(last));
}

std::vector<double> SyntheticProvider::hashed_values(const Genotype& g) const {
    const std::uint64_t h = genotype_hash(spec_.seed, g);
    std::vector<double> v(molecules_);
    for (std::size_t i = 0; i < molecules_; ++i) {
        const double u = static_cast<double>(mix64(h + i) >> 11) * 0x1.0p-53;
        v[i] = spec_.low + (spec_.high - spec_.low) * u;
    }
    return v;
}

std::optional<std::vector<double>> SyntheticProvider::provide(const Genotype& g) const {
    if (planted_.empty()) return hashed_values(g);
    std::size_t nearest = 0;
    std::size_t best = ncd(g, planted_[0]);
    for (std::size_t j = 1; j < planted_.size(); ++j) {
        const std::size_t d = ncd(g, planted_[j]);
        if (d < best) {
            best = d;
            nearest = j;
        }
    }
    if (best == 0) return planted_values_[nearest];
    auto own = hashed_values(g);
    if (spec_.decay > 0.0) {
        const double w = std::pow(spec_.decay, static_cast<double>(best));
        for (std::size_t i = 0; i < molecules_; ++i) own[i] = w * planted_values_[nearest][i] + (1.0 - w) * own[i];
    }
    return own;
}

void ViabilityPolicy::validate() const {
    if (min_cv && !(*min_cv >= 0.0)) throw ConfigError("viability: min_cv must be nonnegative");
    if (jb_alpha && !(*jb_alpha >= 0.0 && *jb_alpha <= 1.0)) throw ConfigError("viability: jb_alpha must be in [0, 1]");
    if (min_simple_r2 && !(*min_simple_r2 >= 0.0 && *min_simple_r2 <= 1.0))
        throw ConfigError("viability: min_simple_r2 must be in [0, 1]");
}

std::string ViabilityReport::failures() const {
    std::string out;
    auto add = [&](bool ok, const char* name) {
        if (ok) return;
        if (!out.empty()) out += ",";
        out += name;
    };
    add(finite, "nonfinite");
    add(varied, "constant");
    add(cv_ok, "low_cv");
    add(normal_ok, "non_normal");
    add(explanatory_ok, "low_r2");
    return out;
}

double squared_correlation(std::span<const double> x, std::span<const double> y) {
    const double m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

ViabilityReport check_viability(std::span<const double> values, const Dataset& ds, const ViabilityPolicy& policy) {
    if (values.size() != ds.size())
        throw DataError("viability: phenotype has " + std::to_string(values.size()) + " values, dataset has " +
                        std::to_string(ds.size()));
    ViabilityReport rep;
    rep.finite = std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    if (!rep.finite) return rep;
    rep.varied = std::any_of(values.begin(), values.end(), [&](double v) { return v != values.front(); });

    const auto fit = stats::normal_mle(values);
    if (policy.min_cv) {
        // Zero mean with spread counts as unbounded relative variability.
        if (fit.mean == 0.0) rep.cv_ok = fit.sd > 0.0 || *policy.min_cv == 0.0;
        else rep.cv_ok = std::fabs(fit.sd / fit.mean) >= *policy.min_cv;
    }
    if (policy.jb_alpha) {
        if (!rep.varied || values.size() < 4) rep.normal_ok = false;
        else rep.normal_ok = stats::jarque_bera(values).p_value >= *policy.jb_alpha;
    }
    if (policy.min_simple_r2) rep.explanatory_ok = squared_correlation(values, ds.activity) >= *policy.min_simple_r2;
    return rep;
}

} // namespace qsarga
