#include "qsarga/genome.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "qsarga/error.hpp"

namespace qsarga {

namespace {

constexpr std::uint64_t fnv_offset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t fnv_prime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= fnv_prime;
    }
    h ^= 0xff;
    h *= fnv_prime;
}

bool valid_symbol(std::string_view s) {
    if (s.empty()) return false;
    return std::none_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isspace(c) || c == ',' || c == '#' || c == ':';
    });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

GeneticTopology::GeneticTopology(std::vector<Gene> genes, std::string separator)
    : genes_(std::move(genes)), separator_(std::move(separator)) {
    if (genes_.empty()) throw ConfigError("topology: at least one gene is required");
    std::set<std::string> names;
    std::uint64_t h = fnv_offset;
    for (const auto& gene : genes_) {
        if (!valid_symbol(gene.name)) throw ConfigError("topology: invalid gene name '" + gene.name + "'");
        if (!names.insert(gene.name).second) throw ConfigError("topology: duplicate gene name '" + gene.name + "'");
        if (gene.alleles.size() < 2)
            throw ConfigError("topology: gene '" + gene.name + "' needs at least two alleles");
        if (gene.alleles.size() > 65535) throw ConfigError("topology: gene '" + gene.name + "' has too many alleles");
        std::set<std::string> seen;
        fnv_mix(h, gene.name);
        for (const auto& a : gene.alleles) {
            if (!valid_symbol(a)) throw ConfigError("topology: invalid allele '" + a + "' in gene '" + gene.name + "'");
            if (!seen.insert(a).second)
                throw ConfigError("topology: duplicate allele '" + a + "' in gene '" + gene.name + "'");
            fnv_mix(h, a);
        }
    }
    id_ = h;
}

BigInt GeneticTopology::size() const {
    BigInt n = 1;
    for (const auto& g : genes_) n *= static_cast<unsigned>(g.alleles.size());
    return n;
}

GeneticTopology parse_topology(std::string_view text) {
    std::vector<Gene> genes;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = "topology line " + std::to_string(line_no) + ": ";
        auto colon = line.find(':');
        if (colon == std::string_view::npos) throw ConfigError(where + "expected 'gene <name> : <alleles...>'");
        auto head = split_ws(line.substr(0, colon));
        if (head.size() != 2 || head[0] != "gene") throw ConfigError(where + "expected 'gene <name> : <alleles...>'");
        Gene gene{head[1], split_ws(line.substr(colon + 1))};
        genes.push_back(std::move(gene));
    }
    return GeneticTopology(std::move(genes));
}

GeneticTopology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open topology file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_topology(buf.str());
}

std::string serialize_topology(const GeneticTopology& topology) {
    std::string out;
    for (const auto& gene : topology.genes()) {
        out += "gene " + gene.name + " :";
        for (const auto& a : gene.alleles) out += " " + a;
        out += "\n";
    }
    return out;
}

Genotype::Genotype(const GeneticTopology& topology, std::vector<std::uint16_t> alleles)
    : alleles_(std::move(alleles)), topology_id_(topology.id()) {
    if (alleles_.size() != topology.gene_count())
        throw DataError("genotype length " + std::to_string(alleles_.size()) + " does not match gene count " +
                        std::to_string(topology.gene_count()));
    for (std::size_t i = 0; i < alleles_.size(); ++i)
        if (alleles_[i] >= topology.allele_count(i))
            throw DataError("allele index out of range for gene '" + topology.genes()[i].name + "'");
}

std::string render(const GeneticTopology& topology, const Genotype& genotype) {
    std::string out;
    const auto& genes = topology.genes();
    for (std::size_t i = 0; i < genotype.size(); ++i) {
        if (i > 0) out += topology.separator();
        out += genes[i].alleles[genotype[i]];
    }
    return out;
}

namespace {

// Counts parses of text[pos..] starting at gene; stops counting past two.
void parse_from(const GeneticTopology& topo, std::string_view text, std::size_t pos, std::size_t gene,
                std::vector<std::uint16_t>& current, std::vector<std::uint16_t>& found, int& count) {
    if (count > 1) return;
    if (gene == topo.gene_count()) {
        if (pos == text.size()) {
            if (++count == 1) found = current;
        }
        return;
    }
    const auto& alleles = topo.genes()[gene].alleles;
    for (std::size_t a = 0; a < alleles.size(); ++a) {
        if (text.substr(pos).starts_with(alleles[a])) {
            current.push_back(static_cast<std::uint16_t>(a));
            parse_from(topo, text, pos + alleles[a].size(), gene + 1, current, found, count);
            current.pop_back();
        }
    }
}

} // namespace

Genotype parse_genotype(const GeneticTopology& topology, std::string_view text) {
    std::vector<std::uint16_t> indices;
    if (!topology.separator().empty()) {
        const auto& sep = topology.separator();
        std::size_t pos = 0;
        for (std::size_t gene = 0; gene < topology.gene_count(); ++gene) {
            std::size_t end = gene + 1 < topology.gene_count() ? text.find(sep, pos) : text.size();
            if (end == std::string_view::npos) throw DataError("genotype '" + std::string(text) + "': too few genes");
            auto sym = text.substr(pos, end - pos);
            const auto& alleles = topology.genes()[gene].alleles;
            auto it = std::find(alleles.begin(), alleles.end(), sym);
            if (it == alleles.end())
                throw DataError("genotype '" + std::string(text) + "': unknown allele '" + std::string(sym) + "'");
            indices.push_back(static_cast<std::uint16_t>(it - alleles.begin()));
            pos = end + sep.size();
        }
        return Genotype(topology, std::move(indices));
    }
    std::vector<std::uint16_t> current;
    int count = 0;
    parse_from(topology, text, 0, 0, current, indices, count);
    if (count == 0) throw DataError("genotype '" + std::string(text) + "' does not match the topology");
    if (count > 1) throw DataError("genotype '" + std::string(text) + "' is ambiguous; configure a separator");
    return Genotype(topology, std::move(indices));
}

BigInt genome_size(const GeneticTopology& topology) { return topology.size(); }

Genotype random_genotype(const GeneticTopology& topology, Rng& rng) {
    std::vector<std::uint16_t> a(topology.gene_count());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<std::uint16_t>(rng.below(topology.allele_count(i)));
    return Genotype(std::move(a), topology.id());
}

std::pair<Genotype, Genotype> exchange_segment(const Genotype& a, const Genotype& b, std::size_t first,
                                               std::size_t last) {
    if (a.topology_id_ != b.topology_id_ || a.size() != b.size())
        throw DataError("crossover: genotypes come from different topologies");
    if (first > last || last >= a.size()) throw DataError("crossover: segment out of range");
    auto x = a.alleles_;
    auto y = b.alleles_;
    for (std::size_t i = first; i <= last; ++i) std::swap(x[i], y[i]);
    return {Genotype(std::move(x), a.topology_id_), Genotype(std::move(y), b.topology_id_)};
}

std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, Rng& rng) {
    if (a.topology_id() != b.topology_id() || a.size() != b.size())
        throw DataError("crossover: genotypes come from different topologies");
    // Draw one of the nc(nc+1)/2 segments uniformly, then decode it.
    const std::uint64_t nc = a.size();
    std::uint64_t k = rng.below(nc * (nc + 1) / 2);
    std::size_t first = 0;
    while (k >= nc - first) {
        k -= nc - first;
        ++first;
    }
    return exchange_segment(a, b, first, first + k);
}

Genotype mutate(const GeneticTopology& topology, const Genotype& g, double prob, Rng& rng, MutationMode mode) {
    if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("mutation probability must lie in [0, 1]");
    if (g.topology_id_ != topology.id()) throw DataError("mutate: genotype belongs to another topology");
    auto alleles = g.alleles_;
    auto change = [&](std::size_t gene) {
        const auto count = topology.allele_count(gene);
        auto pick = static_cast<std::uint16_t>(rng.below(count - 1));
        if (pick >= alleles[gene]) ++pick;
        alleles[gene] = pick;
    };
    if (mode == MutationMode::per_genotype) {
        if (rng.chance(prob)) change(rng.below(alleles.size()));
    } else {
        for (std::size_t i = 0; i < alleles.size(); ++i)
            if (rng.chance(prob)) change(i);
    }
    return Genotype(std::move(alleles), g.topology_id_);
}

std::size_t ncd(const Genotype& a, const Genotype& b) {
    if (a.topology_id() != b.topology_id() || a.size() != b.size())
        throw DataError("ncd: genotypes come from different topologies");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

} // namespace qsarga
