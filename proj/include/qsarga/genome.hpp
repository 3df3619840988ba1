#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsarga/rng.hpp"

namespace qsarga {

using BigInt = boost::multiprecision::cpp_int;

struct Gene {
    std::string name;
    std::vector<std::string> alleles;
};

/// Ordered genes with their allele alphabets; defines the genotype space.
class GeneticTopology {
public:
    GeneticTopology() = default;

    /// Throws ConfigError unless there is at least one gene, every gene has
    /// two or more pairwise-distinct alleles and gene names are distinct.
    explicit GeneticTopology(std::vector<Gene> genes, std::string separator = {});

    const std::vector<Gene>& genes() const noexcept { return genes_; }
    std::size_t gene_count() const noexcept { return genes_.size(); }
    std::size_t allele_count(std::size_t gene) const { return genes_.at(gene).alleles.size(); }

    /// Optional string placed between allele symbols when rendering.
    const std::string& separator() const noexcept { return separator_; }
    void set_separator(std::string sep) { separator_ = std::move(sep); }

    /// Product of allele counts over all genes.
    BigInt size() const;

    /// Fingerprint of the gene layout; genotypes carry it to detect mixing topologies.
    std::uint64_t id() const noexcept { return id_; }

    bool operator==(const GeneticTopology& other) const {
        return genes_.size() == other.genes_.size() && id_ == other.id_;
    }

private:
    std::vector<Gene> genes_;
    std::string separator_;
    std::uint64_t id_ = 0;
};

/// Parses the topology text format: `gene <name> : <allele> <allele> ...`,
/// one gene per line, `#` to end of line is a comment.
GeneticTopology parse_topology(std::string_view text);
GeneticTopology load_topology(const std::string& path);
std::string serialize_topology(const GeneticTopology& topology);

enum class MutationMode { per_genotype, per_gene };

/// One allele index per gene.
class Genotype {
public:
    Genotype() = default;

    /// Throws DataError if the length or any index does not fit the topology.
    Genotype(const GeneticTopology& topology, std::vector<std::uint16_t> alleles);

    const std::vector<std::uint16_t>& alleles() const noexcept { return alleles_; }
    std::size_t size() const noexcept { return alleles_.size(); }
    std::uint16_t operator[](std::size_t i) const { return alleles_[i]; }
    std::uint64_t topology_id() const noexcept { return topology_id_; }

    auto operator<=>(const Genotype&) const = default;

private:
    Genotype(std::vector<std::uint16_t> alleles, std::uint64_t topology_id)
        : alleles_(std::move(alleles)), topology_id_(topology_id) {}

    friend std::pair<Genotype, Genotype> exchange_segment(const Genotype&, const Genotype&,
                                                          std::size_t, std::size_t);
    friend Genotype mutate(const GeneticTopology&, const Genotype&, double, Rng&, MutationMode);
    friend Genotype random_genotype(const GeneticTopology&, Rng&);

    std::vector<std::uint16_t> alleles_;
    std::uint64_t topology_id_ = 0;
};

std::string render(const GeneticTopology& topology, const Genotype& genotype);

/// Inverse of render. Without a separator the string is matched against the
/// alphabets; throws DataError when no parse or more than one parse exists.
Genotype parse_genotype(const GeneticTopology& topology, std::string_view text);

BigInt genome_size(const GeneticTopology& topology);

Genotype random_genotype(const GeneticTopology& topology, Rng& rng);

/// Swaps the inclusive gene range [first, last] between a and b.
std::pair<Genotype, Genotype> exchange_segment(const Genotype& a, const Genotype& b,
                                               std::size_t first, std::size_t last);

/// Picks a segment uniformly over all (first, last) pairs with first <= last
/// and exchanges it.
std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, Rng& rng);

/// per_genotype: with probability prob, one uniformly chosen gene moves to a
/// different allele. per_gene: each gene independently does so with prob.
Genotype mutate(const GeneticTopology& topology, const Genotype& g, double prob, Rng& rng,
                MutationMode mode = MutationMode::per_genotype);

/// Number of genes whose alleles differ.
std::size_t ncd(const Genotype& a, const Genotype& b);

} // namespace qsarga
