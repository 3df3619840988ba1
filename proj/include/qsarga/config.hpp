#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "qsarga/descriptors.hpp"
#include "qsarga/engine.hpp"

namespace qsarga {

// Configuration files are line-oriented `key = value` with `[section]`
// headers; `#` or `;` starts a comment and an empty value leaves an optional
// setting unset. Unknown sections or keys are errors.

/// Evolution parameters (sections evolution, objective, selection, survival,
/// validity, viability). Missing keys keep their defaults.
EvolutionConfig parse_evolution_config(std::string_view text);
EvolutionConfig load_evolution_config(const std::string& path);

/// Normalized form: every key, fixed order, shortest round-trip numbers.
std::string serialize_evolution_config(const EvolutionConfig& cfg);

/// Ties the input files of one run together. Paths are resolved relative to
/// the manifest's directory.
struct RunManifest {
    std::string topology_path;
    std::string separator;
    std::string activity_path;
    /// Empty when the synthetic provider is used.
    std::string descriptor_table_path;
    std::optional<SyntheticSpec> synthetic;
    std::string evolution_path;
    std::string output_dir = "out";
    std::optional<std::uint64_t> master_seed;
};

RunManifest parse_manifest(std::string_view text, const std::string& base_dir = ".");
RunManifest load_manifest(const std::string& path);
std::string serialize_manifest(const RunManifest& manifest);

/// Everything a run needs, loaded and cross-validated.
struct Workspace {
    RunManifest manifest;
    GeneticTopology topology;
    Dataset dataset;
    std::unique_ptr<DescriptorProvider> provider;
    EvolutionConfig evolution;
};

/// Loads all referenced files; throws ConfigError naming the missing path.
Workspace open_workspace(const std::string& manifest_path);

} // namespace qsarga
